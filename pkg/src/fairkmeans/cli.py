"""Command-line harness: ingest, coreset, cluster, experiment, verify.

Exit codes: 0 success, 2 configuration or data-format error, 3
infeasible/unbalanced instance, 4 enumeration guard exceeded (1 is a
failed verification).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .coreset import build_fair_coreset, load_coreset, save_coreset, verify_coreset
from .core import Dataset
from .datagen import balanced_blobs
from .errors import (
    BalanceError,
    DataFormatError,
    InfeasibleTransportError,
    SizeGuardError,
)
from .experiment import ExperimentConfig, emit_report, run_experiment
from .ingestion import ingest_csv, write_dataset_csv
from .solvers import SolverConfig, cklv_kmeanspp, fair_kmeanspp, ptas, reassigned_cklv

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_GUARD = 4

ALGO_CHOICES = ("cklv", "reassigned", "fair", "ptas")


def _add_io_args(p: argparse.ArgumentParser, needs_color=True):
    p.add_argument("--input", help="CSV file with a header row")
    p.add_argument(
        "--synthetic",
        help="generate data instead: 'n=1000,d=2,blobs=3[,shift=0][,seed=0]'",
    )
    if needs_color:
        p.add_argument("--color-col", default="color", help="name of the color column")
    p.add_argument("--balance", action="store_true",
                   help="subsample the heavier color so both colors weigh the same")
    p.add_argument("--seed", type=int, default=0)


def _load_dataset(args) -> Dataset:
    if getattr(args, "synthetic", None):
        spec = {}
        for part in args.synthetic.split(","):
            key, _, value = part.partition("=")
            spec[key.strip()] = value.strip()
        try:
            return balanced_blobs(
                n=int(spec.get("n", 1000)),
                d=int(spec.get("d", 2)),
                n_blobs=int(spec.get("blobs", 3)),
                seed=int(spec.get("seed", args.seed)),
                color_shift=float(spec.get("shift", 0.0)),
            )
        except (KeyError, ValueError) as exc:
            raise DataFormatError(f"bad --synthetic spec {args.synthetic!r}: {exc}")
    if not args.input:
        raise DataFormatError("either --input or --synthetic is required")
    result = ingest_csv(
        args.input,
        color_col=args.color_col,
        balance=args.balance,
        seed=args.seed,
    )
    return result.dataset


def cmd_ingest(args) -> int:
    result = ingest_csv(
        args.input,
        color_col=args.color_col,
        features=args.features.split(",") if args.features else None,
        balance=args.balance,
        seed=args.seed,
    )
    ds = result.dataset
    print(f"rows read:        {result.n_rows_read}")
    print(f"rows dropped:     {result.n_rows_dropped} (missing entries)")
    if result.dropped_columns:
        print(f"columns dropped:  {', '.join(result.dropped_columns)} (non-numeric)")
    if args.balance:
        print(f"balanced away:    {result.n_balanced_away}")
    print(f"points:           {ds.n} (d={ds.d}, colors={ds.n_colors})")
    counts = ", ".join(
        f"{value!r}->{label} ({ds.color_weight(label)})"
        for value, label in sorted(result.color_mapping.items(), key=lambda kv: kv[1])
    )
    print(f"color mapping:    {counts}")
    if args.output:
        write_dataset_csv(ds, args.output, feature_names=result.feature_names)
        print(f"wrote:            {args.output}")
    return EXIT_OK


def cmd_coreset(args) -> int:
    dataset = _load_dataset(args)
    target = args.coreset_size if args.coreset_size else 200 * args.k
    summary = build_fair_coreset(
        dataset, k=args.k, epsilon=args.epsilon, seed=args.seed, target_size=target
    )
    save_coreset(summary, args.output)
    print(
        f"coreset: {summary.n_points} points (target {target}), total weight "
        f"{summary.total_weight}, movement {summary.movement_budget_used:.6g}"
    )
    print(f"wrote: {args.output}")
    return EXIT_OK


def _dataset_or_coreset(args):
    """cluster accepts a raw CSV or a serialized coreset."""
    if args.input and args.input.endswith(".json"):
        summary = load_coreset(args.input)
        return summary.to_dataset(), summary
    return _load_dataset(args), None


def cmd_cluster(args) -> int:
    dataset, _ = _dataset_or_coreset(args)
    config = SolverConfig(k=args.k, seed=args.seed)
    solver = {
        "cklv": cklv_kmeanspp,
        "reassigned": reassigned_cklv,
        "fair": fair_kmeanspp,
    }.get(args.algo)
    if solver is not None:
        clustering = solver(dataset, config)
    else:
        clustering = ptas(dataset, args.k, args.epsilon, mode="auto", rng=args.seed)
    print(f"algorithm: {args.algo}  k={args.k}  seed={args.seed}")
    print(f"cost: {clustering.cost!r}")
    if args.output:
        payload = {
            "algo": args.algo,
            "k": args.k,
            "seed": args.seed,
            "cost": clustering.cost,
            "centers": [[float(x) for x in row] for row in clustering.centers],
            "point_idx": clustering.point_idx.tolist(),
            "center_idx": clustering.center_idx.tolist(),
            "subweights": clustering.subweights.tolist(),
        }
        with open(args.output, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        print(f"wrote: {args.output}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    dataset = _load_dataset(args)
    config = ExperimentConfig(
        dataset_name=args.name,
        algos=tuple(args.algo),
        k_list=tuple(args.k),
        subsample_sizes=tuple(args.subsamples) if args.subsamples else None,
        epsilon=args.epsilon,
        coreset_points=args.coreset_size,
        reps=args.reps,
        seed=args.seed,
        pipelines=tuple(args.pipelines.split(",")),
    )
    report = run_experiment(dataset, config)
    paths = emit_report(report, args.output)
    ok = sum(1 for r in report.runs if r.status == "ok")
    print(f"runs: {len(report.runs)} total, {ok} ok")
    for name, path in sorted(paths.items()):
        print(f"wrote: {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    dataset = _load_dataset(args)
    summary = build_fair_coreset(dataset, k=args.k, epsilon=args.epsilon, seed=args.seed)
    report = verify_coreset(
        dataset, summary, n_center_trials=args.trials, seed=args.seed
    )
    print(
        f"checked {report.n_constraints_checked} constraints over "
        f"{report.n_center_sets} center sets at epsilon={report.epsilon}"
    )
    print(f"max relative deviation: {report.max_relative_deviation:.6g}")
    if not report.color_weights_match:
        print("FAIL: per-color weights do not match")
        return EXIT_VERIFY_FAILED
    if not report.passed:
        print(f"FAIL: {report.n_violations} sandwich violations")
        return EXIT_VERIFY_FAILED
    print("PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairkmeans",
        description="Fair k-means clustering with coresets and flow-based assignment",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="inspect/convert a CSV into the normalized form")
    p.add_argument("--input", required=True)
    p.add_argument("--color-col", required=True)
    p.add_argument("--features", help="comma-separated feature columns (default: all numeric)")
    p.add_argument("--balance", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("coreset", help="build and serialize a fair coreset")
    _add_io_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--coreset-size", type=int,
                   help="summary size target in points (default 200*k)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_coreset)

    p = sub.add_parser("cluster", help="run one solver on a CSV or coreset file")
    _add_io_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--algo", choices=ALGO_CHOICES, default="reassigned")
    p.add_argument("--epsilon", type=float, default=1.0, help="ptas approximation parameter")
    p.add_argument("--output")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("experiment", help="full cost/runtime grid")
    _add_io_args(p)
    p.add_argument("--name", default="data", help="dataset label in reports")
    p.add_argument("--k", type=int, nargs="+", default=[2])
    p.add_argument("--subsamples", type=int, nargs="+",
                   help="ascending subsample sizes (default: full data)")
    p.add_argument("--algo", choices=ALGO_CHOICES, nargs="+", default=["fair"])
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--coreset-size", type=int,
                   help="summary size target in points (default 200*k)")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--pipelines", default="input,coreset",
                   help="comma list from {input,coreset}")
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="tiny-instance coreset sandwich checks")
    _add_io_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BalanceError, InfeasibleTransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
