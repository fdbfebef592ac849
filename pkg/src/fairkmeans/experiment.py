"""Experiment orchestration: cost/runtime grids over subsample sizes and k.

For every (subsample size, k, repetition) cell the selected algorithms
run twice: once directly on the input subsample and once on a coreset of
it, with the coreset-derived centers re-evaluated by an optimal fair
assignment on the input ("evaluated on the input set"). Wall time is
bracketed per phase (coreset build / fairlets / solve / assignment).

Cost tables and clusterings are byte-deterministic given the config and
seeds; wall-clock timings are inherently not, so they are emitted into a
separate file.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .assignment import fair_assignment
from .core import Dataset, FairClustering
from .coreset import build_fair_coreset
from .errors import SizeGuardError
from .fairlets import compute_fairlets
from .ingestion import balanced_subsample_indices
from .solver_utils import as_rng
from .solvers import (
    PhaseTimer,
    SolverConfig,
    cklv_kmeanspp,
    fair_kmeanspp,
    ptas,
    reassigned_cklv,
)

ALGORITHMS = {
    "cklv": cklv_kmeanspp,
    "reassigned": reassigned_cklv,
    "fair": fair_kmeanspp,
}

PHASES = ("coreset_build", "fairlets", "solve", "assignment")


@dataclass
class ExperimentConfig:
    dataset_name: str = "data"
    algos: tuple[str, ...] = ("fair",)
    k_list: tuple[int, ...] = (2,)
    subsample_sizes: tuple[int, ...] | None = None  # None: full data only
    epsilon: float = 0.2
    coreset_points: int | None = None  # absolute summary size target; None: 200*k
    reps: int = 5
    seed: int = 0
    pipelines: tuple[str, ...] = ("input", "coreset")
    ptas_epsilon: float = 1.0

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.subsample_sizes is not None:
            sizes = list(self.subsample_sizes)
            if sizes != sorted(sizes):
                raise ValueError("subsample sizes must be ascending")
        for algo in self.algos:
            if algo not in ALGORITHMS and algo != "ptas":
                raise ValueError(f"unknown algorithm {algo!r}")
        for p in self.pipelines:
            if p not in ("input", "coreset"):
                raise ValueError(f"unknown pipeline {p!r}")

    def seeds(self) -> list[int]:
        return [self.seed + 1000 * r for r in range(self.reps)]


@dataclass
class RunRecord:
    dataset: str
    n: int
    d: int
    k: int
    seed: int
    algo: str
    pipeline: str
    status: str  # "ok" | "skipped" | "guard"
    cost: float | None
    coreset_points: int | None
    fairlet_cost: float | None
    phase_seconds: dict[str, float] = field(default_factory=dict)
    clustering: FairClustering | None = None
    subsample: np.ndarray | None = None

    @property
    def run_id(self) -> str:
        return (
            f"{self.dataset}-n{self.n}-k{self.k}-s{self.seed}-{self.algo}-{self.pipeline}"
        )

    @property
    def total_seconds(self) -> float:
        return sum(self.phase_seconds.values())


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    runs: list[RunRecord]

    def aggregates(self) -> list[dict]:
        """Mean/min cost per cell plus the coreset/input cost ratio."""
        cells: dict[tuple, list[RunRecord]] = {}
        for run in self.runs:
            if run.status != "ok":
                continue
            cells.setdefault((run.n, run.k, run.algo, run.pipeline), []).append(run)
        rows = []
        for (n, k, algo, pipeline), runs in sorted(cells.items()):
            costs = [r.cost for r in runs]
            rows.append(
                {
                    "dataset": runs[0].dataset,
                    "n": n,
                    "k": k,
                    "algo": algo,
                    "pipeline": pipeline,
                    "runs": len(runs),
                    "mean_cost": float(np.mean(costs)),
                    "min_cost": float(np.min(costs)),
                }
            )
        by_key = {(r["n"], r["k"], r["algo"], r["pipeline"]): r for r in rows}
        for row in rows:
            base = by_key.get((row["n"], row["k"], row["algo"], "input"))
            row["ratio_to_input"] = (
                row["mean_cost"] / base["mean_cost"]
                if base is not None and base["mean_cost"] > 0
                else None
            )
        return rows


def _solve(algo: str, dataset: Dataset, config: SolverConfig, timer: PhaseTimer,
           ptas_epsilon: float) -> FairClustering:
    if algo == "ptas":
        t0 = time.perf_counter()
        clustering = ptas(dataset, config.k, ptas_epsilon, mode="auto", rng=config.seed)
        timer.add("solve", time.perf_counter() - t0)
        return clustering
    return ALGORITHMS[algo](dataset, config, timer=timer)


def _balanced_subsample(dataset: Dataset, size: int, rng) -> np.ndarray:
    """Exactly balanced subsample of the requested size (size//2 per color)."""
    half = size // 2
    idx1 = np.flatnonzero(dataset.colors == 1)
    idx2 = np.flatnonzero(dataset.colors == 2)
    if half > min(len(idx1), len(idx2)):
        raise ValueError(f"subsample size {size} exceeds balanced capacity")
    keep1 = rng.choice(idx1, size=half, replace=False)
    keep2 = rng.choice(idx2, size=half, replace=False)
    return np.sort(np.concatenate([keep1, keep2]))


def run_experiment(dataset: Dataset, config: ExperimentConfig) -> ExperimentReport:
    """Run the full (subsample size, k, seed, algo, pipeline) grid."""
    if dataset.n_colors != 2:
        raise ValueError("experiments expect two-color datasets")
    cw = dataset.color_weights()
    if cw[0] != cw[1]:
        # equalize once up front so every subsample can stay balanced
        keep = balanced_subsample_indices(dataset.colors, as_rng(config.seed))
        dataset = dataset.subset(keep)

    sizes = config.subsample_sizes or (dataset.n,)
    runs: list[RunRecord] = []
    for n in sizes:
        for rep_seed in config.seeds():
            rng = as_rng(rep_seed)
            sub_idx = (
                np.arange(dataset.n)
                if n >= dataset.n
                else _balanced_subsample(dataset, n, rng)
            )
            sub = dataset.subset(sub_idx)
            fairlet_cost = compute_fairlets(sub).matching_cost
            for k in config.k_list:
                runs.extend(_run_cell(sub, sub_idx, config, k, rep_seed, fairlet_cost))
    return ExperimentReport(config, runs)


def _run_cell(sub, sub_idx, config, k, seed, fairlet_cost):
    runs = []
    solver_config = SolverConfig(k=k, seed=seed)
    base = dict(
        dataset=config.dataset_name, n=sub.n, d=sub.d, k=k, seed=seed,
        fairlet_cost=fairlet_cost,
    )
    for algo in config.algos:
        if "input" in config.pipelines:
            timer = PhaseTimer()
            try:
                clustering = _solve(algo, sub, solver_config, timer, config.ptas_epsilon)
                runs.append(
                    RunRecord(
                        **base, algo=algo, pipeline="input", status="ok",
                        cost=clustering.cost, coreset_points=None,
                        phase_seconds=dict(timer.seconds), clustering=clustering,
                        subsample=sub_idx,
                    )
                )
            except SizeGuardError:
                runs.append(
                    RunRecord(
                        **base, algo=algo, pipeline="input", status="guard",
                        cost=None, coreset_points=None,
                    )
                )
        else:
            runs.append(
                RunRecord(
                    **base, algo=algo, pipeline="input", status="skipped",
                    cost=None, coreset_points=None,
                )
            )
        if "coreset" in config.pipelines:
            timer = PhaseTimer()
            t0 = time.perf_counter()
            summary = build_fair_coreset(
                sub, k=k, epsilon=config.epsilon, seed=seed,
                target_size=config.coreset_points or 200 * k,
            )
            timer.add("coreset_build", time.perf_counter() - t0)
            try:
                coarse = _solve(
                    algo, summary.to_dataset(), solver_config, timer, config.ptas_epsilon
                )
                t0 = time.perf_counter()
                evaluated = fair_assignment(sub, coarse.centers)
                timer.add("assignment", time.perf_counter() - t0)
                runs.append(
                    RunRecord(
                        **base, algo=algo, pipeline="coreset", status="ok",
                        cost=evaluated.cost, coreset_points=summary.n_points,
                        phase_seconds=dict(timer.seconds), clustering=evaluated,
                        subsample=sub_idx,
                    )
                )
            except SizeGuardError:
                runs.append(
                    RunRecord(
                        **base, algo=algo, pipeline="coreset", status="guard",
                        cost=None, coreset_points=summary.n_points,
                    )
                )
    return runs


RUN_COLUMNS = (
    "dataset", "n", "d", "k", "seed", "algo", "pipeline", "status",
    "cost", "coreset_points", "fairlet_cost",
)
TIMING_COLUMNS = (
    "dataset", "n", "k", "seed", "algo", "pipeline",
    "coreset_build_s", "fairlets_s", "solve_s", "assignment_s", "total_s",
)
AGGREGATE_COLUMNS = (
    "dataset", "n", "k", "algo", "pipeline", "runs", "mean_cost", "min_cost",
    "ratio_to_input",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: ExperimentReport, outdir) -> dict[str, str]:
    """Write runs.csv, aggregates.csv, timings.csv, clusterings.json.

    runs/aggregates/clusterings are byte-deterministic for a fixed
    config; timings are wall clock and live in their own file.
    """
    import os

    os.makedirs(outdir, exist_ok=True)
    paths = {}
    runs = sorted(report.runs, key=lambda r: r.run_id)

    paths["runs"] = os.path.join(outdir, "runs.csv")
    with open(paths["runs"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_COLUMNS)
        for r in runs:
            writer.writerow(
                [_fmt(getattr(r, c)) for c in RUN_COLUMNS]
            )

    paths["aggregates"] = os.path.join(outdir, "aggregates.csv")
    with open(paths["aggregates"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for row in report.aggregates():
            writer.writerow([_fmt(row.get(c)) for c in AGGREGATE_COLUMNS])

    paths["timings"] = os.path.join(outdir, "timings.csv")
    with open(paths["timings"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMING_COLUMNS)
        for r in runs:
            if r.status != "ok":
                continue
            writer.writerow(
                [r.dataset, r.n, r.k, r.seed, r.algo, r.pipeline]
                + [_fmt(r.phase_seconds.get(p, 0.0)) for p in PHASES]
                + [_fmt(r.total_seconds)]
            )

    paths["clusterings"] = os.path.join(outdir, "clusterings.json")
    payload = {}
    for r in runs:
        if r.clustering is None:
            continue
        payload[r.run_id] = {
            "cost": r.cost,
            "centers": [[float(x) for x in row] for row in r.clustering.centers],
            "point_idx": r.clustering.point_idx.tolist(),
            "center_idx": r.clustering.center_idx.tolist(),
            "subweights": r.clustering.subweights.tolist(),
            "subsample": r.subsample.tolist() if r.subsample is not None else None,
        }
    with open(paths["clusterings"], "w") as fh:
        json.dump(payload, fh, indent=0, sort_keys=True)
        fh.write("\n")
    return paths


def recompute_cost(dataset: Dataset, record: dict) -> float:
    """Re-evaluate a stored clustering row against the stored dataset."""
    sub = dataset.subset(np.array(record["subsample"])) if record["subsample"] else dataset
    clustering = FairClustering(
        np.array(record["centers"], dtype=np.float64),
        np.array(record["point_idx"], dtype=np.int64),
        np.array(record["center_idx"], dtype=np.int64),
        np.array(record["subweights"], dtype=np.int64),
    )
    from .core import assignment_cost

    return assignment_cost(sub, clustering)
