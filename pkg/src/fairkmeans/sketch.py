"""Dimension-efficient streaming: project rows, summarize, recover centers.

Rows of the input matrix are projected by a scaled Rademacher matrix
(entries +/- 1/sqrt(m), counter-based generation keyed by seed and row
index, so rows can be produced on demand without materializing the
matrix). A fair coreset is maintained over the projected rows while
exact linear bookkeeping (row count and coordinate sum in the original
space) rides along with every summary point. Clustering the summary in
the projected space then yields full-dimensional centers: each cluster's
center is the exact mean of the original rows whose projections were
consolidated into it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .coreset import (
    CORESET_FORMAT,
    CORESET_VERSION,
    CoresetBuilder,
    FairCoreset,
    coreset_from_record,
    coreset_to_record,
)
from .solvers import SolverConfig, fair_kmeanspp


def projection_row(seed: int, m: int, row_index: int) -> np.ndarray:
    """Row `row_index` of the d x m Rademacher projection, values +/- 1/sqrt(m).

    Counter-based: each row comes from its own Philox stream keyed by
    (seed, row), so any row is reproducible in isolation.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if seed < 0 or row_index < 0:
        raise ValueError("seed and row_index must be nonnegative")
    bg = np.random.Philox(key=(int(seed) << 64) + int(row_index))
    bits = np.random.Generator(bg).integers(0, 2, size=m)
    return (2.0 * bits - 1.0) / np.sqrt(m)


def make_projection(d: int, m: int, seed: int) -> np.ndarray:
    """The full d x m projection matrix (stacked on-demand rows)."""
    return np.stack([projection_row(seed, m, i) for i in range(d)])


@dataclass
class SketchSummary:
    """Finalized sketch: projected coreset plus projection parameters."""

    coreset: FairCoreset  # m-dimensional summary with original-space provenance
    seed: int
    m: int
    d: int
    rows_seen: int


class Sketch:
    """Single-writer streaming sketch of a colored row matrix."""

    def __init__(
        self,
        d: int,
        m: int,
        k: int,
        epsilon: float,
        seed: int = 0,
        coreset_seed: int = 0,
        init_buffer: int = 64,
    ):
        self.d = int(d)
        self.m = int(m)
        self.seed = int(seed)
        self.projection = make_projection(d, m, seed)
        self.builder = CoresetBuilder(
            k, epsilon, seed=coreset_seed, provenance=True, prov_dim=d,
            init_buffer=init_buffer,
        )
        self.rows_seen = 0

    def insert(self, row, color: int) -> None:
        row = np.asarray(row, dtype=np.float64).ravel()
        self.insert_many(row[None, :], np.array([color]))

    def insert_many(self, rows, colors) -> None:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.shape[1] != self.d:
            raise ValueError(f"row dimension {rows.shape[1]} != {self.d}")
        projected = rows @ self.projection
        self.builder.insert_many(projected, colors, prov_rows=rows)
        self.rows_seen += rows.shape[0]

    def finalize(self, target_size: int | None = None) -> SketchSummary:
        coreset = self.builder.finalize(target_size=target_size)
        return SketchSummary(coreset, self.seed, self.m, self.d, self.rows_seen)


def recover_centers(summary: SketchSummary | FairCoreset, labels, k: int | None = None) -> np.ndarray:
    """Exact original-space centers from provenance sums.

    ``labels`` assigns every summary point to a cluster; cluster j's
    center is sum of linear sums divided by sum of counts over its
    members. Every cluster in 0..k-1 must be nonempty.
    """
    coreset = summary.coreset if isinstance(summary, SketchSummary) else summary
    if coreset.prov_count is None:
        raise ValueError("summary carries no provenance; rebuild with provenance enabled")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (coreset.n_points,):
        raise ValueError("labels must cover every summary point")
    if k is None:
        k = int(labels.max()) + 1
    d = coreset.prov_sum.shape[1]
    centers = np.empty((k, d), dtype=np.float64)
    for j in range(k):
        members = labels == j
        count = int(coreset.prov_count[members].sum())
        if count == 0:
            raise ValueError(f"cluster {j} received no summary points")
        centers[j] = coreset.prov_sum[members].sum(axis=0) / count
    return centers


def cluster_sketch(summary: SketchSummary, config: SolverConfig, solver=fair_kmeanspp):
    """Fair-solve the projected summary, then lift centers to the original space.

    The solver may split a summary point's weight across centers; for
    recovery each summary point follows the center that received most of
    its weight. Returns (original-space centers, summary labels).
    """
    coreset = summary.coreset
    ds = coreset.to_dataset()
    clustering = solver(ds, config)
    labels = clustering.labels(ds)
    used = np.unique(labels)
    remap = {int(c): i for i, c in enumerate(used)}
    labels = np.array([remap[int(c)] for c in labels], dtype=np.int64)
    centers = recover_centers(summary, labels, k=len(used))
    return centers, labels


SKETCH_FORMAT = "fair-sketch"


def save_sketch(summary: SketchSummary, path) -> None:
    rec = coreset_to_record(
        summary.coreset,
        extra={
            "sketch_format": SKETCH_FORMAT,
            "projection_seed": summary.seed,
            "m": summary.m,
            "original_d": summary.d,
            "rows_seen": summary.rows_seen,
        },
    )
    with open(path, "w") as fh:
        json.dump(rec, fh)
        fh.write("\n")


def load_sketch(path) -> SketchSummary:
    with open(path) as fh:
        rec = json.load(fh)
    if rec.get("sketch_format") != SKETCH_FORMAT:
        raise ValueError("not a sketch record")
    if rec.get("format") != CORESET_FORMAT or rec.get("version") != CORESET_VERSION:
        raise ValueError("unsupported sketch record version")
    coreset = coreset_from_record(rec)
    return SketchSummary(
        coreset,
        int(rec["projection_seed"]),
        int(rec["m"]),
        int(rec["original_d"]),
        int(rec["rows_seen"]),
    )
