"""Movement-based fair coresets: construction, merging, streaming, verification.

A fair coreset is a weighted colored summary S of a colored point set P
such that for every center set C and every coloring constraint K the
constrained cost of S stays within (1 +/- epsilon) of the constrained
cost of P. The construction realizes the movement contract: every input
point is snapped to a nearby grid cell center so that the total weighted
squared movement stays below (epsilon^2/16) * OPT_hat, where OPT_hat is
a certified-in-practice lower bound on the colorless k-means optimum.
Points sharing a snapped location are consolidated per color, so at most
one summary point per (location, color) exists.

Construction details (the paper-level contract only fixes the movement
budget, not the geometry):

* a bicriteria center set A of size ~ k*log n is seeded with k-means++
  and OPT_hat is the cost against A divided by the k-means++ guarantee
  factor 8*(ln k + 2);
* the per-unit-weight movement allowance at distance r from A is
  alpha + beta*r^2 with alpha = B/(2W) and beta = B/(2*cost(P, A)), so
  the grid around each center coarsens ring by ring (cell side doubling
  per ring) while the total movement telescopes to at most
  B = (epsilon/2)^2/16 * OPT_hat, a quarter of the contract budget;
* the streaming builder buffers exactly until enough distinct locations
  arrive, then snaps; it re-seeds A and re-snaps its own summary whenever
  the stream doubles in weight or the movement budget fills up (the
  budget doubles alongside the estimate, so the stage budgets telescope).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .assignment import iter_compositions
from .core import Dataset, nearest_center, pairwise_sq_dists
from .errors import SizeGuardError
from .solver_utils import as_rng
from .solvers import kmeanspp_seed
from .transport import TransportProblem, solve_transport
from .validation import check_centers

VERIFY_MAX_WEIGHT = 20
VERIFY_MAX_K = 3


def _seeding_guarantee_factor(k: int) -> float:
    """Expected k-means++ approximation factor 8*(ln k + 2)."""
    return 8.0 * (math.log(max(k, 1)) + 2.0)


@dataclass
class FairCoreset:
    """Weighted colored summary plus construction bookkeeping.

    ``prov_count`` / ``prov_sum`` optionally carry, per summary point,
    the number of source rows mapped to it and the linear sum of those
    rows in their original space (used by the sketching pipeline).
    """

    coords: np.ndarray
    colors: np.ndarray
    weights: np.ndarray
    n_colors: int
    k: int
    epsilon: float
    movement_budget_used: float = 0.0
    opt_estimate: float | None = None
    prov_count: np.ndarray | None = None
    prov_sum: np.ndarray | None = None

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum()) if self.n_points else 0

    def color_weights(self) -> np.ndarray:
        out = np.zeros(self.n_colors, dtype=np.int64)
        for j in range(1, self.n_colors + 1):
            out[j - 1] = int(self.weights[self.colors == j].sum())
        return out

    def to_dataset(self) -> Dataset:
        if self.n_points == 0:
            raise ValueError("coreset is empty")
        return Dataset(self.coords, self.colors, self.weights, self.n_colors)


class _Consolidator:
    """Accumulates weight and provenance per exact (location, color) key."""

    def __init__(self, d: int, prov_dim: int | None):
        self.d = d
        self.prov_dim = prov_dim
        self.slots: dict[bytes, int] = {}
        self.coords: list[np.ndarray] = []
        self.colors: list[int] = []
        self.weights: list[int] = []
        self.prov_count: list[int] = []
        self.prov_sum: list[np.ndarray] = []

    def add(self, coords_row, color, weight, prov_count=0, prov_sum=None):
        key = coords_row.tobytes() + int(color).to_bytes(8, "little")
        slot = self.slots.get(key)
        if slot is None:
            self.slots[key] = len(self.coords)
            self.coords.append(coords_row.copy())
            self.colors.append(int(color))
            self.weights.append(int(weight))
            if self.prov_dim is not None:
                self.prov_count.append(int(prov_count))
                self.prov_sum.append(
                    np.array(prov_sum, dtype=np.float64)
                    if prov_sum is not None
                    else np.zeros(self.prov_dim)
                )
        else:
            self.weights[slot] += int(weight)
            if self.prov_dim is not None:
                self.prov_count[slot] += int(prov_count)
                if prov_sum is not None:
                    self.prov_sum[slot] = self.prov_sum[slot] + prov_sum

    def arrays(self):
        if not self.coords:
            coords = np.zeros((0, self.d))
            colors = np.zeros(0, dtype=np.int64)
            weights = np.zeros(0, dtype=np.int64)
        else:
            coords = np.stack(self.coords)
            colors = np.array(self.colors, dtype=np.int64)
            weights = np.array(self.weights, dtype=np.int64)
        if self.prov_dim is None:
            return coords, colors, weights, None, None
        pc = np.array(self.prov_count, dtype=np.int64)
        ps = np.stack(self.prov_sum) if self.prov_sum else np.zeros((0, self.prov_dim))
        return coords, colors, weights, pc, ps


def _snap_chunk(coords, anchors, anchor_idx, r_sq, alpha, beta, d):
    """Snap points to exponential grid cells around their nearest anchor.

    Ring j covers radii (r1*2^(j-1), r1*2^j] with cell side s0*2^(j-1)
    (ring 0 covers [0, r1] at side s0), where r1 = sqrt(alpha/beta) and
    s0 = 2*sqrt(alpha/d). A point in ring j moves by at most
    alpha*4^(j-1) <= alpha + beta*r^2 in squared distance.
    """
    r1 = math.sqrt(alpha / beta)
    s0 = 2.0 * math.sqrt(alpha / d)
    r = np.sqrt(r_sq)
    with np.errstate(divide="ignore"):
        ring = np.ceil(np.log2(np.maximum(r / r1, 1e-300))).astype(np.int64)
    ring = np.maximum(ring, 0)
    ring[r <= r1] = 0
    side = s0 * np.exp2(np.maximum(ring - 1, 0).astype(np.float64))
    base = anchors[anchor_idx]
    # anchor sits at a cell center (round to the nearest lattice point),
    # so a tight neighborhood collapses into one cell instead of 2^d
    snapped = base + np.floor((coords - base) / side[:, None] + 0.5) * side[:, None]
    return snapped


@dataclass
class _GridParams:
    anchors: np.ndarray
    opt_estimate: float
    budget: float
    alpha: float
    beta: float


def _fit_grid(coords, weights, k, epsilon, rng, n_anchors: int | None = None) -> _GridParams | None:
    """Seed bicriteria anchors and size the movement budget; None if degenerate."""
    n = coords.shape[0]
    W = float(weights.sum())
    if n_anchors is None:
        n_anchors = int(math.ceil(k * (1.0 + math.log2(n + 1))))
    m = min(n, n_anchors)
    anchors = kmeanspp_seed(coords, weights, m, rng).centers
    anchors = np.unique(anchors, axis=0)
    r_sq, _ = nearest_center(coords, anchors)
    est = float(np.sum(r_sq * weights))
    if est <= 0.0:
        return None
    opt_hat = est / _seeding_guarantee_factor(k)
    budget = (epsilon / 2.0) ** 2 / 16.0 * opt_hat
    return _GridParams(anchors, opt_hat, budget, budget / (2.0 * W), budget / (2.0 * est))


def _coarsen_to_target(coords, colors, weights, pc, ps, d, prov_dim, k, epsilon, target, rng):
    """Re-snap onto a coarser grid until the summary fits the target size.

    Used only by the fixed-summary-size heuristic. Tries anchor counts
    from the full bicriteria count down to k (more anchors preserve more
    structure but raise the size floor of roughly colors * anchors *
    occupied rings); per anchor count the movement allowance doubles
    until the summary fits, then bisects back to the finest fitting
    scale. Snaps always from the arrays given (no compounding). Returns
    the coarsest attempt if the target is simply unreachable.
    """
    n = len(coords)
    ladder = []
    m = int(math.ceil(k * (1.0 + math.log2(n + 1))))
    while m > k:
        ladder.append(m)
        m = max(k, m // 2)
    ladder.append(k)

    fallback = None
    for n_anchors in ladder:
        grid = _fit_grid(coords, weights, k, epsilon, rng, n_anchors=n_anchors)
        if grid is None:
            return coords, colors, weights, pc, ps, 0.0

        def attempt(scale):
            scaled = _GridParams(
                grid.anchors, grid.opt_estimate, grid.budget * scale,
                grid.alpha * scale, grid.beta * scale,
            )
            return _snap_and_consolidate(
                coords, colors, weights, scaled, d, prov_dim, pc, ps
            )

        lo = None  # finest scale known too big
        scale = 1.0
        result = None
        stall = 0
        prev_size = None
        for _ in range(48):
            result = attempt(scale)
            size = len(result[0])
            if size <= target:
                break
            stall = stall + 1 if size == prev_size else 0
            if stall >= 3:
                break  # size floor of this anchor count reached
            prev_size = size
            lo = scale
            scale *= 4.0
        fallback = result
        if len(result[0]) > target:
            continue  # try fewer anchors
        if lo is None:
            return result
        hi = scale
        for _ in range(8):
            mid = math.sqrt(lo * hi)
            cand = attempt(mid)
            if len(cand[0]) <= target:
                hi, result = mid, cand
            else:
                lo = mid
        return result
    return fallback


def build_fair_coreset(
    source,
    k: int,
    epsilon: float,
    seed: int = 0,
    target_size: int | None = None,
    provenance: bool = False,
    prov_count=None,
    prov_sum=None,
) -> FairCoreset:
    """Build a fair coreset of a dataset (two passes) or of a point stream.

    Given a Dataset, the movement budget is sized exactly: anchors and
    the cost estimate come from the full data, so the movement contract
    holds by construction. Given an iterable of (coords, color, weight)
    rows it delegates to the streaming builder.

    ``target_size`` is a heuristic override: the grid is coarsened
    (cells doubling) until the summary has at most that many points,
    mirroring the fixed-summary-size practice for large streams. The
    extra movement is recorded honestly, so a size-targeted summary may
    spend more movement than the epsilon certificate allows; the
    recorded epsilon stays the requested one.
    """
    if not isinstance(source, Dataset):
        builder = CoresetBuilder(k, epsilon, seed=seed, provenance=provenance)
        for row in source:
            builder.insert(*row)
        return builder.finalize(target_size=target_size)

    dataset = source
    _check_epsilon(epsilon)
    if k < 1:
        raise ValueError("k must be >= 1")
    if provenance:
        if prov_count is None:
            prov_count = dataset.weights.astype(np.int64)
            prov_sum = dataset.coords * dataset.weights[:, None]
        prov_count = np.asarray(prov_count, dtype=np.int64)
        prov_sum = np.asarray(prov_sum, dtype=np.float64)
        prov_dim = prov_sum.shape[1]
    else:
        prov_dim = None

    rng = as_rng(seed)
    grid = _fit_grid(dataset.coords, dataset.weights, k, epsilon, rng)
    coords, colors, weights, pc, ps, movement = _snap_and_consolidate(
        dataset.coords, dataset.colors, dataset.weights, grid, dataset.d, prov_dim,
        prov_count, prov_sum,
    )
    if grid is not None and target_size is not None and len(coords) > target_size:
        coords, colors, weights, pc, ps, movement = _coarsen_to_target(
            dataset.coords, dataset.colors, dataset.weights, prov_count, prov_sum,
            dataset.d, prov_dim, k, epsilon, target_size, rng,
        )
    return FairCoreset(
        coords, colors, weights, dataset.n_colors, k, float(epsilon), movement,
        grid.opt_estimate if grid is not None else 0.0, pc, ps,
    )


def _consolidate_arrays(coords, colors, weights, prov_count=None, prov_sum=None):
    """Vectorized exact consolidation by (location, color)."""
    keyed = np.column_stack([coords, colors.astype(np.float64)])
    uniq, inverse = np.unique(keyed, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    m = uniq.shape[0]
    out_w = np.bincount(inverse, weights=weights.astype(np.float64), minlength=m)
    out_coords = np.ascontiguousarray(uniq[:, :-1])
    out_colors = uniq[:, -1].astype(np.int64)
    pc = ps = None
    if prov_count is not None:
        pc = np.bincount(
            inverse, weights=np.asarray(prov_count, dtype=np.float64), minlength=m
        ).astype(np.int64)
        ps = np.zeros((m, prov_sum.shape[1]))
        np.add.at(ps, inverse, prov_sum)
    return out_coords, out_colors, out_w.astype(np.int64), pc, ps


def _snap_and_consolidate(coords, colors, weights, grid, d, prov_dim, prov_count, prov_sum):
    if grid is None:
        snapped = coords
        movement = 0.0
    else:
        r_sq, aidx = nearest_center(coords, grid.anchors)
        snapped = _snap_chunk(coords, grid.anchors, aidx, r_sq, grid.alpha, grid.beta, d)
        movement = float(np.sum(((coords - snapped) ** 2).sum(axis=1) * weights))
    if prov_dim is not None and prov_count is None:
        prov_count = np.zeros(len(coords), dtype=np.int64)
        prov_sum = np.zeros((len(coords), prov_dim))
    out = _consolidate_arrays(
        snapped, colors, weights,
        prov_count if prov_dim is not None else None,
        prov_sum if prov_dim is not None else None,
    )
    return (*out, movement)


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


class CoresetBuilder:
    """Single-writer streaming fair-coreset builder.

    Buffers points exactly until enough distinct locations arrive, then
    switches to grid snapping. The anchor set and movement budget are
    refreshed (and the summary re-snapped) whenever the inserted weight
    doubles or the stage movement budget fills up. One insert at a time;
    not safe for concurrent writers.
    """

    def __init__(
        self,
        k: int,
        epsilon: float,
        seed: int = 0,
        provenance: bool = False,
        prov_dim: int | None = None,
        init_buffer: int = 64,
    ):
        _check_epsilon(epsilon)
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.epsilon = float(epsilon)
        self.rng = as_rng(seed)
        self.provenance = provenance
        self._prov_dim = prov_dim  # fixed at first insert if None
        self.init_buffer = int(init_buffer)
        self.d: int | None = None
        self.n_colors_seen = 0
        self.movement_budget_used = 0.0
        self._grid: _GridParams | None = None
        self._cons: _Consolidator | None = None
        self._weight_at_build = 0
        self._total_weight = 0
        self._finalized = False

    def insert(self, coords_row, color, weight: int = 1, prov_row=None) -> None:
        coords_row = np.asarray(coords_row, dtype=np.float64).ravel()
        prov = None if prov_row is None else np.asarray(prov_row, dtype=np.float64)
        self.insert_many(
            coords_row[None, :],
            np.array([color]),
            np.array([weight]),
            None if prov is None else prov[None, :],
        )

    def insert_many(self, coords, colors, weights=None, prov_rows=None) -> None:
        if self._finalized:
            raise RuntimeError("builder already finalized")
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords[:, None]
        n = coords.shape[0]
        if n == 0:
            return
        colors = np.asarray(colors, dtype=np.int64)
        weights = (
            np.ones(n, dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
        )
        if colors.min() < 1 or weights.min() < 1:
            raise ValueError("colors and weights must be positive integers")
        if self.d is None:
            self.d = coords.shape[1]
            if self.provenance and self._prov_dim is None:
                self._prov_dim = self.d if prov_rows is None else np.asarray(prov_rows).shape[1]
            self._cons = _Consolidator(self.d, self._prov_dim if self.provenance else None)
        if coords.shape[1] != self.d:
            raise ValueError(f"row dimension {coords.shape[1]} != {self.d}")
        if self.provenance and prov_rows is None:
            prov_rows = coords * weights[:, None].astype(np.float64)
            prov_counts = weights
        elif self.provenance:
            prov_rows = np.asarray(prov_rows, dtype=np.float64)
            prov_counts = weights
        self.n_colors_seen = max(self.n_colors_seen, int(colors.max()))
        self._total_weight += int(weights.sum())

        for start in range(0, n, 8192):
            stop = min(n, start + 8192)
            self._insert_chunk(
                coords[start:stop],
                colors[start:stop],
                weights[start:stop],
                prov_rows[start:stop] if self.provenance else None,
                prov_counts[start:stop] if self.provenance else None,
            )
            self._maybe_rebuild()

    def _insert_chunk(self, coords, colors, weights, prov_rows, prov_counts) -> None:
        if self._grid is not None:
            r_sq, aidx = nearest_center(coords, self._grid.anchors)
            snapped = _snap_chunk(
                coords, self._grid.anchors, aidx, r_sq, self._grid.alpha, self._grid.beta, self.d
            )
            self.movement_budget_used += float(
                np.sum(((coords - snapped) ** 2).sum(axis=1) * weights)
            )
            coords = snapped
        # consolidate within the chunk first, then merge the survivors
        coords, colors, weights, pc, ps = _consolidate_arrays(
            coords, colors, weights,
            prov_counts if self.provenance else None,
            prov_rows if self.provenance else None,
        )
        for i in range(coords.shape[0]):
            self._cons.add(
                coords[i],
                colors[i],
                weights[i],
                pc[i] if self.provenance else 0,
                ps[i] if self.provenance else None,
            )

    def _threshold(self) -> int:
        m = math.ceil(self.k * (1.0 + math.log2(max(self._total_weight, 2))))
        return max(self.init_buffer, 2 * int(m))

    def _maybe_rebuild(self) -> None:
        if self._grid is None:
            if len(self._cons.coords) > self._threshold():
                self._rebuild()
            return
        if (
            self._total_weight >= 2 * self._weight_at_build
            or self.movement_budget_used >= self._grid.budget
        ):
            self._rebuild()

    def _rebuild(self) -> None:
        coords, colors, weights, pc, ps = self._cons.arrays()
        if len(coords) == 0:
            return
        # stream mode halves epsilon once more: stage budgets then sum to
        # at most half the two-pass budget even across rebuilds
        grid = _fit_grid(coords, weights, self.k, self.epsilon / 2.0, self.rng)
        if grid is None:
            return
        if self._grid is not None and self.movement_budget_used >= self._grid.budget:
            # movement-triggered: force the budget to at least double so
            # stage budgets telescope
            if grid.opt_estimate < 2.0 * self._grid.opt_estimate:
                scale = 2.0 * self._grid.opt_estimate / grid.opt_estimate
                grid = _GridParams(
                    grid.anchors,
                    grid.opt_estimate * scale,
                    grid.budget * scale,
                    grid.alpha * scale,
                    grid.beta * scale,
                )
        self._grid = grid
        self._weight_at_build = self._total_weight
        self._cons = _Consolidator(self.d, self._prov_dim if self.provenance else None)
        self._insert_chunk(coords, colors, weights, ps, pc)

    def finalize(self, target_size: int | None = None) -> FairCoreset:
        """Freeze the builder and emit the coreset.

        With ``target_size`` set, the summary is re-snapped on coarser
        and coarser grids until small enough; see build_fair_coreset for
        the accounting caveat.
        """
        if self._finalized:
            raise RuntimeError("builder already finalized")
        self._finalized = True
        if self._cons is None:
            return FairCoreset(
                np.zeros((0, 0)), np.zeros(0, np.int64), np.zeros(0, np.int64),
                0, self.k, self.epsilon, 0.0, None, None, None,
            )
        coords, colors, weights, pc, ps = self._cons.arrays()
        movement = self.movement_budget_used
        opt = self._grid.opt_estimate if self._grid is not None else None
        if target_size is not None and len(coords) > target_size:
            prov_dim = self._prov_dim if self.provenance else None
            coords, colors, weights, pc, ps, extra = _coarsen_to_target(
                coords, colors, weights, pc, ps, self.d, prov_dim,
                self.k, self.epsilon, target_size, self.rng,
            )
            movement += extra
        return FairCoreset(
            coords, colors, weights, self.n_colors_seen, self.k, self.epsilon,
            movement, opt, pc, ps,
        )


def merge_coresets(a: FairCoreset, b: FairCoreset) -> FairCoreset:
    """Union of two coresets built with matching parameters.

    Summaries concatenate (consolidating exact co-located same-color
    points) and movement budgets add; the union is a coreset of the
    union of the sources by composability.
    """
    if a.n_points == 0:
        return b
    if b.n_points == 0:
        return a
    if a.k != b.k or a.epsilon != b.epsilon:
        raise ValueError("coresets were built with different (k, epsilon)")
    if a.d != b.d or a.n_colors != b.n_colors:
        raise ValueError("coresets disagree on dimension or color count")
    has_prov = a.prov_count is not None and b.prov_count is not None
    cons = _Consolidator(a.d, a.prov_sum.shape[1] if has_prov else None)
    for S in (a, b):
        for i in range(S.n_points):
            cons.add(
                S.coords[i],
                S.colors[i],
                S.weights[i],
                S.prov_count[i] if has_prov else 0,
                S.prov_sum[i] if has_prov else None,
            )
    coords, colors, weights, pc, ps = cons.arrays()
    return FairCoreset(
        coords, colors, weights, a.n_colors, a.k, a.epsilon,
        a.movement_budget_used + b.movement_budget_used, None, pc, ps,
    )


def recompress(S: FairCoreset, k: int, epsilon: float, seed: int = 0) -> FairCoreset:
    """Re-run the construction on a summary (merge-and-reduce support).

    Movement budgets accumulate; the (1 +/- eps) guarantees compose
    multiplicatively across levels, so callers doing merge-and-reduce
    should rescale epsilon per level.
    """
    _check_epsilon(epsilon)
    if S.n_points == 0:
        return S
    out = build_fair_coreset(
        S.to_dataset(),
        k,
        epsilon,
        seed=seed,
        provenance=S.prov_count is not None,
        prov_count=S.prov_count,
        prov_sum=S.prov_sum,
    )
    out.movement_budget_used += S.movement_budget_used
    return out


def demand_cost_table(coords, weights, centers) -> dict[tuple[int, ...], float]:
    """Min transport cost onto the centers for every exact demand vector.

    Enumerates all ways to split the points' total weight over the k
    centers; weight may split across centers (the transport relaxation),
    which matches treating a weight-w point as w unit points.
    """
    centers = check_centers(centers)
    k = centers.shape[0]
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim == 1:
        coords = coords[:, None]
    total = int(np.sum(weights)) if len(weights) else 0
    if coords.shape[0] == 0:
        return {tuple([0] * k): 0.0}
    weights = np.asarray(weights, dtype=np.int64)
    dists = pairwise_sq_dists(coords, centers)
    out: dict[tuple[int, ...], float] = {}
    for comp in iter_compositions(total, k):
        demands = np.array(comp, dtype=np.int64)
        active = np.flatnonzero(demands > 0)
        if len(active) == 0:
            continue
        flow = solve_transport(TransportProblem(dists[:, active], weights, demands[active]))
        out[comp] = flow.total_cost
    return out


@dataclass
class CoresetVerification:
    """Outcome of a Def-style (1 +/- eps) sandwich check."""

    epsilon: float
    n_center_sets: int
    n_constraints_checked: int
    max_over: float
    max_under: float
    n_violations: int
    color_weights_match: bool

    @property
    def passed(self) -> bool:
        return self.color_weights_match and self.n_violations == 0

    @property
    def max_relative_deviation(self) -> float:
        return max(self.max_over, self.max_under)


def sample_center_sets(dataset: Dataset, k: int, trials: int, rng) -> list[np.ndarray]:
    """Half random-in-box center sets, half adversarial near input points."""
    lo = dataset.coords.min(axis=0)
    hi = dataset.coords.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    out = []
    for t in range(trials):
        if t % 2 == 0:
            C = rng.uniform(lo - 0.25 * span, hi + 0.25 * span, size=(k, dataset.d))
        else:
            idx = rng.choice(dataset.n, size=k, replace=dataset.n < k)
            C = dataset.coords[idx] + rng.normal(scale=0.02 * span, size=(k, dataset.d))
        out.append(C)
    return out


def verify_coreset(
    dataset: Dataset,
    S: FairCoreset,
    epsilon: float | None = None,
    n_center_trials: int = 20,
    seed: int = 0,
    max_weight: int = VERIFY_MAX_WEIGHT,
    max_k: int = VERIFY_MAX_K,
) -> CoresetVerification:
    """Check the (1 +/- eps) sandwich over every constraint, sampled centers.

    For each sampled center set, per-color cost tables over all demand
    vectors are combined into every coloring constraint K; the summary's
    constrained cost must stay within (1 +/- eps) of the input's.
    Enumeration guard: total weight <= 20, k <= 3.
    """
    k = S.k
    if dataset.total_weight > max_weight or k > max_k:
        raise SizeGuardError(
            f"verification guard exceeded: weight {dataset.total_weight} > {max_weight} "
            f"or k {k} > {max_k}"
        )
    if epsilon is None:
        epsilon = S.epsilon
    rng = as_rng(seed)

    if not np.array_equal(dataset.color_weights(), S.color_weights()):
        return CoresetVerification(epsilon, 0, 0, np.inf, np.inf, 1, False)

    centers_list = sample_center_sets(dataset, k, n_center_trials, rng)
    max_over = 0.0
    max_under = 0.0
    violations = 0
    n_constraints = 0
    sds = S.to_dataset()
    for C in centers_list:
        tables_P = []
        tables_S = []
        for j in range(1, dataset.n_colors + 1):
            mask_p = dataset.colors == j
            tables_P.append(
                demand_cost_table(dataset.coords[mask_p], dataset.weights[mask_p], C)
            )
            mask_s = sds.colors == j
            tables_S.append(demand_cost_table(sds.coords[mask_s], sds.weights[mask_s], C))
        scale = max(
            [1.0]
            + [v for t in tables_P for v in t.values()]
            + [v for t in tables_S for v in t.values()]
        )
        abs_slack = 1e-9 * scale
        keys = [sorted(t.keys()) for t in tables_P]
        for combo in product(*keys):
            den = sum(tables_P[j][q] for j, q in enumerate(combo))
            num = sum(tables_S[j][q] for j, q in enumerate(combo))
            n_constraints += 1
            if num > den * (1 + epsilon) + abs_slack:
                violations += 1
                max_over = max(max_over, num / den - 1.0 if den > 0 else np.inf)
            elif num < den * (1 - epsilon) - abs_slack:
                violations += 1
                max_under = max(max_under, 1.0 - num / den)
            elif den > 0:
                max_over = max(max_over, num / den - 1.0)
                max_under = max(max_under, 1.0 - num / den)
    return CoresetVerification(
        epsilon, len(centers_list), n_constraints, max_over, max_under, violations, True
    )


CORESET_FORMAT = "fair-coreset"
CORESET_VERSION = 1


def coreset_to_record(S: FairCoreset, extra: dict | None = None) -> dict:
    rec = {
        "format": CORESET_FORMAT,
        "version": CORESET_VERSION,
        "d": S.d,
        "n_colors": S.n_colors,
        "k": S.k,
        "epsilon": S.epsilon,
        "movement_budget_used": S.movement_budget_used,
        "opt_estimate": S.opt_estimate,
        "has_provenance": S.prov_count is not None,
        "points": [
            {
                "coords": [float(x) for x in S.coords[i]],
                "color": int(S.colors[i]),
                "weight": int(S.weights[i]),
                **(
                    {
                        "prov_count": int(S.prov_count[i]),
                        "prov_sum": [float(x) for x in S.prov_sum[i]],
                    }
                    if S.prov_count is not None
                    else {}
                ),
            }
            for i in range(S.n_points)
        ],
    }
    if extra:
        rec.update(extra)
    return rec


def coreset_from_record(rec: dict) -> FairCoreset:
    if rec.get("format") != CORESET_FORMAT:
        raise ValueError(f"not a coreset record: format={rec.get('format')!r}")
    if rec.get("version") != CORESET_VERSION:
        raise ValueError(f"unsupported coreset record version {rec.get('version')!r}")
    pts = rec["points"]
    d = int(rec["d"])
    coords = np.array([p["coords"] for p in pts], dtype=np.float64).reshape(len(pts), d)
    colors = np.array([p["color"] for p in pts], dtype=np.int64)
    weights = np.array([p["weight"] for p in pts], dtype=np.int64)
    if rec.get("has_provenance"):
        pc = np.array([p["prov_count"] for p in pts], dtype=np.int64)
        ps = np.array([p["prov_sum"] for p in pts], dtype=np.float64)
        ps = ps.reshape(len(pts), -1)
    else:
        pc = ps = None
    opt = rec.get("opt_estimate")
    return FairCoreset(
        coords,
        colors,
        weights,
        int(rec["n_colors"]),
        int(rec["k"]),
        float(rec["epsilon"]),
        float(rec["movement_budget_used"]),
        None if opt is None else float(opt),
        pc,
        ps,
    )


def save_coreset(S: FairCoreset, path) -> None:
    """Write the versioned textual record; floats round-trip bit-exactly."""
    with open(path, "w") as fh:
        json.dump(coreset_to_record(S), fh)
        fh.write("\n")


def load_coreset(path) -> FairCoreset:
    with open(path) as fh:
        return coreset_from_record(json.load(fh))
