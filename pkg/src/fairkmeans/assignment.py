"""Optimal fair assignment to fixed centers and color-constrained costs.

A coloring constraint is a k x ell nonnegative integer matrix K telling
each center how much weight of each color it must receive. Because K
pins the per-color demands, the colors decouple and the constrained cost
is a sum of independent transport problems, one per color. Fairness
(every cluster balanced) is equivalent to a collection of such
constraints, which is what makes constraint enumeration a usable oracle
on tiny instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .core import Dataset, FairClustering, color_fraction, pairwise_sq_dists
from .errors import BalanceError, SizeGuardError
from .fairlets import split_two_colors
from .transport import TransportProblem, solve_transport
from .validation import check_centers

COVER_MAX_WEIGHT = 16
COVER_MAX_K = 3


@dataclass(frozen=True)
class ColoringConstraint:
    """k x ell matrix prescribing per-center per-color weight."""

    K: np.ndarray

    def __post_init__(self):
        K = np.asarray(self.K, dtype=np.int64)
        if K.ndim != 2:
            raise ValueError("constraint matrix must be 2-D")
        if K.min(initial=0) < 0:
            raise ValueError("constraint entries must be nonnegative")
        object.__setattr__(self, "K", K)

    @property
    def k(self) -> int:
        return self.K.shape[0]

    @property
    def n_colors(self) -> int:
        return self.K.shape[1]

    def column_sums(self) -> np.ndarray:
        return self.K.sum(axis=0)

    def is_feasible_for(self, dataset: Dataset) -> bool:
        return bool(np.array_equal(self.column_sums(), dataset.color_weights()))


@dataclass
class ConstrainedCost:
    """Result of a color-constrained assignment; infeasible K yields no cost."""

    feasible: bool
    cost: float | None
    clustering: FairClustering | None

    def value(self) -> float:
        if not self.feasible:
            raise BalanceError("constraint is infeasible for this dataset")
        return float(self.cost)


def color_constrained_cost(dataset: Dataset, constraint: ColoringConstraint, centers) -> ConstrainedCost:
    """Minimum assignment cost meeting the constraint exactly.

    Solved as one transport per color: the color's points supply their
    weights and each center demands its K entry. Returns an infeasible
    marker when any column sum mismatches that color's total weight.
    """
    centers = check_centers(centers, dataset.d)
    k = centers.shape[0]
    if constraint.k != k:
        raise ValueError(f"constraint has {constraint.k} rows, centers have {k}")
    if constraint.n_colors != dataset.n_colors:
        raise ValueError(
            f"constraint has {constraint.n_colors} colors, dataset has {dataset.n_colors}"
        )
    if not constraint.is_feasible_for(dataset):
        return ConstrainedCost(False, None, None)

    all_pidx, all_cidx, all_sub = [], [], []
    total = 0.0
    for j in range(1, dataset.n_colors + 1):
        pts = np.flatnonzero(dataset.colors == j)
        demands = constraint.K[:, j - 1]
        active = np.flatnonzero(demands > 0)
        if len(active) == 0:
            continue  # color absent (column sum 0 matched an empty color)
        costs = pairwise_sq_dists(dataset.coords[pts], centers[active])
        problem = TransportProblem(costs, dataset.weights[pts], demands[active])
        flow = solve_transport(problem)
        total += flow.total_cost
        all_pidx.append(pts[flow.src])
        all_cidx.append(active[flow.dst])
        all_sub.append(flow.amount)

    if all_pidx:
        clustering = FairClustering(
            centers,
            np.concatenate(all_pidx),
            np.concatenate(all_cidx),
            np.concatenate(all_sub),
            cost=total,
        )
    else:
        clustering = FairClustering(centers, [], [], [], cost=0.0)
    return ConstrainedCost(True, total, clustering)


def pair_cost_tables(dataset: Dataset, centers) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per red/blue pair: cheapest common center and its summed cost.

    Returns (red_idx, blue_idx, pair_cost, pair_center) where pair_cost[b, r]
    = min_c ||r-c||^2 + ||b-c||^2 and pair_center breaks ties toward the
    lower center index.
    """
    red, blue = split_two_colors(dataset)
    centers = check_centers(centers, dataset.d)
    dr = pairwise_sq_dists(dataset.coords[red], centers)
    db = pairwise_sq_dists(dataset.coords[blue], centers)
    k = centers.shape[0]
    best = db[:, 0][:, None] + dr[:, 0][None, :]
    argbest = np.zeros(best.shape, dtype=np.int64)
    for c in range(1, k):
        cand = db[:, c][:, None] + dr[:, c][None, :]
        better = cand < best
        best = np.where(better, cand, best)
        argbest[better] = c
    return red, blue, best, argbest


def fair_assignment(dataset: Dataset, centers) -> FairClustering:
    """Cost-optimal exactly balanced assignment of a two-color dataset.

    Matches red and blue weight through common centers: a transport over
    pair costs min_c ||r-c||^2 + ||b-c||^2, after which each matched
    triple lands on its own cheapest center.
    """
    red, blue, pair_cost, pair_center = pair_cost_tables(dataset, centers)
    problem = TransportProblem(pair_cost, dataset.weights[blue], dataset.weights[red])
    flow = solve_transport(problem)

    n_arcs = len(flow.src)
    pidx = np.empty(2 * n_arcs, dtype=np.int64)
    cidx = np.empty(2 * n_arcs, dtype=np.int64)
    sub = np.empty(2 * n_arcs, dtype=np.int64)
    centers_arr = check_centers(centers, dataset.d)
    total = 0.0
    dr = pairwise_sq_dists(dataset.coords[red], centers_arr)
    db = pairwise_sq_dists(dataset.coords[blue], centers_arr)
    for t in range(n_arcs):
        b, r, w = flow.src[t], flow.dst[t], int(flow.amount[t])
        c = int(pair_center[b, r])
        pidx[2 * t] = red[r]
        pidx[2 * t + 1] = blue[b]
        cidx[2 * t] = c
        cidx[2 * t + 1] = c
        sub[2 * t] = w
        sub[2 * t + 1] = w
        total += w * (dr[r, c] + db[b, c])
    return FairClustering(centers_arr, pidx, cidx, sub, cost=float(total))


def iter_compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in iter_compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_coloring_constraints(color_weights, k: int) -> Iterator[ColoringConstraint]:
    """All k x ell constraint matrices whose columns sum to the color weights."""
    color_weights = [int(w) for w in color_weights]
    pools = [list(iter_compositions(w, k)) for w in color_weights]
    for combo in product(*pools):
        K = np.array(combo, dtype=np.int64).T
        yield ColoringConstraint(K)


def fairness_constraints_cover(
    dataset: Dataset,
    k: int,
    alpha,
    beta,
    include_unused_centers: bool = True,
    max_weight: int = COVER_MAX_WEIGHT,
    max_k: int = COVER_MAX_K,
) -> Iterator[ColoringConstraint]:
    """The coloring constraints whose realizations are (alpha, beta)-fair.

    Yields exactly the column-feasible matrices whose nonzero rows
    satisfy alpha*xi(j) <= K_ij / row_sum <= beta*xi(j) for every color.
    Zero rows (centers receiving nothing) are treated as vacuously fair
    and included by default; pass include_unused_centers=False to drop
    them. Guarded to tiny instances because the enumeration is
    exponential in k and the weights.
    """
    if dataset.total_weight > max_weight or k > max_k:
        raise SizeGuardError(
            f"constraint enumeration guard exceeded: weight {dataset.total_weight} > "
            f"{max_weight} or k {k} > {max_k}"
        )
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    xis = [color_fraction(dataset, j) for j in range(1, dataset.n_colors + 1)]
    for constraint in enumerate_coloring_constraints(dataset.color_weights(), k):
        ok = True
        for i in range(k):
            row = constraint.K[i]
            row_total = int(row.sum())
            if row_total == 0:
                if include_unused_centers:
                    continue
                ok = False
                break
            for j in range(dataset.n_colors):
                frac = Fraction(int(row[j]), row_total)
                if not (alpha * xis[j] <= frac <= beta * xis[j]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield constraint
