"""The fair k-means solver family.

Covers colorless building blocks (k-means++ seeding, weighted Lloyd) and
the fair solvers built on fairlets and fair assignment:

* ``cklv_kmeanspp``: cluster fairlet representatives with k-means++, then
  send both points of every fairlet to their representative's center;
* ``reassigned_cklv``: same centers, but re-assign the original points
  optimally and fairly;
* ``fair_kmeanspp``: fair Lloyd -- alternate optimal fair assignment with
  centroid updates, seeded on the fairlet representatives;
* ``ptas``: enumerate candidate centroid sets from small multisets and
  keep the best fair assignment;
* ``brute_force_opt``: exact optimum by exhaustive partition enumeration
  (tiny instances only; the test oracle everything else is measured
  against).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

import numpy as np

from .assignment import fair_assignment
from .core import (
    CenterSet,
    Dataset,
    FairClustering,
    color_fraction,
    nearest_center,
)
from .errors import SizeGuardError
from .fairlets import compute_fairlets
from .solver_utils import as_rng, weighted_centroids
from .validation import check_centers, check_coords, check_weights

BRUTE_FORCE_MAX_WEIGHT = 14
BRUTE_FORCE_MAX_K = 3
PTAS_MAX_WEIGHT = 14
PTAS_MAX_K = 2


@dataclass
class SolverConfig:
    """Iteration budget and seeding of the Lloyd-style solvers."""

    k: int
    max_iter: int = 100
    tol: float = 1e-6
    seed: int | None = None
    stop_on_improvement: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


class PhaseTimer:
    """Accumulates wall-clock seconds per named solver phase."""

    def __init__(self):
        self.seconds: dict[str, float] = {}

    def add(self, phase: str, dt: float) -> None:
        self.seconds[phase] = self.seconds.get(phase, 0.0) + dt


def _tick(timer: PhaseTimer | None, phase: str, t0: float) -> float:
    now = time.perf_counter()
    if timer is not None:
        timer.add(phase, now - t0)
    return now


def kmeanspp_seed(coords, weights, k: int, rng=None) -> CenterSet:
    """k-means++ (D^2) seeding over a weighted point set.

    The first center is drawn weight-proportionally; every further
    center is drawn with probability proportional to w(q) * min_c
    ||q - c||^2. When no positive mass remains (fewer distinct points
    than k), duplicate centers are drawn and flagged.
    """
    coords = check_coords(coords)
    n = coords.shape[0]
    w = check_weights(weights, n).astype(np.float64)
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = as_rng(rng)

    probs = w / w.sum()
    first = int(rng.choice(n, p=probs))
    chosen = [first]
    diff = coords - coords[first]
    mind = (diff * diff).sum(axis=1)
    has_duplicates = False
    for _ in range(1, k):
        mass = w * mind
        total = mass.sum()
        if total <= 0.0:
            idx = int(rng.choice(n, p=probs))
            has_duplicates = True
        else:
            idx = int(rng.choice(n, p=mass / total))
        chosen.append(idx)
        diff = coords - coords[idx]
        np.minimum(mind, (diff * diff).sum(axis=1), out=mind)
    return CenterSet(coords[np.array(chosen)], has_duplicates)


def lloyd(
    coords,
    weights,
    init,
    config: SolverConfig,
    rng=None,
    trace: list | None = None,
) -> tuple[CenterSet, float, int]:
    """Weighted Lloyd iterations from the given initial centers.

    Alternates nearest-center assignment with centroid updates until the
    iteration cap or until the relative cost improvement drops below
    config.tol. A cluster that loses all weight is re-seeded by a D^2
    draw against the current centers. Returns (centers, cost, iterations)
    with the cost evaluated at the returned centers.
    """
    coords = check_coords(coords)
    n = coords.shape[0]
    w = check_weights(weights, n)
    centers = init.centers if isinstance(init, CenterSet) else check_centers(init, coords.shape[1])
    if centers.shape[0] != config.k:
        raise ValueError(f"init has {centers.shape[0]} centers, config.k = {config.k}")
    rng = as_rng(rng if rng is not None else config.seed)

    prev = np.inf
    iterations = 0
    for _ in range(config.max_iter):
        iterations += 1
        dmin, labels = nearest_center(coords, centers)
        cost = float(np.sum(dmin * w))
        if trace is not None:
            trace.append(cost)
        if (
            config.stop_on_improvement
            and np.isfinite(prev)
            and prev - cost <= config.tol * max(prev, 1e-300)
        ):
            break
        prev = cost
        new_centers = weighted_centroids(coords, w, labels, config.k)
        for c in np.flatnonzero(np.isnan(new_centers[:, 0])):
            mass = dmin * w
            total = mass.sum()
            if total <= 0.0:
                new_centers[c] = centers[c]
            else:
                new_centers[c] = coords[int(rng.choice(n, p=mass / total))]
        if np.array_equal(new_centers, centers):
            break
        centers = new_centers

    dmin, _ = nearest_center(coords, centers)
    return CenterSet(centers), float(np.sum(dmin * w)), iterations


def _fairlet_clustering(dataset: Dataset, decomposition, centers, rep_labels) -> FairClustering:
    """Send both endpoints of every fairlet to its representative's center."""
    m = decomposition.size
    pidx = np.empty(2 * m, dtype=np.int64)
    cidx = np.empty(2 * m, dtype=np.int64)
    sub = np.empty(2 * m, dtype=np.int64)
    for t, f in enumerate(decomposition.fairlets):
        c = int(rep_labels[t])
        pidx[2 * t] = f.red_index
        pidx[2 * t + 1] = f.blue_index
        cidx[2 * t] = c
        cidx[2 * t + 1] = c
        sub[2 * t] = f.weight
        sub[2 * t + 1] = f.weight
    diffs = dataset.coords[pidx] - centers[cidx]
    cost = float(np.sum((diffs * diffs).sum(axis=1) * sub))
    return FairClustering(centers, pidx, cidx, sub, cost=cost)


def cklv_kmeanspp(dataset: Dataset, config: SolverConfig, timer: PhaseTimer | None = None) -> FairClustering:
    """Fairlet decomposition, k-means++ on representatives, pairwise assignment."""
    rng = as_rng(config.seed)
    t0 = time.perf_counter()
    dec = compute_fairlets(dataset)
    t0 = _tick(timer, "fairlets", t0)
    init = kmeanspp_seed(dec.rep_coords, dec.rep_weights, config.k, rng)
    centers, _, _ = lloyd(dec.rep_coords, dec.rep_weights, init, config, rng)
    t0 = _tick(timer, "solve", t0)
    _, rep_labels = nearest_center(dec.rep_coords, centers.centers)
    clustering = _fairlet_clustering(dataset, dec, centers.centers, rep_labels)
    _tick(timer, "assignment", t0)
    return clustering


def reassigned_cklv(dataset: Dataset, config: SolverConfig, timer: PhaseTimer | None = None) -> FairClustering:
    """CKLV centers, then an optimal fair re-assignment of the original points."""
    coarse = cklv_kmeanspp(dataset, config, timer)
    t0 = time.perf_counter()
    clustering = fair_assignment(dataset, coarse.centers)
    _tick(timer, "assignment", t0)
    return clustering


def fair_kmeanspp(
    dataset: Dataset,
    config: SolverConfig,
    init: CenterSet | None = None,
    timer: PhaseTimer | None = None,
    trace: list | None = None,
) -> FairClustering:
    """Fair Lloyd: alternate optimal fair assignment and centroid updates.

    Seeded by the k-means++ seeding phase on fairlet representatives
    (seeding only, no Lloyd refinement there). The cost sequence is
    non-increasing; a center left unused by the fair assignment is
    re-seeded by a D^2 draw, which cannot raise the cost of the current
    assignment.
    """
    rng = as_rng(config.seed)
    if init is None:
        t0 = time.perf_counter()
        dec = compute_fairlets(dataset)
        t0 = _tick(timer, "fairlets", t0)
        init = kmeanspp_seed(dec.rep_coords, dec.rep_weights, config.k, rng)
        _tick(timer, "solve", t0)
    centers = init.centers

    prev = np.inf
    clustering = None
    for _ in range(config.max_iter):
        t0 = time.perf_counter()
        clustering = fair_assignment(dataset, centers)
        t0 = _tick(timer, "assignment", t0)
        cost = clustering.cost
        if trace is not None:
            trace.append(cost)
        if (
            config.stop_on_improvement
            and np.isfinite(prev)
            and prev - cost <= config.tol * max(prev, 1e-300)
        ):
            break
        prev = cost

        sums = np.zeros((config.k, dataset.d), dtype=np.float64)
        wtot = np.zeros(config.k, dtype=np.float64)
        np.add.at(
            sums,
            clustering.center_idx,
            dataset.coords[clustering.point_idx] * clustering.subweights[:, None],
        )
        np.add.at(wtot, clustering.center_idx, clustering.subweights.astype(np.float64))
        new_centers = centers.copy()
        used = wtot > 0
        new_centers[used] = sums[used] / wtot[used][:, None]
        for c in np.flatnonzero(~used):
            dmin, _ = nearest_center(dataset.coords, new_centers)
            mass = dmin * dataset.weights
            total = mass.sum()
            if total > 0.0:
                new_centers[c] = dataset.coords[int(rng.choice(dataset.n, p=mass / total))]
        if np.array_equal(new_centers, centers):
            break
        centers = new_centers
        _tick(timer, "solve", t0)
    return clustering


def _refine(dataset: Dataset, clustering: FairClustering, k: int, max_iter: int = 100) -> FairClustering:
    """Polish a fair clustering by alternating centroids and fair assignment."""
    best = clustering
    centers = clustering.centers
    for _ in range(max_iter):
        sums = np.zeros((centers.shape[0], dataset.d), dtype=np.float64)
        wtot = np.zeros(centers.shape[0], dtype=np.float64)
        np.add.at(sums, best.center_idx, dataset.coords[best.point_idx] * best.subweights[:, None])
        np.add.at(wtot, best.center_idx, best.subweights.astype(np.float64))
        used = wtot > 0
        new_centers = centers.copy()
        new_centers[used] = sums[used] / wtot[used][:, None]
        candidate = fair_assignment(dataset, new_centers)
        if candidate.cost >= best.cost - 1e-12 * max(best.cost, 1.0):
            break
        best = candidate
        centers = new_centers
    return best


def ptas(
    dataset: Dataset,
    k: int,
    epsilon: float,
    mode: str = "auto",
    samples: int = 200,
    rng=None,
    max_weight: int = PTAS_MAX_WEIGHT,
    max_k: int = PTAS_MAX_K,
) -> FairClustering:
    """(1+epsilon)-approximate fair k-means by candidate centroid enumeration.

    Every multiset of k * ceil(2/epsilon) points (repetition allowed),
    partitioned into k groups, proposes the group centroids as centers;
    the best fair assignment wins and is then centroid-polished. In
    exhaustive mode (guarded to tiny instances) this enumerates all
    candidates and inherits the (1+epsilon) guarantee; otherwise
    candidates are sampled.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    m = int(np.ceil(2.0 / epsilon))
    exhaustive_ok = dataset.total_weight <= max_weight and k <= max_k and m <= 2
    if mode == "exhaustive" and not exhaustive_ok:
        raise SizeGuardError(
            f"ptas exhaustive mode guard exceeded: weight {dataset.total_weight} <= "
            f"{max_weight}, k {k} <= {max_k}, ceil(2/eps) {m} <= 2 required"
        )
    if mode not in ("auto", "exhaustive", "sampling"):
        raise ValueError(f"unknown ptas mode {mode!r}")
    exhaustive = mode == "exhaustive" or (mode == "auto" and exhaustive_ok)
    rng = as_rng(rng)

    best: FairClustering | None = None
    seen: set[bytes] = set()

    def consider(groups: list[np.ndarray]):
        nonlocal best
        centers = np.stack(
            [dataset.coords[g].mean(axis=0) for g in groups]
        )
        key = np.round(np.sort(centers.ravel(), kind="stable"), 12).tobytes()
        if key in seen:
            return
        seen.add(key)
        candidate = fair_assignment(dataset, centers)
        if best is None or candidate.cost < best.cost:
            best = candidate

    size = k * m
    if exhaustive:
        for multiset in combinations_with_replacement(range(dataset.n), size):
            for groups in _equal_partitions(multiset, k, m):
                consider([np.array(g) for g in groups])
    else:
        probs = dataset.weights / dataset.weights.sum()
        for _ in range(samples):
            draw = rng.choice(dataset.n, size=size, replace=True, p=probs)
            rng.shuffle(draw)
            consider([draw[i * m : (i + 1) * m] for i in range(k)])

    assert best is not None
    return _refine(dataset, best, k)


def _equal_partitions(items: tuple, k: int, size: int):
    """Unordered partitions of a multiset tuple into k groups of equal size."""
    items = tuple(sorted(items))
    if k == 1:
        yield (items,)
        return
    first = items[0]
    rest = items[1:]
    seen = set()
    for idx in combinations(range(len(rest)), size - 1):
        group = (first,) + tuple(rest[i] for i in idx)
        remaining = list(rest)
        for i in sorted(idx, reverse=True):
            remaining.pop(i)
        key = (group, tuple(remaining))
        if key in seen:
            continue
        seen.add(key)
        for sub in _equal_partitions(tuple(remaining), k - 1, size):
            yield (group,) + sub


def brute_force_opt(
    dataset: Dataset,
    k: int,
    alpha=1,
    beta=1,
    max_weight: int = BRUTE_FORCE_MAX_WEIGHT,
    max_k: int = BRUTE_FORCE_MAX_K,
) -> FairClustering:
    """Exact optimal fair clustering by exhaustive partition enumeration.

    Unit-expands the weights and enumerates partitions into at most k
    clusters (restricted-growth labeling kills permutation symmetry;
    partial-cost pruning kills hopeless branches). A partition is kept
    when every nonempty cluster satisfies the (alpha, beta) fairness
    bounds; its cost is the exact centroid cost. This is the oracle the
    approximation algorithms are tested against.
    """
    if dataset.total_weight > max_weight or k > max_k:
        raise SizeGuardError(
            f"brute force guard exceeded: weight {dataset.total_weight} > {max_weight} "
            f"or k {k} > {max_k}"
        )
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    xis = [color_fraction(dataset, j) for j in range(1, dataset.n_colors + 1)]

    unit_owner = np.repeat(np.arange(dataset.n), dataset.weights)
    pts = dataset.coords[unit_owner]
    cols = dataset.colors[unit_owner]
    T, d = pts.shape
    sq = (pts * pts).sum(axis=1)

    sums = np.zeros((k, d))
    sqsums = np.zeros(k)
    counts = np.zeros(k, dtype=np.int64)
    color_counts = np.zeros((k, dataset.n_colors), dtype=np.int64)
    labels = np.zeros(T, dtype=np.int64)
    best = {"cost": np.inf, "labels": None}

    def cluster_cost(c: int) -> float:
        if counts[c] == 0:
            return 0.0
        return sqsums[c] - float(sums[c] @ sums[c]) / counts[c]

    def fair_ok() -> bool:
        for c in range(k):
            total = int(counts[c])
            if total == 0:
                continue
            for j in range(dataset.n_colors):
                frac = Fraction(int(color_counts[c, j]), total)
                if not (alpha * xis[j] <= frac <= beta * xis[j]):
                    return False
        return True

    def recurse(i: int, used: int, partial: float):
        if partial >= best["cost"]:
            return
        if i == T:
            if fair_ok() and partial < best["cost"]:
                best["cost"] = partial
                best["labels"] = labels.copy()
            return
        limit = min(used + 1, k)
        for c in range(limit):
            old = cluster_cost(c)
            sums[c] += pts[i]
            sqsums[c] += sq[i]
            counts[c] += 1
            color_counts[c, cols[i] - 1] += 1
            labels[i] = c
            recurse(i + 1, max(used, c + 1), partial - old + cluster_cost(c))
            sums[c] -= pts[i]
            sqsums[c] -= sq[i]
            counts[c] -= 1
            color_counts[c, cols[i] - 1] -= 1

    recurse(0, 0, 0.0)
    assert best["labels"] is not None, "no fair partition exists"

    lab = best["labels"]
    used_ids = sorted(set(int(x) for x in lab))
    remap = {c: i for i, c in enumerate(used_ids)}
    centers = np.stack([pts[lab == c].mean(axis=0) for c in used_ids])
    arc_w: dict[tuple[int, int], int] = {}
    for u in range(T):
        key = (int(unit_owner[u]), remap[int(lab[u])])
        arc_w[key] = arc_w.get(key, 0) + 1
    pidx = np.array([p for p, _ in arc_w], dtype=np.int64)
    cidx = np.array([c for _, c in arc_w], dtype=np.int64)
    sub = np.array(list(arc_w.values()), dtype=np.int64)
    diffs = dataset.coords[pidx] - centers[cidx]
    cost = float(np.sum((diffs * diffs).sum(axis=1) * sub))
    return FairClustering(centers, pidx, cidx, sub, cost=cost)
