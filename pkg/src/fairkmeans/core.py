"""Colored weighted point sets, k-means costs, and fairness predicates.

Conventions used throughout the package:

* points are rows of a float64 array, colors are integer labels in
  ``{1..n_colors}``, weights are positive integer multiplicities;
* fairness fractions are evaluated in exact rational arithmetic
  (``fractions.Fraction``) so threshold comparisons never suffer float
  rounding;
* a center that receives no weight imposes no fairness constraint (it is
  an unused center, not an empty cluster).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .validation import check_centers, check_colors, check_coords, check_weights


@dataclass(frozen=True)
class ColoredPoint:
    """A single d-dimensional point with a color label and integer weight."""

    coords: np.ndarray
    color: int
    weight: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=np.float64).ravel())
        if self.weight < 1:
            raise ValueError("point weight must be >= 1")
        if self.color < 1:
            raise ValueError("color label must be >= 1")


class Dataset:
    """A weighted, colored point set backed by numpy arrays.

    Attributes:
        coords: (n, d) float64 coordinates.
        colors: (n,) int64 labels in {1..n_colors}.
        weights: (n,) int64 positive multiplicities.
        n_colors: number of color classes (>= max label).
    """

    def __init__(self, coords, colors, weights=None, n_colors: int | None = None):
        self.coords = check_coords(X=coords)
        n = self.coords.shape[0]
        self.colors, self.n_colors = check_colors(colors, n, n_colors)
        self.weights = check_weights(weights, n)

    @classmethod
    def from_points(cls, points: Iterable[ColoredPoint], n_colors: int | None = None) -> "Dataset":
        pts = list(points)
        if not pts:
            raise ValueError("cannot build a dataset from zero points")
        coords = np.stack([p.coords for p in pts])
        return cls(coords, [p.color for p in pts], [p.weight for p in pts], n_colors)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    def points(self) -> list[ColoredPoint]:
        return [
            ColoredPoint(self.coords[i], int(self.colors[i]), int(self.weights[i]))
            for i in range(self.n)
        ]

    def color_weight(self, color: int) -> int:
        return int(self.weights[self.colors == color].sum())

    def color_weights(self) -> np.ndarray:
        """Total weight per color, index j-1 holds color j."""
        out = np.zeros(self.n_colors, dtype=np.int64)
        for j in range(1, self.n_colors + 1):
            out[j - 1] = self.color_weight(j)
        return out

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices)
        return Dataset(self.coords[idx], self.colors[idx], self.weights[idx], self.n_colors)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return (
            f"Dataset(n={self.n}, d={self.d}, n_colors={self.n_colors}, "
            f"total_weight={self.total_weight})"
        )


@dataclass(frozen=True)
class CenterSet:
    """An ordered set of k cluster centers."""

    centers: np.ndarray
    has_duplicates: bool = False

    def __post_init__(self):
        object.__setattr__(self, "centers", check_centers(self.centers))

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def d(self) -> int:
        return self.centers.shape[1]


@dataclass
class FairClustering:
    """Centers plus a (possibly weight-splitting) assignment of a dataset.

    The assignment is a sparse arc list: entry ``t`` assigns
    ``subweights[t]`` units of point ``point_idx[t]`` to center
    ``center_idx[t]``. Sub-weights are positive integers and sum to each
    point's weight.
    """

    centers: np.ndarray
    point_idx: np.ndarray
    center_idx: np.ndarray
    subweights: np.ndarray
    cost: float = field(default=0.0)

    def __post_init__(self):
        self.centers = check_centers(self.centers)
        self.point_idx = np.asarray(self.point_idx, dtype=np.int64)
        self.center_idx = np.asarray(self.center_idx, dtype=np.int64)
        self.subweights = np.asarray(self.subweights, dtype=np.int64)
        if not (len(self.point_idx) == len(self.center_idx) == len(self.subweights)):
            raise ValueError("assignment arc arrays must have equal length")
        if len(self.subweights) and self.subweights.min() < 1:
            raise ValueError("assignment sub-weights must be positive integers")

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def validate_against(self, dataset: Dataset) -> None:
        """Check the assignment covers every point's weight exactly."""
        if len(self.center_idx) and (
            self.center_idx.min() < 0 or self.center_idx.max() >= self.k
        ):
            raise ValueError("assignment references an out-of-range center")
        covered = np.zeros(dataset.n, dtype=np.int64)
        np.add.at(covered, self.point_idx, self.subweights)
        if not np.array_equal(covered, dataset.weights):
            raise ValueError("assignment does not cover each point's weight exactly")

    def color_counts(self, dataset: Dataset) -> np.ndarray:
        """(k, n_colors) matrix of assigned weight per cluster and color."""
        counts = np.zeros((self.k, dataset.n_colors), dtype=np.int64)
        cols = dataset.colors[self.point_idx] - 1
        np.add.at(counts, (self.center_idx, cols), self.subweights)
        return counts

    def labels(self, dataset: Dataset) -> np.ndarray:
        """One label per point: the center receiving most of its weight.

        Ties break toward the lower center index. Unit-weight points are
        never split, so for them this is exact.
        """
        best_w = np.full(dataset.n, -1, dtype=np.int64)
        lab = np.zeros(dataset.n, dtype=np.int64)
        order = np.lexsort((self.center_idx, -self.subweights))
        seen = np.zeros(dataset.n, dtype=bool)
        for t in order:
            p = self.point_idx[t]
            if not seen[p] or self.subweights[t] > best_w[p]:
                seen[p] = True
                best_w[p] = self.subweights[t]
                lab[p] = self.center_idx[t]
        return lab


class FairnessCheck(NamedTuple):
    ok: bool
    violation: tuple[int, int] | None  # (cluster index, color label)


def centroid(coords, weights=None) -> np.ndarray:
    """Weighted mean of a nonempty point list: (1/W) * sum w_p * p."""
    coords = check_coords(coords, name="points")
    w = check_weights(weights, coords.shape[0]).astype(np.float64)
    return (coords * w[:, None]).sum(axis=0) / w.sum()


def pairwise_sq_dists(A, B) -> np.ndarray:
    """All squared Euclidean distances between rows of A and rows of B."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return sq

def nearest_center(coords, centers) -> tuple[np.ndarray, np.ndarray]:
    """Per point: (squared distance to nearest center, nearest center index)."""
    sq = pairwise_sq_dists(coords, centers)
    idx = np.argmin(sq, axis=1)
    return sq[np.arange(sq.shape[0]), idx], idx


def kmeans_cost(dataset: Dataset, centers) -> float:
    """Weighted k-means cost: sum over points of w(p) * min_c ||p - c||^2."""
    centers = check_centers(centers, dataset.d)
    dmin, _ = nearest_center(dataset.coords, centers)
    return float(np.sum(dmin * dataset.weights))


def assignment_cost(dataset: Dataset, clustering: FairClustering) -> float:
    """Cost of a fixed assignment (not necessarily nearest-center)."""
    clustering.validate_against(dataset)
    diffs = dataset.coords[clustering.point_idx] - clustering.centers[clustering.center_idx]
    sq = (diffs * diffs).sum(axis=1)
    return float(np.sum(sq * clustering.subweights))


def color_fraction(dataset: Dataset, color: int) -> Fraction:
    """Exact fraction of the dataset's weight carried by one color."""
    if color < 1 or color > dataset.n_colors:
        raise ValueError(f"color {color} out of range 1..{dataset.n_colors}")
    total = dataset.total_weight
    if total == 0:
        raise ValueError("empty dataset has no color fractions")
    return Fraction(dataset.color_weight(color), total)


def check_fair(clustering: FairClustering, dataset: Dataset, alpha, beta) -> FairnessCheck:
    """Test the two-sided fairness inequalities in exact rational arithmetic.

    A clustering is (alpha, beta)-fair when, for every cluster receiving
    weight and every color j, the cluster's fraction of color j lies in
    [alpha * xi(j), beta * xi(j)] where xi(j) is the color's global
    fraction. Returns the first violating (cluster, color) if any.
    Centers receiving no weight are skipped.
    """
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if not (0 < alpha <= 1 <= beta):
        raise ValueError("need 0 < alpha <= 1 <= beta")
    counts = clustering.color_counts(dataset)
    xis = [color_fraction(dataset, j) for j in range(1, dataset.n_colors + 1)]
    for i in range(clustering.k):
        row_total = int(counts[i].sum())
        if row_total == 0:
            continue
        for j in range(dataset.n_colors):
            frac = Fraction(int(counts[i, j]), row_total)
            if not (alpha * xis[j] <= frac <= beta * xis[j]):
                return FairnessCheck(False, (i, j + 1))
    return FairnessCheck(True, None)


def balance(red: int, blue: int) -> Fraction:
    """min(r/b, b/r) of a two-color count pair; 0 when either count is 0."""
    if red < 0 or blue < 0:
        raise ValueError("counts must be nonnegative")
    if red == 0 or blue == 0:
        return Fraction(0)
    return min(Fraction(red, blue), Fraction(blue, red))
