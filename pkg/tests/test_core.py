from fractions import Fraction

import numpy as np
import pytest

from fairkmeans import (
    CenterSet,
    ColoredPoint,
    Dataset,
    FairClustering,
    assignment_cost,
    balance,
    centroid,
    check_fair,
    color_fraction,
    kmeans_cost,
)
from fairkmeans.core import nearest_center, pairwise_sq_dists


def make_dataset(points):
    """points: list of (coords, color, weight)."""
    return Dataset(
        [p[0] for p in points],
        [p[1] for p in points],
        [p[2] for p in points],
    )


class TestCentroid:
    def test_symmetric_pair(self):
        assert np.allclose(centroid([(0, 0), (2, 0)]), (1, 0))

    def test_weighted_mean(self):
        c = centroid([(0, 0), (4, 0)], [3, 1])
        assert np.allclose(c, (1, 0))

    def test_single_point_identity(self):
        assert np.allclose(centroid([(5, 7)], [2]), (5, 7))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            centroid(np.empty((0, 2)))


class TestKmeansCost:
    def test_two_unit_distances(self):
        ds = make_dataset([((0, 0), 1, 1), ((2, 0), 1, 1)])
        assert kmeans_cost(ds, [(1, 0)]) == pytest.approx(2.0)

    def test_centers_on_points(self):
        ds = make_dataset([((0, 0), 1, 1), ((2, 0), 1, 1)])
        assert kmeans_cost(ds, [(0, 0), (2, 0)]) == 0.0

    def test_weighted(self):
        ds = make_dataset([((0, 0), 1, 2), ((3, 0), 1, 1)])
        assert kmeans_cost(ds, [(0, 0)]) == pytest.approx(9.0)

    def test_empty_centers_rejected(self):
        ds = make_dataset([((0, 0), 1, 1)])
        with pytest.raises(ValueError):
            kmeans_cost(ds, np.empty((0, 2)))


class TestAssignmentCost:
    def test_nearest_assignment_matches_kmeans_cost(self):
        rng = np.random.default_rng(0)
        coords = rng.normal(size=(12, 3))
        ds = Dataset(coords, np.ones(12, dtype=int))
        centers = rng.normal(size=(3, 3))
        _, lab = nearest_center(coords, centers)
        clus = FairClustering(centers, np.arange(12), lab, np.ones(12, dtype=int))
        assert assignment_cost(ds, clus) == pytest.approx(kmeans_cost(ds, centers))

    def test_crossed_assignment(self):
        ds = make_dataset([((0, 0), 1, 1), ((2, 0), 1, 1)])
        centers = np.array([(0.0, 0.0), (2.0, 0.0)])
        clus = FairClustering(centers, [0, 1], [1, 0], [1, 1])
        assert assignment_cost(ds, clus) == pytest.approx(8.0)

    def test_split_weight_across_coincident_centers(self):
        ds = make_dataset([((1, 1), 1, 2)])
        centers = np.array([(0.0, 0.0), (0.0, 0.0)])
        split = FairClustering(centers, [0, 0], [0, 1], [1, 1])
        whole = FairClustering(centers, [0], [0], [2])
        assert assignment_cost(ds, split) == pytest.approx(assignment_cost(ds, whole))

    def test_out_of_range_center_rejected(self):
        ds = make_dataset([((0, 0), 1, 1)])
        clus = FairClustering(np.zeros((1, 2)), [0], [3], [1])
        with pytest.raises(ValueError):
            assignment_cost(ds, clus)

    def test_kmeans_cost_lower_bounds_any_assignment(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n, k = 10, 3
            coords = rng.normal(size=(n, 2))
            ds = Dataset(coords, np.ones(n, dtype=int))
            centers = rng.normal(size=(k, 2))
            lab = rng.integers(0, k, size=n)
            clus = FairClustering(centers, np.arange(n), lab, np.ones(n, dtype=int))
            assert kmeans_cost(ds, centers) <= assignment_cost(ds, clus) + 1e-12


class TestDecompositionIdentity:
    def test_one_means_decomposition(self):
        # sum ||p-c||^2 == sum ||p-mu||^2 + |P| * ||mu-c||^2
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = rng.integers(1, 51)
            d = rng.integers(1, 6)
            P = rng.normal(scale=rng.uniform(0.5, 20), size=(n, d))
            c = rng.normal(scale=10, size=d)
            lhs = ((P - c) ** 2).sum()
            mu = P.mean(axis=0)
            rhs = ((P - mu) ** 2).sum() + n * ((mu - c) ** 2).sum()
            scale = max(lhs, rhs, 1.0)
            assert abs(lhs - rhs) <= 1e-9 * scale

    def test_centroid_beats_random_centers(self):
        rng = np.random.default_rng(8)
        P = rng.normal(size=(20, 3))
        w = rng.integers(1, 4, size=20)
        mu = centroid(P, w)
        base = (((P - mu) ** 2).sum(axis=1) * w).sum()
        for _ in range(100):
            c = rng.normal(size=3)
            assert base <= (((P - c) ** 2).sum(axis=1) * w).sum() + 1e-12


class TestColorFraction:
    def test_half(self):
        ds = make_dataset([((0,), 1, 1), ((1,), 1, 1), ((2,), 2, 1), ((3,), 2, 1)])
        assert color_fraction(ds, 1) == Fraction(1, 2)

    def test_quarter(self):
        ds = make_dataset([((0,), 1, 1), ((1,), 1, 1), ((2,), 1, 1), ((3,), 2, 1)])
        assert color_fraction(ds, 2) == Fraction(1, 4)

    def test_heavily_imbalanced(self):
        ds = make_dataset([((0,), 1, 100), ((1,), 2, 1)])
        assert color_fraction(ds, 2) == Fraction(1, 101)

    def test_fractions_sum_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            ncol = int(rng.integers(2, 4))
            colors = rng.integers(1, ncol + 1, size=n)
            colors[0] = ncol  # ensure every declared color can appear
            ds = Dataset(rng.normal(size=(n, 2)), colors, rng.integers(1, 5, size=n))
            total = sum(color_fraction(ds, j) for j in range(1, ds.n_colors + 1))
            assert total == Fraction(1)


class TestCheckFair:
    def _clustering(self, ds, labels):
        centers = np.zeros((max(labels) + 1, ds.d))
        return FairClustering(centers, np.arange(ds.n), labels, ds.weights.copy())

    def test_balanced_clusters_fair(self):
        ds = make_dataset(
            [((0, 0), 1, 1), ((0, 1), 2, 1), ((5, 0), 1, 1), ((5, 1), 2, 1)]
        )
        clus = self._clustering(ds, np.array([0, 0, 1, 1]))
        assert check_fair(clus, ds, 1, 1).ok

    def test_unbalanced_cluster_flagged(self):
        ds = make_dataset(
            [((0, 0), 1, 1), ((0, 1), 1, 1), ((0, 2), 1, 1), ((0, 3), 2, 1),
             ((5, 0), 1, 1), ((5, 1), 2, 1), ((5, 2), 2, 1), ((5, 3), 2, 1)]
        )
        clus = self._clustering(ds, np.array([0, 0, 0, 0, 1, 1, 1, 1]))
        res = check_fair(clus, ds, 1, 1)
        assert not res.ok
        assert res.violation == (0, 1)

    def test_near_vacuous_bounds(self):
        # alpha = 1/W, beta = W: any cluster containing at least one point
        # of every color passes (fraction >= 1/|C_i| >= alpha * xi).
        ds = make_dataset([((0, 0), 1, 1), ((1, 0), 2, 1), ((2, 0), 1, 1), ((3, 0), 2, 1)])
        clus = self._clustering(ds, np.array([0, 0, 1, 1]))
        total = ds.total_weight
        assert check_fair(clus, ds, Fraction(1, total), total).ok
        # but a cluster missing a color entirely still violates the lower
        # bound, since alpha * xi(j) > 0 while its fraction is 0
        skewed = self._clustering(ds, np.array([0, 1, 0, 1]))
        counts = skewed.color_counts(ds)
        assert (counts == 0).any()
        assert not check_fair(skewed, ds, Fraction(1, total), total).ok

    def test_equal_weight_equivalence_on_balanced_data(self):
        # alpha = beta = 1 on an exactly balanced two-color set demands
        # equal red and blue weight in every cluster.
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = 4
            coords = rng.normal(size=(2 * n, 1))
            colors = np.array([1] * n + [2] * n)
            ds = Dataset(coords, colors)
            labels = rng.integers(0, 2, size=2 * n)
            clus = self._clustering(ds, labels)
            counts = clus.color_counts(ds)
            expected = all(c[0] == c[1] for c in counts)
            assert check_fair(clus, ds, 1, 1).ok == expected


class TestBalance:
    def test_even(self):
        assert balance(5, 5) == Fraction(1)

    def test_three_to_one(self):
        assert balance(3, 1) == Fraction(1, 3)

    def test_zero_degenerate(self):
        assert balance(0, 4) == Fraction(0)


class TestDataTypes:
    def test_weight_must_be_positive(self):
        with pytest.raises(ValueError):
            Dataset([(0, 0)], [1], [0])

    def test_fractional_weight_rejected(self):
        with pytest.raises(ValueError):
            Dataset([(0, 0)], [1], [1.5])

    def test_colored_point_validation(self):
        with pytest.raises(ValueError):
            ColoredPoint(np.array([0.0]), 0, 1)

    def test_dimension_mismatch(self):
        ds = Dataset([(0, 0), (1, 1)], [1, 2])
        with pytest.raises(ValueError):
            kmeans_cost(ds, [(0, 0, 0)])

    def test_center_set(self):
        cs = CenterSet(np.zeros((3, 2)))
        assert cs.k == 3 and cs.d == 2

    def test_pairwise_sq_dists_nonnegative(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(5, 4))
        sq = pairwise_sq_dists(A, A)
        assert sq.min() >= 0
        assert np.allclose(np.diag(sq), 0)
