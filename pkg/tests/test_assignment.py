import numpy as np
import pytest

from fairkmeans import (
    BalanceError,
    ColoringConstraint,
    Dataset,
    SizeGuardError,
    check_fair,
    color_constrained_cost,
    enumerate_coloring_constraints,
    fair_assignment,
    fairness_constraints_cover,
    kmeans_cost,
)
from fairkmeans.core import nearest_center

from oracles import enum_constrained_cost
from test_fairlets import two_color_dataset


def random_tiny(rng, max_weight=12, k_range=(1, 3)):
    """Random balanced two-color weighted dataset plus random centers."""
    half = int(rng.integers(1, max_weight // 2 + 1))
    nr = int(rng.integers(1, half + 1))
    nb = int(rng.integers(1, half + 1))
    red_w = np.full(nr, half // nr, dtype=int)
    red_w[: half - int(red_w.sum())] += 1
    blue_w = np.full(nb, half // nb, dtype=int)
    blue_w[: half - int(blue_w.sum())] += 1
    ds = two_color_dataset(
        rng.normal(size=(nr, 2)), rng.normal(size=(nb, 2)), red_w, blue_w
    )
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    centers = rng.normal(size=(k, 2))
    return ds, centers


class TestColorConstrainedCost:
    def test_inactive_constraint_equals_kmeans_cost(self):
        rng = np.random.default_rng(0)
        coords = rng.normal(size=(8, 2))
        ds = Dataset(coords, [1, 1, 1, 1, 2, 2, 2, 2])
        centers = rng.normal(size=(2, 2))
        _, lab = nearest_center(coords, centers)
        K = np.zeros((2, 2), dtype=int)
        for i in range(8):
            K[lab[i], ds.colors[i] - 1] += 1
        res = color_constrained_cost(ds, ColoringConstraint(K), centers)
        assert res.feasible
        assert res.cost == pytest.approx(kmeans_cost(ds, centers), rel=1e-12)

    def test_unbalanced_column_infeasible(self):
        ds = two_color_dataset([(0, 0)], [(1, 0)])
        res = color_constrained_cost(
            ds, ColoringConstraint([[2, 1], [0, 0]]), np.zeros((2, 2))
        )
        assert not res.feasible
        with pytest.raises(BalanceError):
            res.value()

    def test_square_gadget(self):
        ds = two_color_dataset([(0, 0), (2, 0)], [(0, 1), (2, 1)])
        centers = np.array([(0.0, 0.5), (2.0, 0.5)])
        res = color_constrained_cost(ds, ColoringConstraint([[1, 1], [1, 1]]), centers)
        assert res.cost == pytest.approx(1.0)  # 4 * 0.25, brute forced over 4 assignments

    def test_against_monolithic_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(40):
            ds, centers = random_tiny(rng, max_weight=8, k_range=(1, 3))
            k = centers.shape[0]
            weights = ds.color_weights()
            # random feasible K: split each color's weight over k rows
            K = np.zeros((k, 2), dtype=int)
            for j, wj in enumerate(weights):
                left = int(wj)
                for i in range(k - 1):
                    take = int(rng.integers(0, left + 1))
                    K[i, j] = take
                    left -= take
                K[k - 1, j] = left
            res = color_constrained_cost(ds, ColoringConstraint(K), centers)
            expected = enum_constrained_cost(ds.coords, ds.colors, ds.weights, K, centers)
            assert res.feasible
            assert res.cost == pytest.approx(expected, rel=1e-9, abs=1e-12)
            res.clustering.validate_against(ds)
            assert np.array_equal(res.clustering.color_counts(ds), K)

    def test_decomposes_over_colors(self):
        rng = np.random.default_rng(2)
        ds, centers = random_tiny(rng, max_weight=10, k_range=(2, 2))
        K = np.array([[2, 0], [ds.color_weight(1) - 2, ds.color_weight(2)]])
        if K.min() < 0:
            return
        res = color_constrained_cost(ds, ColoringConstraint(K), centers)
        red_only = Dataset(
            ds.coords[ds.colors == 1], np.ones((ds.colors == 1).sum(), int),
            ds.weights[ds.colors == 1],
        )
        blue_only = Dataset(
            ds.coords[ds.colors == 2], np.ones((ds.colors == 2).sum(), int),
            ds.weights[ds.colors == 2],
        )
        r1 = color_constrained_cost(red_only, ColoringConstraint(K[:, :1]), centers)
        r2 = color_constrained_cost(blue_only, ColoringConstraint(K[:, 1:]), centers)
        assert res.cost == pytest.approx(r1.cost + r2.cost, rel=1e-12)


class TestFairAssignment:
    def test_near_pairs_to_near_centers(self):
        ds = two_color_dataset([(0, 0), (10, 0)], [(1, 0), (11, 0)])
        centers = np.array([(0.5, 0.0), (10.5, 0.0)])
        clus = fair_assignment(ds, centers)
        assert clus.cost == pytest.approx(1.0)
        assert check_fair(clus, ds, 1, 1).ok

    def test_single_center_takes_everything(self):
        rng = np.random.default_rng(3)
        ds = two_color_dataset(rng.normal(size=(3, 2)), rng.normal(size=(3, 2)))
        center = rng.normal(size=(1, 2))
        clus = fair_assignment(ds, center)
        expected = ((ds.coords - center[0]) ** 2).sum()
        assert clus.cost == pytest.approx(expected)

    def test_coincident_pairs_on_centers(self):
        ds = two_color_dataset([(0, 0), (5, 5)], [(0, 0), (5, 5)])
        clus = fair_assignment(ds, np.array([(0.0, 0.0), (5.0, 5.0)]))
        assert clus.cost == pytest.approx(0.0)

    def test_unbalanced_rejected(self):
        ds = two_color_dataset([(0, 0), (1, 0)], [(2, 0)])
        with pytest.raises(BalanceError):
            fair_assignment(ds, np.zeros((1, 2)))

    def test_always_exactly_balanced(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            ds, centers = random_tiny(rng)
            clus = fair_assignment(ds, centers)
            clus.validate_against(ds)
            assert check_fair(clus, ds, 1, 1).ok

    def test_equals_constraint_collection_minimum(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            ds, centers = random_tiny(rng, max_weight=12, k_range=(1, 3))
            k = centers.shape[0]
            clus = fair_assignment(ds, centers)
            best = np.inf
            for constraint in fairness_constraints_cover(ds, k, 1, 1):
                res = color_constrained_cost(ds, constraint, centers)
                if res.feasible:
                    best = min(best, res.cost)
            assert clus.cost == pytest.approx(best, rel=1e-9, abs=1e-12)

    def test_monotone_in_centers(self):
        rng = np.random.default_rng(6)
        for _ in range(15):
            ds, centers = random_tiny(rng, k_range=(1, 2))
            base = fair_assignment(ds, centers).cost
            extra = np.vstack([centers, rng.normal(size=(1, 2))])
            assert fair_assignment(ds, extra).cost <= base + 1e-9 * max(1.0, base)


class TestConstraintsCover:
    def test_balanced_two_by_two(self):
        ds = two_color_dataset([(0, 0), (1, 0)], [(2, 0), (3, 0)])
        got = [c.K.tolist() for c in fairness_constraints_cover(ds, 2, 1, 1)]
        # the split constraint plus the two single-cluster variants
        # (rows of zeros are unused centers, vacuously fair)
        assert [[1, 1], [1, 1]] in got
        assert [[2, 2], [0, 0]] in got
        assert [[0, 0], [2, 2]] in got
        assert len(got) == 3
        without = [
            c.K.tolist()
            for c in fairness_constraints_cover(ds, 2, 1, 1, include_unused_centers=False)
        ]
        assert without == [[[1, 1], [1, 1]]]

    def test_k_one_single_matrix(self):
        ds = two_color_dataset([(0, 0)], [(1, 0)], [3], [3])
        got = list(fairness_constraints_cover(ds, 1, 1, 1))
        assert len(got) == 1
        assert got[0].K.tolist() == [[3, 3]]

    def test_guard(self):
        ds = two_color_dataset([(0, 0)], [(1, 0)], [20], [20])
        with pytest.raises(SizeGuardError):
            list(fairness_constraints_cover(ds, 2, 1, 1))

    def test_cover_matches_realizable_fair_counts(self):
        # every enumerated constraint, realized by any assignment, passes
        # check_fair; and every fair labeling's count matrix is enumerated
        rng = np.random.default_rng(7)
        ds = two_color_dataset(rng.normal(size=(2, 2)), rng.normal(size=(2, 2)))
        cover = {c.K.tobytes() for c in fairness_constraints_cover(ds, 2, 1, 1)}
        from itertools import product

        for labels in product(range(2), repeat=4):
            K = np.zeros((2, 2), dtype=np.int64)
            for i, lab in enumerate(labels):
                K[lab, ds.colors[i] - 1] += 1
            fair = all(K[i, 0] == K[i, 1] for i in range(2))
            assert (K.tobytes() in cover) == fair

    def test_enumeration_counts(self):
        weights = [2, 2]
        mats = list(enumerate_coloring_constraints(weights, 2))
        assert len(mats) == 9  # 3 compositions per color, independent
