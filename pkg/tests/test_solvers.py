import numpy as np
import pytest

from fairkmeans import (
    CenterSet,
    Dataset,
    SizeGuardError,
    SolverConfig,
    brute_force_opt,
    check_fair,
    cklv_kmeanspp,
    fair_kmeanspp,
    kmeans_cost,
    kmeanspp_seed,
    lloyd,
    ptas,
    reassigned_cklv,
)
from fairkmeans.core import centroid

from oracles import exact_fair_opt
from test_fairlets import two_color_dataset


def canonical_four():
    """Two tight red/blue pairs far apart; fair 2-means optimum is 1."""
    return two_color_dataset([(1, 0), (11, 0)], [(0, 0), (10, 0)])


def random_balanced(rng, half_max=5, d=2, weighted=False):
    m = int(rng.integers(1, half_max + 1))
    red = rng.normal(size=(m, d)) * rng.uniform(0.5, 3)
    blue = rng.normal(size=(m, d)) * rng.uniform(0.5, 3)
    if not weighted:
        return two_color_dataset(red, blue)
    w = int(rng.integers(1, 3))
    return two_color_dataset(red, blue, [w] * m, [w] * m)


class TestSeeding:
    def test_forced_second_center(self):
        coords = np.array([[0.0, 0.0], [3.0, 0.0]])
        for seed in range(20):
            cs = kmeanspp_seed(coords, None, 2, seed)
            assert {tuple(c) for c in cs.centers} == {(0.0, 0.0), (3.0, 0.0)}

    def test_coincident_points_duplicate_flag(self):
        coords = np.zeros((4, 2))
        cs = kmeanspp_seed(coords, None, 3, 0)
        assert cs.has_duplicates
        assert np.allclose(cs.centers, 0)

    def test_d2_law_frequency(self):
        # on {0, 1, 10}: given first center 0, the next is 10 with
        # probability 100/101
        coords = np.array([[0.0], [1.0], [10.0]])
        rng = np.random.default_rng(12345)
        hits = 0
        trials = 0
        for _ in range(10_000):
            cs = kmeanspp_seed(coords, None, 2, rng)
            if cs.centers[0, 0] == 0.0:
                trials += 1
                if cs.centers[1, 0] == 10.0:
                    hits += 1
        p = 100.0 / 101.0
        sigma = np.sqrt(p * (1 - p) / trials)
        assert trials > 2500
        assert abs(hits / trials - p) <= 3 * sigma

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(0)
        coords = rng.normal(size=(30, 3))
        w = rng.integers(1, 5, size=30)
        a = kmeanspp_seed(coords, w, 4, 7)
        b = kmeanspp_seed(coords, w, 4, 7)
        assert np.array_equal(a.centers, b.centers)


class TestLloyd:
    def test_converges_to_known_optimum(self):
        coords = np.array([[0.0], [2.0], [10.0], [12.0]])
        init = np.array([[0.0], [10.0]])
        centers, cost, _ = lloyd(coords, None, init, SolverConfig(k=2))
        assert cost == pytest.approx(4.0)
        assert sorted(centers.centers.ravel().tolist()) == [1.0, 11.0]

    def test_fixed_point_stops_immediately(self):
        coords = np.array([[0.0], [2.0], [10.0], [12.0]])
        init = np.array([[1.0], [11.0]])
        _, cost, iterations = lloyd(coords, None, init, SolverConfig(k=2))
        assert iterations <= 2
        assert cost == pytest.approx(4.0)

    def test_k1_is_centroid(self):
        rng = np.random.default_rng(1)
        coords = rng.normal(size=(10, 2))
        w = rng.integers(1, 4, size=10)
        centers, cost, _ = lloyd(coords, w, coords[:1], SolverConfig(k=1))
        assert np.allclose(centers.centers[0], centroid(coords, w))

    def test_cost_trace_non_increasing(self):
        rng = np.random.default_rng(2)
        for trial in range(10):
            coords = rng.normal(size=(30, 2))
            w = rng.integers(1, 4, size=30)
            init = kmeanspp_seed(coords, w, 3, trial)
            trace = []
            lloyd(coords, w, init, SolverConfig(k=3, tol=0.0), trace=trace)
            assert all(a >= b - 1e-9 for a, b in zip(trace, trace[1:]))


class TestCklv:
    def test_canonical_instance(self):
        ds = canonical_four()
        clus = cklv_kmeanspp(ds, SolverConfig(k=2, seed=0))
        assert clus.cost == pytest.approx(1.0)
        assert check_fair(clus, ds, 1, 1).ok

    def test_k1_everything_to_centroid(self):
        rng = np.random.default_rng(3)
        ds = random_balanced(rng)
        clus = cklv_kmeanspp(ds, SolverConfig(k=1, seed=0))
        mu = centroid(ds.coords, ds.weights)
        expected = (((ds.coords - mu) ** 2).sum(axis=1) * ds.weights).sum()
        assert clus.cost == pytest.approx(expected)

    def test_coincident_pairs_cost_zero(self):
        ds = two_color_dataset([(0, 0), (5, 0), (9, 9)], [(0, 0), (5, 0), (9, 9)])
        clus = cklv_kmeanspp(ds, SolverConfig(k=3, seed=1))
        assert clus.cost == pytest.approx(0.0)


class TestReassigned:
    def test_never_worse_than_cklv(self):
        rng = np.random.default_rng(4)
        for trial in range(15):
            ds = random_balanced(rng, weighted=bool(trial % 2))
            for k in (1, 2, 3):
                seed = 100 + trial
                a = cklv_kmeanspp(ds, SolverConfig(k=k, seed=seed))
                b = reassigned_cklv(ds, SolverConfig(k=k, seed=seed))
                assert b.cost <= a.cost + 1e-9 * max(1.0, a.cost)
                assert np.array_equal(a.centers, b.centers)

    def test_canonical_instance(self):
        clus = reassigned_cklv(canonical_four(), SolverConfig(k=2, seed=0))
        assert clus.cost == pytest.approx(1.0)

    def test_fair_output(self):
        rng = np.random.default_rng(5)
        ds = random_balanced(rng)
        clus = reassigned_cklv(ds, SolverConfig(k=2, seed=0))
        assert check_fair(clus, ds, 1, 1).ok


class TestFairLloyd:
    def test_canonical_instance(self):
        ds = canonical_four()
        clus = fair_kmeanspp(ds, SolverConfig(k=2, seed=0))
        assert clus.cost == pytest.approx(1.0)
        assert check_fair(clus, ds, 1, 1).ok

    def test_monotone_cost_sequence(self):
        rng = np.random.default_rng(6)
        for trial in range(10):
            ds = random_balanced(rng, half_max=6)
            trace = []
            fair_kmeanspp(ds, SolverConfig(k=2, seed=trial, tol=0.0), trace=trace)
            assert all(a >= b - 1e-9 * max(1.0, a) for a, b in zip(trace, trace[1:]))

    def test_init_from_reassigned_never_worse(self):
        rng = np.random.default_rng(7)
        for trial in range(10):
            ds = random_balanced(rng)
            base = reassigned_cklv(ds, SolverConfig(k=2, seed=trial))
            refined = fair_kmeanspp(
                ds, SolverConfig(k=2, seed=trial), init=CenterSet(base.centers)
            )
            assert refined.cost <= base.cost + 1e-9 * max(1.0, base.cost)

    def test_stops_quickly_at_local_optimum(self):
        ds = canonical_four()
        base = fair_kmeanspp(ds, SolverConfig(k=2, seed=0))
        trace = []
        fair_kmeanspp(ds, SolverConfig(k=2, seed=0), init=CenterSet(base.centers), trace=trace)
        assert len(trace) <= 2

    def test_fair_every_instance(self):
        rng = np.random.default_rng(8)
        for trial in range(8):
            ds = random_balanced(rng, weighted=True)
            clus = fair_kmeanspp(ds, SolverConfig(k=3, seed=trial))
            clus.validate_against(ds)
            assert check_fair(clus, ds, 1, 1).ok


class TestBruteForce:
    def test_canonical_instance(self):
        ds = canonical_four()
        opt = brute_force_opt(ds, 2)
        assert opt.cost == pytest.approx(1.0)

    def test_coincident_pairs_zero(self):
        ds = two_color_dataset([(0, 0), (7, 7)], [(0, 0), (7, 7)])
        assert brute_force_opt(ds, 2).cost == pytest.approx(0.0)

    def test_k1_is_total_variance(self):
        rng = np.random.default_rng(9)
        ds = random_balanced(rng, half_max=3)
        mu = centroid(ds.coords, ds.weights)
        expected = (((ds.coords - mu) ** 2).sum(axis=1) * ds.weights).sum()
        assert brute_force_opt(ds, 1).cost == pytest.approx(expected)

    def test_against_independent_enumeration(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            ds = random_balanced(rng, half_max=3)
            for k in (1, 2):
                expected = exact_fair_opt(ds.coords, ds.colors, ds.weights, k)
                got = brute_force_opt(ds, k)
                assert got.cost == pytest.approx(expected, rel=1e-9, abs=1e-12)
                got.validate_against(ds)
                assert check_fair(got, ds, 1, 1).ok

    def test_guard(self):
        ds = two_color_dataset([(0, 0)], [(1, 1)], [10], [10])
        with pytest.raises(SizeGuardError):
            brute_force_opt(ds, 2)


class TestPtas:
    def test_canonical_instance(self):
        ds = canonical_four()
        clus = ptas(ds, 2, 1.0, mode="exhaustive")
        assert clus.cost == pytest.approx(1.0)

    def test_k1_exact(self):
        rng = np.random.default_rng(11)
        ds = random_balanced(rng, half_max=3)
        mu = centroid(ds.coords, ds.weights)
        expected = (((ds.coords - mu) ** 2).sum(axis=1) * ds.weights).sum()
        assert ptas(ds, 1, 1.0, mode="exhaustive").cost == pytest.approx(expected)

    def test_within_factor_two_of_opt(self):
        rng = np.random.default_rng(12)
        for _ in range(8):
            ds = random_balanced(rng, half_max=5)
            opt = brute_force_opt(ds, 2).cost
            got = ptas(ds, 2, 1.0, mode="exhaustive").cost
            assert got <= 2.0 * opt + 1e-9
            assert got >= opt - 1e-9 * max(1.0, opt)

    def test_guard(self):
        rng = np.random.default_rng(13)
        ds = two_color_dataset(rng.normal(size=(10, 2)), rng.normal(size=(10, 2)))
        with pytest.raises(SizeGuardError):
            ptas(ds, 2, 1.0, mode="exhaustive")

    def test_sampling_mode_fair(self):
        rng = np.random.default_rng(14)
        ds = two_color_dataset(rng.normal(size=(10, 2)), rng.normal(size=(10, 2)))
        clus = ptas(ds, 2, 1.0, mode="sampling", samples=40, rng=0)
        assert check_fair(clus, ds, 1, 1).ok


class TestDeterminism:
    def test_identical_seed_identical_bytes(self):
        rng = np.random.default_rng(15)
        ds = random_balanced(rng, half_max=6)
        outs = []
        for _ in range(2):
            clus = fair_kmeanspp(ds, SolverConfig(k=2, seed=99))
            outs.append(
                clus.centers.tobytes()
                + clus.point_idx.tobytes()
                + clus.center_idx.tobytes()
                + clus.subweights.tobytes()
            )
        assert outs[0] == outs[1]
