import math

import numpy as np
import pytest
from scipy import stats

from radarlab.errors import ConfigurationError, DegenerateFitError, DomainError
from radarlab.smallworld import (
    Constant,
    LatticeGraph,
    LogN,
    LogSquared,
    build_graph,
    delivery_scaling,
    greedy_route,
    lattice_distance,
    parse_policy,
    route_pairs,
    sample_long_targets,
    write_results_csv,
)


def bare_ring(n):
    return LatticeGraph("ring", n, np.empty((n, 0), dtype=np.int64), 1.0)


class TestPolicies:
    def test_log_squared_at_1024(self):
        # (ln 1024)^2 = (10 ln 2)^2 = 100 * 0.480453... = 48.045
        assert 100 * math.log(2) ** 2 == pytest.approx(48.045, abs=1e-3)
        assert LogSquared(1).resolve(1024) == 49

    def test_other_policies(self):
        assert Constant(3).resolve(10**6) == 3
        assert LogN(2).resolve(1024) == math.ceil(2 * 10 * math.log(2))

    @pytest.mark.parametrize("n", [3, 9, 100, 2**16])
    def test_at_least_one(self, n):
        for pol in (Constant(1), LogN(0.01), LogSquared(0.01)):
            assert pol.resolve(n) >= 1

    def test_parse(self):
        assert parse_policy("logsquared(1)") == LogSquared(1.0)
        assert parse_policy("constant(2)") == Constant(2)
        assert parse_policy("logn(0.5)") == LogN(0.5)
        with pytest.raises(ConfigurationError):
            parse_policy("cubic(1)")


class TestDistance:
    def test_ring(self):
        assert lattice_distance("ring", 10, 1, 9) == 2

    def test_torus(self):
        # 4x4 torus, node id = y*4 + x
        assert lattice_distance("torus", 16, 0, 15) == 2
        assert lattice_distance("torus", 16, 0, 10) == 4

    def test_torus_needs_square(self):
        with pytest.raises(ConfigurationError):
            lattice_distance("torus", 20, 0, 1)


class TestBuild:
    def test_degree_exact_and_distinct(self):
        g = build_graph("torus", 1024, LogSquared(1), rng_seed=1)
        assert g.long_links.shape == (1024, 49)
        assert np.all(g.long_links != np.arange(1024)[:, None])
        srt = np.sort(g.long_links, axis=1)
        assert np.all(srt[:, 1:] != srt[:, :-1])
        assert g.r_exponent == 2.0

    def test_constant_one(self):
        g = build_graph("ring", 100, Constant(1), rng_seed=0)
        assert g.long_links.shape == (100, 1)
        assert g.r_exponent == 1.0

    def test_determinism(self):
        a = build_graph("torus", 256, LogN(1), rng_seed=9)
        b = build_graph("torus", 256, LogN(1), rng_seed=9)
        c = build_graph("torus", 256, LogN(1), rng_seed=10)
        assert np.array_equal(a.long_links, b.long_links)
        assert not np.array_equal(a.long_links, c.long_links)

    @pytest.mark.parametrize("topology,n", [("ring", 8), ("torus", 50), ("hex", 100)])
    def test_invalid(self, topology, n):
        with pytest.raises(ConfigurationError):
            build_graph(topology, n, Constant(1))

    def test_uniform_targets_when_r_is_zero(self):
        rng = np.random.default_rng(0)
        targets = sample_long_targets("ring", 1024, 17, 1_000_000, 0.0, rng)
        assert not np.any(targets == 17)
        counts = np.bincount(targets, minlength=1024)
        observed = np.delete(counts, 17)
        assert stats.chisquare(observed).pvalue > 0.01

    def test_distance_decay_when_r_is_two(self):
        rng = np.random.default_rng(0)
        t = sample_long_targets("torus", 1024, 0, 200_000, 2.0, rng)
        d = lattice_distance("torus", 1024, 0, t)
        # P(d) ∝ (#nodes at d) * d^-2 = 4d * d^-2 on the torus, so d=1 is twice as likely as d=2
        assert np.mean(d == 1) / np.mean(d == 2) == pytest.approx(2.0, rel=0.05)


class TestGreedy:
    def test_same_node(self):
        g = build_graph("ring", 64, Constant(1))
        assert greedy_route(g, 5, 5).hops == 0

    def test_adjacent_on_bare_ring(self):
        assert greedy_route(bare_ring(20), 3, 4).hops == 1

    @pytest.mark.parametrize("s,t", [(0, 10), (0, 19), (7, 2), (0, 25), (13, 40)])
    def test_bare_ring_is_lattice_distance(self, s, t):
        g = bare_ring(50)
        assert greedy_route(g, s, t).hops == lattice_distance("ring", 50, s, t)

    def test_negative_cap(self):
        with pytest.raises(DomainError):
            greedy_route(bare_ring(20), 0, 5, hop_cap=-1)

    def test_cap_hit(self):
        res = greedy_route(bare_ring(50), 0, 20, hop_cap=5)
        assert not res.delivered and res.path_length_bound_hit and res.hops == 5

    def test_tie_breaks_to_smallest_id(self):
        # from 0 to 5 on a ring of 10 both neighbours are 4 away
        res = greedy_route(bare_ring(10), 0, 5, record_path=True)
        assert res.path[1] == 1

    def test_distance_strictly_decreases(self):
        g = build_graph("torus", 1024, LogN(1), rng_seed=4)
        rng = np.random.default_rng(1)
        for _ in range(100):
            s, t = rng.choice(1024, 2, replace=False)
            res = greedy_route(g, int(s), int(t), record_path=True)
            d = g.distance(np.array(res.path), int(t))
            assert res.delivered and res.hops <= g.diameter
            assert np.all(np.diff(d) < 0)

    def test_densified_routes_are_shorter(self):
        n = 2**14
        dense = build_graph("torus", n, LogSquared(1), rng_seed=3)
        sparse = build_graph("torus", n, Constant(1), rng_seed=3)
        a = route_pairs(dense, 1000, np.random.default_rng(5))
        b = route_pairs(sparse, 1000, np.random.default_rng(5))
        assert a.mean() < b.mean()


class TestDeliveryScaling:
    def test_single_size(self):
        with pytest.raises(DegenerateFitError):
            delivery_scaling("ring", [1024], Constant(1))

    def test_min_trials(self):
        with pytest.raises(ConfigurationError):
            delivery_scaling("ring", [64, 128, 256], Constant(1), trials=10)

    def test_ring_constant_degree_grows(self, tmp_path):
        res = delivery_scaling("ring", [256, 1024, 4096], Constant(1), trials=200, rng_seed=2)
        assert np.all(np.diff(res.mean_hops) > 0)
        assert res.degrees == [1, 1, 1]
        path = write_results_csv([res], ["constant(1)"], 2, tmp_path / "r.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "n,policy,k,mean_hops,stderr,trials,seed"
        assert lines[1].startswith("256,constant(1),1,")
