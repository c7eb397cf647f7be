import math

import numpy as np
import pytest

import oracles as oc
from covertime import (
    ComponentView,
    ContractViolation,
    MultiGraph,
    ResistanceOracle,
    complete_graph,
    cycle_graph,
    exact_cover_time,
    exact_cover_time_worst,
    exact_cover_times,
    hitting_time,
    local_time_tail_check,
    path_graph,
    simulate,
    star_graph,
    trace_local_times,
    uniform_labeled_tree,
)


def comp(g: MultiGraph) -> ComponentView:
    return ComponentView.whole(g)


class TestExactCoverTime:
    def test_complete_graphs_coupon_collector(self):
        for n in range(3, 9):
            got = exact_cover_time(comp(complete_graph(n)), 0)
            assert got == pytest.approx(oc.coupon_collector_cover(n), abs=1e-9)

    def test_cycles(self):
        for n in range(3, 11):
            got = exact_cover_time(comp(cycle_graph(n)), 0)
            assert got == pytest.approx(oc.cycle_cover(n), abs=1e-9)

    def test_p3_from_middle(self):
        assert exact_cover_time(comp(path_graph(3)), 1) == pytest.approx(5.0, abs=1e-12)
        assert exact_cover_time_worst(comp(path_graph(3))) == pytest.approx(5.0, abs=1e-12)

    def test_single_vertex(self):
        assert exact_cover_time(comp(MultiGraph(1)), 0) == 0.0

    def test_too_large_rejected(self):
        with pytest.raises(ContractViolation):
            exact_cover_times(comp(path_graph(21)))

    def test_loops_slow_cover(self):
        # a loop at the start wastes steps but covers eventually
        plain = exact_cover_time(comp(MultiGraph(2, [(0, 1)])), 0)
        loopy = exact_cover_time(comp(MultiGraph(2, [(0, 1), (0, 0)])), 0)
        assert plain == pytest.approx(1.0)
        assert loopy == pytest.approx(3.0)  # Geom(1/3) tries to leave 0


class TestSimulateCover:
    def test_k2_deterministic(self):
        est = simulate(comp(MultiGraph(2, [(0, 1)])), "cover",
                       start_policy="fixed", start=0, trials=300, master_seed=1)
        assert (est.samples == 1).all()
        assert est.mean == 1.0 and est.std_err == 0.0

    def test_c4_matches_exact(self):
        est = simulate(comp(cycle_graph(4)), "cover",
                       start_policy="fixed", start=0, trials=20000, master_seed=5)
        assert abs(est.mean - 6.0) <= 3 * est.std_err

    def test_worst_start_p3(self):
        est = simulate(comp(path_graph(3)), "cover",
                       start_policy="worst_over_all_starts", trials=4000, master_seed=2)
        assert est.start == 1
        assert abs(est.mean - 5.0) <= 3 * est.std_err

    def test_worst_start_size_cap(self):
        with pytest.raises(ContractViolation):
            simulate(comp(cycle_graph(70)), "cover",
                     start_policy="worst_over_all_starts", trials=2, master_seed=0)

    def test_matches_exact_dp_randomized(self):
        rng = np.random.default_rng(33)
        bad = 0
        for trial in range(12):
            g = oc.random_connected_multigraph(rng, int(rng.integers(2, 11)),
                                               extra_edges=int(rng.integers(0, 6)),
                                               loops=int(rng.integers(0, 2)))
            c = comp(g)
            start = int(rng.integers(0, g.vertex_count))
            est = simulate(c, "cover", start_policy="fixed", start=start,
                           trials=4000, master_seed=trial)
            exact = exact_cover_time(c, start)
            if abs(est.mean - exact) > 3 * max(est.std_err, 1e-12):
                bad += 1
        assert bad <= 1

    def test_engines_agree_exactly(self):
        # scalar (trials < threshold) and vector engines share streams
        c = comp(cycle_graph(6))
        lo = simulate(c, "cover", start_policy="fixed", start=0, trials=50, master_seed=9)
        hi = simulate(c, "cover", start_policy="fixed", start=0, trials=500, master_seed=9)
        assert np.array_equal(lo.samples, hi.samples[:50])

    def test_reruns_bit_exact(self):
        c = comp(star_graph(5))
        a = simulate(c, "cover", start_policy="fixed", start=0, trials=64, master_seed=123)
        b = simulate(c, "cover", start_policy="fixed", start=0, trials=64, master_seed=123)
        assert np.array_equal(a.samples, b.samples)

    def test_stationary_policy_runs(self):
        est = simulate(comp(cycle_graph(5)), "cover", start_policy="stationary",
                       trials=500, master_seed=4)
        assert est.start_policy == "stationary"
        assert abs(est.mean - 10.0) < 1.0  # cycle cover is start-independent


class TestOtherQuantities:
    def test_blanket_k2(self):
        est = simulate(comp(MultiGraph(2, [(0, 1)])), "blanket",
                       start_policy="fixed", start=0, trials=200, master_seed=0)
        assert (est.samples == 1).all()

    def test_blanket_at_least_cover_pathwise(self):
        for seed in range(3):
            g = uniform_labeled_tree(7, seed + 50)
            c = comp(g)
            cov = simulate(c, "cover", start_policy="fixed", start=0,
                           trials=400, master_seed=seed)
            bl = simulate(c, "blanket", start_policy="fixed", start=0,
                          trials=400, master_seed=seed)
            assert np.all(bl.samples >= cov.samples)

    def test_cover_return_dominates_cover(self):
        c = comp(cycle_graph(5))
        cov = simulate(c, "cover", start_policy="fixed", start=0, trials=1000, master_seed=3)
        ret = simulate(c, "cover_return", start_policy="fixed", start=0,
                       trials=1000, master_seed=3)
        assert np.all(ret.samples >= cov.samples)

    def test_hitting_matches_exact(self):
        g = path_graph(4)
        c = comp(g)
        o = ResistanceOracle(c)
        est = simulate(c, "hitting", u=0, v=3, trials=20000, master_seed=11)
        assert abs(est.mean - hitting_time(o, 0, 3)) <= 3 * est.std_err

    def test_return_time_identity(self):
        g = MultiGraph(3, [(0, 1), (1, 2), (1, 1)])  # loop at the middle
        c = comp(g)
        est = simulate(c, "hitting", u=1, v=1, trials=30000, master_seed=13)
        expect = 2 * g.edge_total / g.degree(1)
        assert abs(est.mean - expect) <= 3 * est.std_err
        assert est.mean == pytest.approx(oc.return_time_exact(g, 1), rel=0.05)

    def test_commute_identity_simulated(self):
        g = cycle_graph(6)
        c = comp(g)
        o = ResistanceOracle(c)
        est = simulate(c, "commute", u=0, v=2, trials=20000, master_seed=17)
        expect = 2 * g.edge_total * o.resistance(0, 2)
        assert abs(est.mean - expect) <= 3 * est.std_err

    def test_commute_requires_distinct(self):
        with pytest.raises(ContractViolation):
            simulate(comp(path_graph(3)), "commute", u=1, v=1, trials=10, master_seed=0)

    def test_cover_return_at_most_twice_worst_cover(self):
        rng = np.random.default_rng(71)
        for seed in range(4):
            g = oc.random_connected_multigraph(rng, 8, extra_edges=4, loops=1)
            c = comp(g)
            worst = simulate(c, "cover", start_policy="worst_over_all_starts",
                             trials=3000, master_seed=seed)
            ret = simulate(c, "cover_return", start_policy="fixed",
                           start=worst.start, trials=3000, master_seed=seed + 100)
            joint_se = math.hypot(worst.std_err, ret.std_err)
            assert ret.mean <= 2 * worst.mean + 3 * joint_se

    def test_estimate_json_fields(self):
        est = simulate(comp(path_graph(3)), "cover", start_policy="fixed",
                       start=0, trials=10, master_seed=0)
        assert set(est.to_dict()) == {"quantity", "start_policy", "mean",
                                      "std_err", "trials", "seed"}
        assert est.to_dict()["start_policy"] == "fixed(0)"


class TestWorstStartHeuristic:
    def test_labeled_and_bounded_by_true_worst(self):
        from covertime import worst_start_heuristic
        c = comp(path_graph(9))
        est = worst_start_heuristic(c, trials=2000, master_seed=21)
        assert "heuristic lower bound" in est.start_policy
        # diameter endpoints of a path are its ends; true worst is the middle
        true_worst = exact_cover_time_worst(c)
        assert est.mean <= true_worst + 3 * est.std_err


class TestLocalTimeTail:
    def test_lambda_zero_trivial(self):
        pts = local_time_tail_check(comp(path_graph(3)), 0, 2, 4.0, [0.0],
                                    trials=500, master_seed=1)
        assert pts[0].empirical_prob <= 1.0 == pts[0].bound

    def test_k2_gap_bounded(self):
        # alternating walk: visits differ by at most one
        pts = local_time_tail_check(comp(MultiGraph(2, [(0, 1)])), 0, 1, 6.0,
                                    [1.5, 2.0], trials=2000, master_seed=2)
        for p in pts:
            assert p.empirical_prob == 0.0

    def test_p3_inequality(self):
        pts = local_time_tail_check(comp(path_graph(3)), 0, 2, 8.0, [1.0, 2.0, 4.0],
                                    trials=50000, master_seed=3)
        for p in pts:
            assert p.empirical_prob <= p.bound + 3 * p.std_err + 1e-6


class TestLocalTimeTrace:
    def test_visits_sum_to_time_plus_one(self):
        tr = trace_local_times(comp(cycle_graph(6)), 0, [0, 5, 17, 40], master_seed=7)
        for i, t in enumerate(tr.checkpoints):
            assert tr.visit_counts[i].sum() == t + 1

    def test_local_times_normalized(self):
        tr = trace_local_times(comp(star_graph(3)), 0, [10], master_seed=1)
        lt = tr.local_times()
        assert lt.shape == (1, 4)
        assert lt[0, 0] == tr.visit_counts[0, 0] / 3
