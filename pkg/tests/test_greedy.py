"""Random greedy matching process: traces, envelopes, estimators,
parity tracking, CSV export."""

import dataclasses
import math

import pytest

from torq.board import BoardKind, TorusGraph, verify_matching
from torq.errors import PreconditionError, VerificationError
from torq.greedy import (
    RNG_ALGORITHM,
    CountEstimate,
    Envelope,
    GreedyTrace,
    count_estimate,
    envelope_check,
    knuth_count_estimator,
    parity_track,
    run_campaign,
    run_greedy,
    trace_to_csv,
)


class TestRunGreedy:
    def test_deterministic_for_fixed_seed(self):
        g = TorusGraph(51)
        t1 = run_greedy(g, seed=5, stop_fraction=0.5)
        t2 = run_greedy(g, seed=5, stop_fraction=0.5)
        assert t1 == t2

    def test_seed_changes_the_run(self):
        g = TorusGraph(51)
        t1 = run_greedy(g, seed=0, stop_fraction=0.5)
        t2 = run_greedy(g, seed=1, stop_fraction=0.5)
        assert t1.matching != t2.matching

    def test_trace_shape(self):
        n, stop = 50, 0.6
        trace = run_greedy(TorusGraph(n), seed=3, stop_fraction=stop)
        m = len(trace.matching)
        assert trace.completed and m == math.ceil(stop * n)
        assert len(trace.steps) == m + 1
        assert trace.steps[0].q == n * n
        assert trace.steps[0].p == 1.0
        qs = [rec.q for rec in trace.steps]
        assert all(a > b for a, b in zip(qs, qs[1:]))
        assert trace.rng_algorithm == RNG_ALGORITHM
        assert verify_matching(TorusGraph(n), trace.matching).valid

    def test_probability_schedule(self):
        trace = run_greedy(TorusGraph(25), seed=0, stop_fraction=0.4)
        for rec in trace.steps:
            assert rec.p == pytest.approx(1.0 - 4 * rec.i / 100)

    def test_semi_board_schedule(self):
        trace = run_greedy(
            TorusGraph(25, BoardKind.SEMIQUEENS_TOROIDAL), seed=0, stop_fraction=0.4
        )
        for rec in trace.steps:
            assert rec.p == pytest.approx(1.0 - 3 * rec.i / 75)

    def test_debug_mode_agrees(self):
        g = TorusGraph(40)
        assert run_greedy(g, 1, 0.7, debug=True) == run_greedy(g, 1, 0.7)

    def test_rejects_classical_board(self):
        with pytest.raises(PreconditionError) as exc:
            run_greedy(TorusGraph(8, BoardKind.QUEENS_CLASSICAL), 0, 0.5)
        assert exc.value.condition == "kind"

    def test_rejects_bad_stop_fraction(self):
        with pytest.raises(PreconditionError) as exc:
            run_greedy(TorusGraph(8), 0, 0.0)
        assert exc.value.condition == "stop-fraction"

    def test_degree_extremes_bracket_truth(self):
        n = 31
        trace = run_greedy(TorusGraph(n), seed=2, stop_fraction=0.5)
        final = trace.steps[-1]
        # Recompute degrees of surviving vertices from the matching.
        used = {
            "x": {e.x for e in trace.matching},
            "y": {e.y for e in trace.matching},
            "s": {e.s(n) for e in trace.matching},
            "d": {e.d(n) for e in trace.matching},
        }
        deg = {key: [0] * n for key in used}
        for x in range(n):
            for y in range(n):
                s, d = (x + y) % n, (x - y) % n
                if (
                    x in used["x"] or y in used["y"]
                    or s in used["s"] or d in used["d"]
                ):
                    continue
                for key, c in (("x", x), ("y", y), ("s", s), ("d", d)):
                    deg[key][c] += 1
        degs = [
            deg[key][c]
            for key in used
            for c in range(n)
            if c not in used[key]
        ]
        assert final.d_min == min(degs)
        assert final.d_max == max(degs)


class TestEnvelope:
    def test_values_at_p_one(self):
        env = Envelope(0.05)
        assert env.e_q(100, 1.0) == pytest.approx(2 * 0.05 * 100 * 100)
        assert env.e_d(100, 1.0) == pytest.approx(2 * 0.05 ** (2 / 3) * 100)

    def test_widens_as_p_falls(self):
        env = Envelope(0.05)
        assert env.e_q(100, 0.5) > env.e_q(100, 0.9)

    def test_rejects_nonpositive_b(self):
        with pytest.raises(PreconditionError) as exc:
            Envelope(0.0)
        assert exc.value.condition == "b"

    def test_healthy_run_stays_inside(self):
        trace = run_greedy(TorusGraph(301), seed=0, stop_fraction=0.9)
        report = envelope_check(trace, b=0.05)
        assert report.inside_fraction >= 0.99

    def test_corrupted_step_is_flagged(self):
        trace = run_greedy(TorusGraph(101), seed=0, stop_fraction=0.5)
        bad_step = dataclasses.replace(trace.steps[10], q=10**9)
        steps = trace.steps[:10] + (bad_step,) + trace.steps[11:]
        broken = dataclasses.replace(trace, steps=steps)
        report = envelope_check(broken, b=0.05)
        assert report.first_violation == 10
        assert not report.inside[10]


class TestCountEstimate:
    def test_matches_hand_sum(self):
        trace = run_greedy(TorusGraph(41), seed=7, stop_fraction=0.5)
        expect = sum(
            math.log(trace.steps[i].q) - math.log(41 - i)
            for i in range(len(trace.matching))
        )
        est = count_estimate(trace)
        assert isinstance(est, CountEstimate)
        assert est.total == pytest.approx(expect)
        assert est.normalized == pytest.approx(expect / 41)


class TestKnuthEstimator:
    def test_small_board_consistency(self):
        # Every completed run at n=5 contributes exactly
        # 25*8*3*2*1 = 1200, the ordered-sequence count over 5! per
        # solution; the mean converges on 1200.
        est = knuth_count_estimator(TorusGraph(5), trials=20_000, seed=0)
        assert abs(est - 1200) <= 120

    def test_unsolvable_board_is_zero(self):
        assert knuth_count_estimator(TorusGraph(6), trials=500, seed=0) == 0.0


class TestParityTrack:
    def test_matches_recorded_disparity(self):
        trace = run_greedy(TorusGraph(51), seed=4, stop_fraction=0.8)
        track = parity_track(trace)
        assert track == tuple(rec.parity_disparity for rec in trace.steps[1:])

    def test_rejects_even_n(self):
        trace = run_greedy(TorusGraph(8), seed=0, stop_fraction=0.3)
        with pytest.raises(PreconditionError) as exc:
            parity_track(trace)
        assert exc.value.condition == "odd-n"

    def test_rejects_semi_board(self):
        trace = run_greedy(
            TorusGraph(9, BoardKind.SEMIQUEENS_TOROIDAL), seed=0, stop_fraction=0.3
        )
        with pytest.raises(PreconditionError) as exc:
            parity_track(trace)
        assert exc.value.condition == "kind"

    def test_detects_tampered_trace(self):
        trace = run_greedy(TorusGraph(51), seed=4, stop_fraction=0.8)
        bad = dataclasses.replace(
            trace.steps[-1], parity_disparity=trace.steps[-1].parity_disparity + 1
        )
        broken = dataclasses.replace(trace, steps=trace.steps[:-1] + (bad,))
        with pytest.raises(VerificationError):
            parity_track(broken)


class TestCsvExport:
    def test_header_and_row_count(self):
        trace = run_greedy(TorusGraph(25), seed=0, stop_fraction=0.5)
        lines = trace_to_csv(trace, b=0.05).strip().splitlines()
        assert lines[0] == "i,Q,p,n2p4,eq,dmin,dmax,np3,ed,parity_disparity"
        assert len(lines) == len(trace.steps) + 1

    def test_float_columns_round_trip(self):
        trace = run_greedy(TorusGraph(25), seed=0, stop_fraction=0.5)
        lines = trace_to_csv(trace, b=0.05).strip().splitlines()
        env = Envelope(0.05)
        for rec, line in zip(trace.steps, lines[1:]):
            cols = line.split(",")
            assert int(cols[0]) == rec.i and int(cols[1]) == rec.q
            assert float(cols[2]) == rec.p
            assert float(cols[4]) == env.e_q(25, rec.p)


class TestCampaign:
    def test_summary_shape(self):
        out = run_campaign(101, seeds=range(3), b=0.05, stop_fraction=0.8)
        assert out["schema"] == "torq/1"
        assert out["seeds"] == [0, 1, 2]
        s = out["summary"]
        assert 0.0 <= s["inside_fraction_median"] <= 1.0
        assert s["estimate_mean_log"] > 0.0
