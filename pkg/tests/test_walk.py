import math
from fractions import Fraction

import pytest

from cstarlab.rng import stream
from cstarlab.walk import (
    Barrier,
    InvalidParamsError,
    Trajectory,
    UnsupportedBarrierError,
    WalkClass,
    WalkParams,
    _hits_zero_from_uniforms,
    _states_from_uniforms,
    _truncated_hit_zero,
    batch_hits_zero,
    batch_sup,
    check_trajectory,
    classify_walk,
    hit_zero_probability,
    sample_trajectory,
    sup_distribution,
)


class TestParams:
    def test_probabilities_validated(self):
        with pytest.raises(InvalidParamsError):
            WalkParams(p=1.2)
        with pytest.raises(InvalidParamsError):
            WalkParams(p=0.5, q=0.6)
        with pytest.raises(InvalidParamsError):
            WalkParams(p=0.5, initial=((0, 0.5), (1, 0.4)))
        with pytest.raises(InvalidParamsError):
            WalkParams(p=0.5, initial=((-1, 1.0),))

    def test_q_defaults_to_complement(self):
        params = WalkParams(p=0.3)
        assert params.q == pytest.approx(0.7)

    def test_initial_accepts_mapping(self):
        params = WalkParams(p=0.5, initial={2: 0.25, 0: 0.75})
        assert params.initial == ((0, 0.75), (2, 0.25))


class TestSampleTrajectory:
    def test_pure_drift(self):
        traj = sample_trajectory(WalkParams.point(1.0), 5, seed=0)
        assert traj.states == (0, 1, 2, 3, 4)

    def test_same_seed_same_trajectory(self):
        params = WalkParams.point(0.55, start=2)
        assert sample_trajectory(params, 300, 9) == sample_trajectory(params, 300, 9)
        assert sample_trajectory(params, 300, 9) != sample_trajectory(params, 300, 10)

    def test_trial_streams_differ(self):
        params = WalkParams.point(0.5, start=3)
        t0 = sample_trajectory(params, 100, 4, trial=0)
        t1 = sample_trajectory(params, 100, 4, trial=1)
        assert t0 != t1

    def test_reflecting_structure(self):
        params = WalkParams.point(0.4)
        traj = sample_trajectory(params, 2000, 13)
        check_trajectory(traj, Barrier.REFLECTING)
        # never two consecutive zeros
        assert all(not (a == 0 and b == 0) for a, b in zip(traj.states, traj.states[1:]))

    def test_absorbing_structure(self):
        params = WalkParams.point(0.4, barrier=Barrier.ABSORBING, start=3)
        traj = sample_trajectory(params, 2000, 13)
        check_trajectory(traj, Barrier.ABSORBING)
        if 0 in traj.states:
            first = traj.states.index(0)
            assert all(s == 0 for s in traj.states[first:])

    def test_hit_frequency_matches_oracle(self):
        # drift keeps the horizon truncation far below the tolerance here
        params = WalkParams.point(0.6, q=0.4, start=1)
        trials, horizon = 3000, 3000
        hits = batch_hits_zero(params, horizon, trials, seed=21)
        freq = hits.mean()
        p_true = hit_zero_probability(params, 1)
        sigma = math.sqrt(p_true * (1 - p_true) / trials)
        assert abs(freq - p_true) < 3 * sigma

    def test_length_validated(self):
        with pytest.raises(InvalidParamsError):
            sample_trajectory(WalkParams.point(0.5), 0, 1)


class TestBatchConsistency:
    def test_event_helper_matches_simulator(self):
        for seed in range(40):
            for p, start, barrier in [(0.5, 0, Barrier.REFLECTING),
                                      (0.6, 1, Barrier.REFLECTING),
                                      (0.3, 2, Barrier.REFLECTING),
                                      (0.5, 1, Barrier.ABSORBING),
                                      (0.7, 0, Barrier.ABSORBING)]:
                params = WalkParams.point(p, barrier=barrier, start=start)
                uniforms = stream(seed).random(60)
                states = _states_from_uniforms(params, uniforms)
                expected = any(s == 0 for s in states[1:])
                assert _hits_zero_from_uniforms(params, uniforms) == expected

    def test_batch_matches_per_trial(self):
        params = WalkParams.point(0.45, start=1)
        batch = batch_hits_zero(params, 50, 25, seed=3)
        for t in range(25):
            traj = sample_trajectory(params, 51, 3, trial=t)
            assert batch[t] == (0 in traj.states[1:])

    def test_batch_sup_matches_per_trial(self):
        params = WalkParams.point(0.5, barrier=Barrier.ABSORBING, start=1)
        sups, resolved = batch_sup(params, 60, seed=5, cap=4)
        assert resolved.all()
        for t in range(60):
            traj = sample_trajectory(params, 4000, 5, trial=t)
            if 0 in traj.states and traj.max_state <= 4:
                assert sups[t] == traj.max_state
            elif traj.max_state > 4:
                assert sups[t] == 5  # capped: sup exceeded 4
            # else: absorption falls beyond the trajectory window; no claim


class TestClassification:
    def test_paper_cases(self):
        assert classify_walk(WalkParams.point(0.5)) is WalkClass.RECURRENT
        assert classify_walk(WalkParams.point(0.6)) is WalkClass.TRANSIENT
        assert classify_walk(WalkParams.point(0.4)) is WalkClass.RECURRENT

    def test_absorbing_unsupported(self):
        with pytest.raises(UnsupportedBarrierError):
            classify_walk(WalkParams.point(0.5, barrier=Barrier.ABSORBING))


class TestHitZeroProbability:
    def test_at_zero(self):
        assert hit_zero_probability(WalkParams.point(0.9), 0) == 1.0

    def test_recurrent_regime(self):
        for p in (0.0, 0.3, 0.5):
            assert hit_zero_probability(WalkParams.point(p), 5) == 1.0

    def test_transient_matches_closed_form(self):
        # independent closed form (q/p)^i for the free walk
        for p, i in [(0.6, 1), (0.6, 4), (0.75, 2), (0.51, 1)]:
            params = WalkParams.point(p)
            expected = (params.q / params.p) ** i
            assert abs(hit_zero_probability(params, i) - expected) < 1e-9

    def test_never_returns_when_q_zero(self):
        assert hit_zero_probability(WalkParams.point(1.0), 2) == 0.0

    def test_truncated_values_increase(self):
        vals = [_truncated_hit_zero(0.5, 0.5, 3, 2 ** k) for k in range(4, 10)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1.0  # truncation bites at criticality; limit is 1


class TestSupDistribution:
    def test_start_zero(self):
        params = WalkParams(p=0.5, barrier=Barrier.ABSORBING, initial=((0, 1.0),))
        assert sup_distribution(params, 0) == 1

    def test_gamblers_ruin_identity(self):
        params = WalkParams.point(0.5, barrier=Barrier.ABSORBING, start=1)
        for k in range(1, 11):
            assert sup_distribution(params, k) == Fraction(k, k + 1)

    def test_monotone_and_consistent_with_hit_probability(self):
        params = WalkParams.point(0.6, q=0.4, barrier=Barrier.ABSORBING, start=1)
        values = [sup_distribution(params, k) for k in range(0, 40)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        limit = hit_zero_probability(WalkParams.point(0.6, q=0.4, start=1), 1)
        assert float(values[-1]) < limit
        assert abs(float(values[-1]) - limit) < 1e-6

    def test_reflecting_unsupported(self):
        with pytest.raises(UnsupportedBarrierError):
            sup_distribution(WalkParams.point(0.5), 3)

    def test_empirical_histogram(self):
        params = WalkParams.point(0.5, barrier=Barrier.ABSORBING, start=1)
        trials = 20000
        sups, resolved = batch_sup(params, trials, seed=17, cap=6)
        assert resolved.all()
        for k in range(1, 7):
            emp = (sups <= k).mean()
            oracle = float(sup_distribution(params, k))
            sigma = math.sqrt(oracle * (1 - oracle) / trials)
            assert abs(emp - oracle) < 3 * sigma


def test_trajectory_validation():
    with pytest.raises(InvalidParamsError):
        Trajectory(())
    with pytest.raises(InvalidParamsError):
        check_trajectory(Trajectory((0, 0)), Barrier.REFLECTING)
    with pytest.raises(InvalidParamsError):
        check_trajectory(Trajectory((0, 2)), Barrier.ABSORBING)
    with pytest.raises(InvalidParamsError):
        check_trajectory(Trajectory((1, 3)), Barrier.REFLECTING)
