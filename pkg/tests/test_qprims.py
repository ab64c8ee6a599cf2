import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcongest.netmodel import ParameterError
from qcongest.qprims import (
    GroverSchedule,
    OracleSpec,
    WalkCosts,
    WalkSchedule,
    approx_count,
    batch_grover_found,
    count_in_band_mass,
    grover_found_probability,
    grover_phase_distribution,
    grover_search,
    grover_success_probability,
    johnson_gap,
    mean_attempt_success,
    phase_estimation_distribution,
    walk_search,
)


def test_success_probability_closed_form():
    assert grover_success_probability(10, 0, 3) == 0.0
    assert grover_success_probability(4, 1, 1) == pytest.approx(1.0, abs=1e-12)
    assert grover_success_probability(7, 7, 0) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        grover_success_probability(0, 0, 1)


@given(st.integers(1, 500), st.data())
def test_success_monotone_before_peak(N, data):
    t = data.draw(st.integers(1, N))
    theta = math.asin(math.sqrt(t / N))
    peak = math.floor(math.pi / (4 * theta))
    ps = [grover_success_probability(N, t, i) for i in range(peak + 1)]
    assert all(b >= a - 1e-12 for a, b in zip(ps, ps[1:]))


def test_schedule_shape():
    s = GroverSchedule.for_params(0.25, 0.01)
    assert s.attempts == math.ceil(3 * math.log(100))
    assert s.max_iterations == 4
    led = s.cost(2, 2)
    assert led.rounds == s.attempts * 9 * 2 == led.quantum_messages
    with pytest.raises(ParameterError):
        GroverSchedule.for_params(0.0, 0.1)
    with pytest.raises(ParameterError):
        GroverSchedule.for_params(0.5, 1.0)


def test_worst_attempt_success_supports_a3():
    # worst per-attempt success over eps_f >= eps for the uniform-iteration schedule
    worst = 1.0
    for eps in np.linspace(1e-3, 1.0, 400):
        s = GroverSchedule.for_params(eps, 0.5)
        worst = min(worst, mean_attempt_success(np.linspace(eps, 1, 200), s.max_iterations).min())
    assert worst == pytest.approx(0.3854, abs=2e-3)
    # a=3 attempts then beat alpha: (1-p)^(3 ln 1/alpha) <= alpha iff p >= 1 - e^{-1/3}
    assert worst >= 1 - math.exp(-1 / 3)


def test_empty_oracle_returns_none_full_cost():
    o = OracleSpec.from_marked(16, [])
    rng = np.random.default_rng(0)
    x, led = grover_search(o, 0.1, 0.1, rng)
    assert x is None
    assert led == GroverSchedule.for_params(0.1, 0.1).cost(2, 2)


def test_cost_independent_of_outcome():
    o = OracleSpec.from_marked(32, [1, 5])
    costs = {grover_search(o, 1 / 16, 0.2, np.random.default_rng(s))[1].rounds for s in range(50)}
    assert len(costs) == 1


def test_exact_schedule_frequency():
    # |X|=8, t_f=2, eps=1/4, alpha=0.01
    o = OracleSpec.from_marked(8, [2, 6])
    s = GroverSchedule.for_params(0.25, 0.01)
    per = np.mean([grover_success_probability(8, 2, t) for t in range(s.max_iterations + 1)])
    expected = 1 - (1 - per) ** s.attempts
    rng = np.random.default_rng(42)
    trials = 10**5
    hits = 0
    for _ in range(trials):
        x, _ = grover_search(o, 0.25, 0.01, rng)
        if x is not None:
            assert x in (2, 6)
            hits += 1
    sigma = math.sqrt(expected * (1 - expected) / trials)
    assert abs(hits / trials - expected) <= 3 * sigma + 1e-12
    assert float(grover_found_probability(0.25, s)) == pytest.approx(expected)


def test_uniform_marked_element():
    o = OracleSpec.from_marked(64, [3, 9, 17, 40])
    rng = np.random.default_rng(1)
    seen = [grover_search(o, 1 / 16, 0.01, rng)[0] for _ in range(4000)]
    counts = np.array([seen.count(v) for v in (3, 9, 17, 40)])
    assert counts.sum() >= 3990
    assert counts.min() > 900


def test_batch_matches_per_search():
    s = GroverSchedule.for_params(0.1, 0.3)
    fr = np.full(20000, 0.1)
    batch = batch_grover_found(fr, s, np.random.default_rng(2)).mean()
    o = OracleSpec.from_marked(10, [0])
    rng = np.random.default_rng(3)
    single = np.mean([grover_search(o, 0.1, 0.3, rng)[0] is not None for _ in range(20000)])
    assert abs(batch - single) < 0.02


def test_phase_distribution_basics():
    d = phase_estimation_distribution(3 / 8, 8)
    assert np.allclose(d, np.eye(8)[3])
    assert phase_estimation_distribution(0.25, 4)[1] == pytest.approx(1.0)


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 64))
def test_phase_distribution_normalized(w, P):
    assert phase_estimation_distribution(w, P).sum() == pytest.approx(1.0, abs=1e-9)


def test_grover_phase_distribution_symmetric():
    d = grover_phase_distribution(16, 3, 9)
    assert d.sum() == pytest.approx(1.0)
    assert np.allclose(d[1:], d[1:][::-1])


def test_count_zero_exact():
    o = OracleSpec.from_marked(64, [])
    for s in range(20):
        est, _ = approx_count(o, 0.1, 0.05, np.random.default_rng(s))
        assert est == 0


def test_count_all_marked_exact_when_phase_aligned():
    # c chosen so P = 8: theta = pi/4 for t = |X| on the doubled domain, omega = 1/4
    c = 8 * math.pi / 8
    o = OracleSpec.from_marked(32, range(32))
    est, led = approx_count(o, c / 4, 0.1, np.random.default_rng(0))
    assert est == 32


def test_count_band_and_single_run_mass():
    o = OracleSpec.from_marked(64, range(16))
    rng = np.random.default_rng(5)
    ok = sum(abs(approx_count(o, 0.1, 0.05, rng)[0] - 16) < 6.4 for _ in range(2000))
    assert ok / 2000 >= 0.95
    assert count_in_band_mass(64, 16, 0.1) >= 8 / math.pi**2


@settings(max_examples=40)
@given(st.integers(1, 200), st.data(), st.floats(0.02, 0.9))
def test_count_estimate_in_range(N, data, c):
    t = data.draw(st.integers(0, N))
    o = OracleSpec.from_marked(N, range(t))
    est, led = approx_count(o, c, 0.2, np.random.default_rng(t))
    assert 0 <= est <= N
    assert led.rounds == led.quantum_messages


def test_johnson_gap_bruteforce():
    from itertools import combinations

    subsets = list(combinations(range(9), 3))
    idx = {s: i for i, s in enumerate(subsets)}
    T = np.zeros((len(subsets), len(subsets)))
    for s in subsets:
        for out in s:
            for inn in set(range(9)) - set(s):
                t = tuple(sorted(set(s) - {out} | {inn}))
                T[idx[s], idx[t]] += 1 / (3 * 6)
    ev = np.sort(np.linalg.eigvalsh(T))[::-1]
    assert 1 - ev[1] == pytest.approx(johnson_gap(9, 3)) == pytest.approx(0.5)
    assert johnson_gap(10, 1) == 1.0
    assert 1 / 1.02 <= johnson_gap(10**4, 100) * 100 <= 1.02
    with pytest.raises(ParameterError):
        johnson_gap(5, 5)


def test_walk_cost_formula():
    costs = WalkCosts(setup=(1, 4), update=(2, 2), checking=(3, 5), gap=0.25)
    s = WalkSchedule.for_params(0.25, 0.1, 0.25)
    assert s.updates_per_reflection == 8
    o = OracleSpec.from_marked(10, [])
    x, led = walk_search(costs, o, 0.25, 0.1, np.random.default_rng(0))
    assert x is None
    per_r = 1 + 4 * (8 * 2 + 3) + 3
    per_m = 4 + 4 * (8 * 2 + 5) + 5
    assert (led.rounds, led.quantum_messages) == (s.attempts * per_r, s.attempts * per_m)
    with pytest.raises(ParameterError):
        WalkCosts((0, 0), (0, 0), (0, 0), gap=0.0)


def test_walk_search_johnson_16_4():
    # 4-subsets of 16 containing referee 0 are marked: eps_f = C(15,3)/C(16,4) = 4/16
    from itertools import combinations

    subsets = list(combinations(range(16), 4))
    marked = [s for s in subsets if 0 in s]
    assert len(marked) / len(subsets) == pytest.approx(4 / 16)
    o = OracleSpec.from_marked(subsets, marked)
    costs = WalkCosts((4, 4), (2, 2), (2, 2), johnson_gap(16, 4))
    rng = np.random.default_rng(9)
    alpha = 0.05
    found = 0
    for _ in range(10**4):
        x, _ = walk_search(costs, o, 4 / 16, alpha, rng)
        if x is not None:
            assert 0 in x
            found += 1
    assert found / 10**4 >= 1 - alpha


def test_walk_search_checking_error_hurts():
    o = OracleSpec.from_marked(4, range(4))
    costs = WalkCosts((1, 1), (1, 1), (1, 1), 1.0)
    rng = np.random.default_rng(0)
    got = [walk_search(costs, o, 1.0, 0.5, rng, checking_error=1.0)[0] for _ in range(50)]
    assert all(x is None for x in got)
