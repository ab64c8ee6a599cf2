import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcongest.netmodel import (
    ContractError,
    CostLedger,
    DegenerateSampling,
    Graph,
    NodeState,
    RandomSource,
    Status,
    assign_ranks,
    candidate_probability,
    read_edge_list,
    record_cost,
    sample_candidates,
    write_edge_list,
)


def test_graph_ports_sorted_and_symmetric():
    g = Graph(4, [(2, 0), (0, 1), (3, 2), (1, 2)])
    assert list(g.neighbors(2)) == [0, 1, 3]
    assert g.port(2, 2) == 3
    assert g.m == 4 and g.degrees.sum() == 2 * g.m
    assert g.is_symmetric()
    assert g.has_edge(0, 2) and not g.has_edge(0, 3)


@pytest.mark.parametrize(
    "n,edges",
    [(3, [(0, 0), (1, 2)]), (3, [(0, 1), (1, 0), (1, 2)]), (3, [(0, 1)]), (2, [(0, 5)])],
)
def test_graph_rejects_invalid(n, edges):
    with pytest.raises(ContractError):
        Graph(n, edges)


def test_edge_list_roundtrip(tmp_path):
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])
    p = tmp_path / "g.txt"
    write_edge_list(g, p)
    assert p.read_text().splitlines()[0] == "5 6"
    h = read_edge_list(p)
    assert np.array_equal(h.edges(), g.edges())


def test_edge_list_header_mismatch(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("3 3\n0 1\n1 2\n")
    with pytest.raises(ContractError):
        read_edge_list(p)


def test_status_transitions():
    s = NodeState()
    s.decide(Status.NON_ELECTED)
    s.decide(Status.NON_ELECTED)
    with pytest.raises(ContractError):
        s.decide(Status.ELECTED)
    with pytest.raises(ContractError):
        NodeState().decide(Status.UNDECIDED)


def test_record_cost():
    led = record_cost(CostLedger(), 2, 2, 0)
    assert (led.rounds, led.classical_messages, led.total) == (2, 2, 2)
    with pytest.raises(ContractError):
        led.record_cost(rounds=-1)


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50)), max_size=8))
def test_charges_commute(deltas):
    a, b = CostLedger(), CostLedger()
    for d in deltas:
        a.record_cost(*d)
    for d in reversed(deltas):
        b.record_cost(*d)
    assert a == b


def test_probability_clamp():
    assert candidate_probability(2) == 1.0
    assert candidate_probability(38) == 1.0
    assert candidate_probability(1000) == pytest.approx(12 * math.log(1000) / 1000)


def test_sampling_deterministic():
    a = sample_candidates(500, RandomSource(7))
    b = sample_candidates(500, RandomSource(7))
    assert a == b
    assert sample_candidates(2, RandomSource(1)) == {0, 1}
    with pytest.raises(ContractError):
        sample_candidates(1, RandomSource(1))


def test_candidate_count_concentration():
    # each trial's count is binomial; draw it directly for the large grid point
    n = 10**6
    rng = np.random.default_rng(3)
    counts = rng.binomial(n, candidate_probability(n), size=10**4)
    ok = (counts >= 1) & (counts <= 24 * math.log(n))
    assert ok.mean() >= 0.99


def test_candidate_count_tail_n256():
    n, trials = 256, 10**4
    bad = 0
    for s in range(trials):
        c = len(sample_candidates(n, RandomSource(s)))
        bad += c == 0 or c > 24 * math.log(n)
    sigma = math.sqrt(trials * 2 / n**2)
    assert bad <= trials * 2 / n**2 + 3 * sigma + 1


def test_ranks():
    r = assign_ranks({3}, 10, RandomSource(0))
    assert 1 <= r[3] <= 10**4
    assert assign_ranks({1, 2}, 10, RandomSource(5)) == assign_ranks({1, 2}, 10, RandomSource(5))
    with pytest.raises(DegenerateSampling):
        assign_ranks(set(), 10, RandomSource(0))


def test_rank_collision_rate():
    # birthday bound: <= C(24 ln n, 2) / n^4 per trial at n=100
    n, trials = 100, 10**5
    k = int(24 * math.log(n))
    rng = np.random.default_rng(11)
    ranks = rng.integers(1, n**4 + 1, size=(trials, k))
    ranks.sort(axis=1)
    collisions = np.any(ranks[:, 1:] == ranks[:, :-1], axis=1).mean()
    assert collisions <= 2e-3
    assert math.comb(k, 2) / n**4 <= 2e-3


@settings(max_examples=25)
@given(st.integers(0, 2**32), st.integers(0, 1000))
def test_node_streams_reproducible(seed, v):
    assert RandomSource(seed).node(v).integers(1 << 30) == RandomSource(seed).node(v).integers(1 << 30)
