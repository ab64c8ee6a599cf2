import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcongest import graphs
from qcongest.netmodel import ParameterError, RandomSource, Status
from qcongest.protocols import (
    maximal_matching_cv,
    quantum_agreement,
    quantum_general_le,
    quantum_le_complete,
    quantum_qw_le,
    quantum_rw_le,
)
from qcongest.protocols.agreement import agreement_iterations, half_inputs
from qcongest.protocols.complete import default_k
from qcongest.protocols.diameter2 import QWSchedule, challenge, marked_subset_fraction
from qcongest.protocols.matching import is_maximal, three_coloring
from qcongest.protocols.random_walk import WalkChain


def assert_ledger_consistent(out):
    ctx = out.context
    assert ctx.recount_classical() == out.ledger.classical_messages
    assert ctx.recount_quantum() == out.ledger.quantum_messages
    assert out.ledger.rounds == out.budget_rounds


def assert_terminal(out):
    assert all(out.status_of(v) is not Status.UNDECIDED for v in range(out.status.size))


def assert_top_survives(out):
    top = out.top_candidate
    if top is not None:
        assert out.status_of(top) is Status.ELECTED


class TestComplete:
    def test_unique_leader_rate(self):
        g = graphs.complete(256)
        outs = [quantum_le_complete(g, default_k(256), RandomSource(s)) for s in range(60)]
        assert sum(o.valid for o in outs) >= 57
        for o in outs:
            assert_ledger_consistent(o)
            assert_terminal(o)
            assert_top_survives(o)

    def test_single_candidate_elected(self):
        g = graphs.complete(64)
        for s in range(10):
            o = quantum_le_complete(g, 4, RandomSource(s), candidates=[17])
            assert o.elected == {17}

    def test_zero_candidates_invalid(self):
        o = quantum_le_complete(graphs.complete(64), 4, RandomSource(0), candidates=[])
        assert not o.valid and o.info["no_candidates"]
        assert o.ledger.rounds == o.budget_rounds

    def test_checking_charge(self):
        o = quantum_le_complete(graphs.complete(100), 5, RandomSource(1), candidates=[3])
        assert o.ledger.classical_messages == 5
        (q,) = [c for c in o.context.trace if c.kind == "grover"]
        assert q.params[2] == 2

    def test_rejects_bad_input(self):
        with pytest.raises(ParameterError):
            quantum_le_complete(graphs.cycle(5), 1, RandomSource(0))
        with pytest.raises(ParameterError):
            quantum_le_complete(graphs.complete(5), 5, RandomSource(0))

    def test_seed_determinism(self):
        g = graphs.complete(300)
        a = quantum_le_complete(g, 7, RandomSource(5))
        b = quantum_le_complete(g, 7, RandomSource(5))
        assert a.ledger == b.ledger and np.array_equal(a.status, b.status)


class TestRandomWalk:
    def test_complete_tau1_within_4x(self):
        g = graphs.complete(128)
        k = default_k(128)
        for s in range(5):
            a = quantum_le_complete(g, k, RandomSource(s)).ledger.total
            b = quantum_rw_le(g, 1, k, RandomSource(s)).ledger.total
            assert a / 4 <= b <= 4 * a

    def test_hypercube_leader(self):
        g = graphs.hypercube(7)
        tau = graphs.estimate_mixing_time(g, starts=[0])
        k = math.ceil(tau ** (2 / 3) * g.n ** (1 / 3))
        outs = [quantum_rw_le(g, tau, k, RandomSource(s)) for s in range(20)]
        assert sum(o.valid for o in outs) >= 19
        for o in outs:
            assert_ledger_consistent(o)
            assert_top_survives(o)

    def test_walk_endpoints_match_matrix_power(self):
        g = graphs.hypercube(5)
        chain = WalkChain(g)
        L = 2 * graphs.estimate_mixing_time(g, 1 / g.n, starts=[0], max_degree_walk=True)
        syms = np.random.default_rng(0).integers(0, chain.symbols, size=(L, 200000))
        ends, _ = chain.walks(np.zeros(200000, dtype=np.int64), syms)
        emp = np.bincount(ends, minlength=g.n) / ends.size
        exact = chain.endpoint_distribution(np.array([0]), L)[0]
        assert 0.5 * np.abs(exact - 1 / g.n).sum() <= 1 / g.n
        assert 0.5 * np.abs(emp - exact).sum() < 0.02

    def test_bridge_and_rejection_samplers(self):
        g = graphs.random_regular(30, 4, np.random.default_rng(2))
        chain = WalkChain(g)
        rng = np.random.default_rng(3)
        for end in (0, 7, 29):
            s = chain.bridge(5, end, 6, rng)
            assert len(s) == 6 and chain.replay(5, s) == end
        s = chain.strings_ending_in(5, 6, np.array([1, 2]), rng)
        assert chain.replay(5, s) in (1, 2)

    def test_port_table_matches_csr(self):
        g = graphs.star(6)
        chain = WalkChain(g)
        assert chain.replay(0, (2,)) == 3
        assert chain.replay(3, (0,)) == 0 and chain.replay(3, (1,)) == 3


@pytest.fixture(scope="module")
def d2_graph():
    return graphs.diameter2_random(128, np.random.default_rng(0), p=2 * 128 ** (-1 / 3))


class TestDiameterTwo:
    def test_subset_fraction_bruteforce(self):
        d, k = 9, 3
        hit = {0, 4}
        subs = list(combinations(range(d), k))
        frac = sum(bool(hit & set(s)) for s in subs) / len(subs)
        assert marked_subset_fraction(d, 2, k) == pytest.approx(frac)
        assert marked_subset_fraction(d, 0, k) == 0.0
        assert marked_subset_fraction(5, 3, 3) == 1.0

    def test_top_never_eliminated(self, d2_graph):
        k = math.ceil(128 ** (2 / 3))
        for s in range(15):
            o = quantum_qw_le(d2_graph, k, RandomSource(s))
            assert_top_survives(o)
            assert_ledger_consistent(o)
            assert_terminal(o)

    def test_unique_active_loses(self):
        n = 64
        g = graphs.diameter2_random(n, np.random.default_rng(1), p=0.5)
        k = min(math.ceil(n ** (2 / 3)), g.min_degree)
        sched = QWSchedule(n, k)
        adj = g.dense_adjacency()
        rng = np.random.default_rng(7)
        trials = 10**4
        lost = sum(challenge(g, adj, 3, [40], 1, sched, rng)[0] for _ in range(trials))
        assert lost / trials >= 1 - 3 / n**2
        assert not any(challenge(g, adj, 3, [], 1, sched, rng)[0] for _ in range(200))

    def test_rejects_large_diameter(self):
        with pytest.raises(ParameterError):
            quantum_qw_le(graphs.cycle(12), 1, RandomSource(0))
        with pytest.raises(ParameterError):
            quantum_qw_le(graphs.complete(12), 12, RandomSource(0))


class TestMatching:
    def test_two_fragments(self):
        r = maximal_matching_cv({3: 8, 8: 3}, 16)
        assert r.mate == {3: 8, 8: 3}

    def test_path_of_five(self):
        parent = {0: 1, 1: 2, 2: 3, 3: 4, 4: 3}
        r = maximal_matching_cv(parent, 8)
        assert is_maximal(parent, r.mate)
        edges = {frozenset((v, p)) for v, p in parent.items()}
        for a, b in r.pairs:
            assert frozenset((a, b)) in edges

    @settings(max_examples=200)
    @given(st.integers(2, 40), st.data())
    def test_random_pseudoforests(self, n, data):
        ids = data.draw(st.lists(st.integers(0, 4 * n), min_size=n, max_size=n, unique=True))
        parent = {}
        for i, v in enumerate(ids):
            j = data.draw(st.one_of(st.none(), st.integers(0, n - 1).filter(lambda j, i=i: j != i)))
            parent[v] = None if j is None else ids[j]
        bound = 4 * n + 1
        colors = three_coloring(parent, bound)
        for v, p in parent.items():
            assert colors[v] in (0, 1, 2)
            if p is not None:
                assert colors[v] != colors[p]
        r = maximal_matching_cv(parent, bound)
        assert is_maximal(parent, r.mate)
        seen = [x for pair in r.pairs for x in pair]
        assert len(seen) == len(set(seen))
        for a, b in r.pairs:
            assert parent.get(a) == b or parent.get(b) == a


def _spanning_tree(n, edges):
    par = list(range(n))

    def find(x):
        while par[x] != x:
            par[x] = par[par[x]]
            x = par[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        par[ru] = rv
    return len(edges) == n - 1


class TestTreeMerge:
    def test_halving_and_tree(self):
        g = graphs.gnm(128, round(128**1.5), np.random.default_rng(4))
        for s in range(10):
            o = quantum_general_le(g, RandomSource(s))
            sizes = o.info["clusters_per_phase"]
            for a, b in zip(sizes, sizes[1:]):
                if a >= 2:
                    assert b <= math.ceil(a / 2)
            assert o.valid and o.info["informed"]
            assert _spanning_tree(g.n, o.info["tree_edges"])
            for u, v in o.info["tree_edges"]:
                assert g.has_edge(u, v)
            assert_ledger_consistent(o)

    def test_star_single_phase(self):
        o = quantum_general_le(graphs.star(64), RandomSource(3))
        assert o.info["clusters_per_phase"][1] == 1
        assert o.valid


class TestAgreement:
    def test_unanimous_inputs(self):
        g = graphs.complete(128)
        for b in (0, 1):
            for s in range(10):
                o = quantum_agreement(g, np.full(128, b), 0.2, 2 / 15, RandomSource(s))
                assert o.decided_values <= {b}
                assert_ledger_consistent(o)

    def test_mixed_inputs_agree(self):
        n = 1024
        g = graphs.complete(n)
        outs = [quantum_agreement(g, half_inputs(n), n ** -0.2, 2 / 15, RandomSource(s)) for s in range(40)]
        assert sum(o.valid for o in outs) >= 38
        for o in outs:
            assert len(o.decided_values) <= 1
            assert o.decided_values <= set(o.inputs.tolist())

    def test_parameter_ranges(self):
        g = graphs.complete(64)
        with pytest.raises(ParameterError):
            quantum_agreement(g, half_inputs(64), 0.6, 0.1, RandomSource(0))
        with pytest.raises(ParameterError):
            quantum_agreement(g, half_inputs(64), 0.1, 0.5, RandomSource(0))
        with pytest.raises(ParameterError):
            quantum_agreement(g, np.full(64, 2), 0.1, 0.1, RandomSource(0))

    def test_iteration_count(self):
        assert agreement_iterations(1024) == math.ceil(math.log(4096, 5)) + 1
