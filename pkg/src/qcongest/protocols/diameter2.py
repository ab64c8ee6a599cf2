"""Leader election on diameter-2 graphs: active candidates walk over k-subsets of referees.

In every iteration each surviving candidate is active with a small
probability. An active candidate v searches, by a quantum walk on the Johnson
graph of k-subsets W of its neighborhood, for a W containing a referee that a
higher-ranked passive candidate can reach. Passive candidates serve the
walk's Checking through their own decentralized Grover searches, which they
must run at every Checking slot of the synchronized schedule.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..graphs import has_diameter_at_most_2
from ..netmodel import Graph, ParameterError, RandomSource, assign_ranks, sample_candidates
from ..qprims import (
    DEFAULT_CONSTANTS,
    GroverSchedule,
    OracleSpec,
    QConstants,
    WalkCosts,
    WalkSchedule,
    johnson_gap,
    walk_search,
)
from .common import LEOutcome, RunContext, finish_statuses


def subset_gap(degree: int, k: int) -> float:
    # with k = degree the walk has a single state and mixes at once
    return 1.0 if k >= degree else johnson_gap(degree, k)


def qw_iterations(n: int) -> int:
    return math.ceil(math.log2(n) ** 3)


def qw_active_probability(n: int) -> float:
    return 1.0 / math.ceil(math.log2(n) ** 2)


@dataclass(frozen=True)
class QWSchedule:
    """Worst-case (degree n-1) synchronized schedule of one iteration."""

    n: int
    k: int
    constants: QConstants = DEFAULT_CONSTANTS

    @property
    def inner_alpha(self) -> float:
        return 1.0 / self.n**3

    def passive_search(self, degree: int) -> GroverSchedule:
        return GroverSchedule.for_params(1.0 / degree, self.inner_alpha, self.constants)

    @property
    def central_search(self) -> GroverSchedule:
        return GroverSchedule.for_params(1.0 / self.k, self.inner_alpha, self.constants)

    @property
    def checking_rounds(self) -> int:
        # decentralized search, rank hand-off to the found referee, centralized search
        return self.passive_search(self.n - 1).cost(2, 2).rounds + 1 + self.central_search.cost(2, 2).rounds

    @property
    def central_messages(self) -> int:
        return self.central_search.cost(2, 2).quantum_messages

    def walk_costs(self, degree: int) -> WalkCosts:
        return WalkCosts(
            setup=(1, self.k),
            update=(2, 2),
            checking=(self.checking_rounds, self.central_messages),
            gap=subset_gap(degree, self.k),
        )

    def walk(self, degree: int) -> WalkSchedule:
        return WalkSchedule.for_params(self.k / degree, 1.0 / self.n**2, subset_gap(degree, self.k), self.constants)

    @property
    def checking_slots(self) -> int:
        """Checking invocations per iteration, including the final decision."""
        return self.walk(self.n - 1).checkings + 1

    @property
    def iteration_rounds(self) -> int:
        w = self.n - 1
        return self.walk(w).cost(self.walk_costs(w)).rounds + self.checking_rounds

    def round_budget(self) -> int:
        return qw_iterations(self.n) * self.iteration_rounds


def marked_subset_fraction(degree: int, hits: int, k: int) -> float:
    """Fraction of k-subsets of a degree-sized set meeting a fixed subset of size ``hits``."""
    if hits <= 0:
        return 0.0
    if degree - hits < k:
        return 1.0
    miss = math.exp(math.lgamma(degree - hits + 1) - math.lgamma(degree - hits - k + 1)
                    - math.lgamma(degree + 1) + math.lgamma(degree - k + 1))
    return 1.0 - miss


def subset_oracle(nbrs: np.ndarray, hit: np.ndarray, k: int, checking: tuple[int, int]) -> OracleSpec:
    """Oracle over k-subsets W of ``nbrs``; W is marked iff it meets ``hit`` (a mask over nbrs)."""
    d = nbrs.size
    h = int(hit.sum())

    def sample(rng: np.random.Generator) -> tuple[int, ...]:
        while True:
            pick = rng.choice(d, size=k, replace=False)
            if hit[pick].any():
                return tuple(sorted(nbrs[pick].tolist()))

    hit_nodes = frozenset(nbrs[hit].tolist())
    return OracleSpec(
        domain_size=math.comb(d, k),
        marked_fraction=marked_subset_fraction(d, h, k),
        is_marked=lambda W: any(w in hit_nodes for w in W),
        sample_marked=sample if h else None,
        checking_rounds=checking[0],
        checking_messages=checking[1],
    )


def reachable_referees(adj: np.ndarray, v: int, challengers: list[int]) -> np.ndarray:
    """Mask over N(v) of referees adjacent to (or equal to) some challenger."""
    nbrs = np.flatnonzero(adj[v])
    if not challengers:
        return np.zeros(nbrs.size, dtype=bool)
    ch = np.asarray(challengers)
    closed = adj[ch][:, nbrs].any(axis=0) | np.isin(nbrs, ch)
    return closed


def challenge(
    graph: Graph,
    adj: np.ndarray,
    v: int,
    challengers: list[int],
    passive_count: int,
    sched: QWSchedule,
    rng: np.random.Generator,
) -> tuple[bool, OracleSpec]:
    """One active candidate's walk search and decision; True if it must step down."""
    nbrs = np.flatnonzero(adj[v])
    hit = reachable_referees(adj, v, challengers)
    costs = sched.walk_costs(nbrs.size)
    oracle = subset_oracle(nbrs, hit, sched.k, costs.checking)
    err = (passive_count + 1) * sched.inner_alpha
    found, _ = walk_search(
        costs, oracle, sched.k / nbrs.size, 1.0 / sched.n**2, rng, sched.constants, checking_error=err
    )
    # the decision re-runs Checking on W, which fails only on a nested search error
    return found is not None and rng.random() >= err, oracle


def quantum_qw_le(
    graph: Graph, k: int, rng: RandomSource, constants: QConstants = DEFAULT_CONSTANTS
) -> LEOutcome:
    n = graph.n
    if "diameter<=2" not in graph.cache:
        graph.cache["diameter<=2"] = has_diameter_at_most_2(graph)
    if not graph.cache["diameter<=2"]:
        raise ParameterError("graph must have diameter at most 2")
    if not 1 <= k <= graph.min_degree:
        raise ParameterError("need 1 <= k <= min degree")
    sched = QWSchedule(n, k, constants)
    ctx = RunContext(constants)
    budget = sched.round_budget()
    candidates = sorted(sample_candidates(graph, rng))
    if not candidates:
        ctx.tick(budget)
        return LEOutcome(finish_statuses(n, []), ctx.ledger, budget, ctx, info={"no_candidates": True})
    ranks = assign_ranks(candidates, n, rng)
    if "dense" not in graph.cache:
        graph.cache["dense"] = graph.dense_adjacency()
    adj = graph.cache["dense"]

    iters = qw_iterations(n)
    p_act = qw_active_probability(n)
    coins = {v: rng.node(v).random(iters) < p_act for v in candidates}
    alive = set(candidates)
    slots = sched.checking_slots
    passive_slots: Counter = Counter()
    eliminated_at: dict[int, int] = {}
    active_counts = []
    for it in range(iters):
        active = sorted(v for v in alive if coins[v][it])
        passive = [v for v in alive if not coins[v][it]]
        for u in passive:
            passive_slots[graph.degree(u)] += slots
        active_counts.append(len(active))
        losers = []
        for v in active:
            higher = [u for u in passive if ranks[u] > ranks[v]]
            lost, oracle = challenge(graph, adj, v, higher, len(passive), sched, rng.node(v))
            d = graph.degree(v)
            walk = sched.walk(d)
            msgs = walk.cost(sched.walk_costs(d)).quantum_messages
            ctx.charge(
                "walk search", "walk",
                (k / d, 1.0 / n**2, subset_gap(d, k), k, 2, sched.central_messages), msgs,
            )
            ctx.charge("decision", "grover", (1.0 / k, sched.inner_alpha, 2), sched.central_messages)
            if lost:
                losers.append(v)
        for v in losers:
            alive.discard(v)
            eliminated_at[v] = it
        ctx.tick(sched.iteration_rounds)

    for deg, count in sorted(passive_slots.items()):
        s = sched.passive_search(deg)
        ctx.charge("passive searches", "grover", (1.0 / deg, sched.inner_alpha, 2), s.cost(2, 2).quantum_messages, count)
        ctx.charge("rank hand-off", "quantum", (1,), 1, count)

    info = {"eliminated_at": eliminated_at, "active_counts": active_counts}
    return LEOutcome(finish_statuses(n, sorted(alive)), ctx.ledger, budget, ctx, candidates, ranks, info)


def default_k(n: int) -> int:
    return max(1, math.ceil(n ** (2 / 3)))
