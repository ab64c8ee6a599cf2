"""Leader election on graphs with known mixing time: referees found by random walks.

Walks use the max-degree lazy chain: a step draws a symbol c in {0..2*maxdeg-1}
and moves through port c when c < deg, otherwise stays. A walk of length L is
therefore a string in {0..2*maxdeg-1}^L, which is the search domain of the
quantum phase.
"""
from __future__ import annotations

import math

import numpy as np

from ..graphs import transition_matrix, walk_distribution
from ..netmodel import Graph, ParameterError, RandomSource, assign_ranks, sample_candidates
from ..qprims import DEFAULT_CONSTANTS, GroverSchedule, OracleSpec, QConstants, grover_search
from .common import LEOutcome, RunContext, finish_statuses


def walk_checking_cost(length: int) -> int:
    # the initiator ships the remaining choice string hop by hop, then the answer comes back
    return length * (length + 1) // 2 + length


def rw_round_budget(n: int, tau: int, k: int, constants: QConstants = DEFAULT_CONSTANTS) -> int:
    L = 2 * tau
    c = walk_checking_cost(L)
    return k * L + GroverSchedule.for_params(k / n, 1 / n**2, constants).cost(c, c).rounds


class WalkChain:
    """The max-degree lazy walk of a graph, with replay and conditioned sampling."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.symbols = 2 * graph.max_degree
        self.P = transition_matrix(graph, max_degree_walk=True)
        self.table = self._port_table() if graph.n * self.symbols <= 2**25 else None

    def _port_table(self) -> np.ndarray:
        """table[v, c] = node reached from v with symbol c."""
        g = self.graph
        table = np.repeat(np.arange(g.n, dtype=np.int64)[:, None], self.symbols, axis=1)
        rows = np.repeat(np.arange(g.n), g.degrees)
        cols = np.arange(g.indices.size) - np.repeat(g.indptr[:-1], g.degrees)
        table[rows, cols] = g.indices
        return table

    def step(self, pos: np.ndarray, sym: np.ndarray) -> np.ndarray:
        if self.table is not None:
            return self.table[pos, sym]
        g = self.graph
        moves = sym < g.degrees[pos]
        out = pos.copy()
        out[moves] = g.indices[g.indptr[pos[moves]] + sym[moves]]
        return out

    def replay(self, start: int, string: tuple[int, ...]) -> int:
        pos = np.array([start])
        for c in string:
            pos = self.step(pos, np.array([c]))
        return int(pos[0])

    def walks(self, starts: np.ndarray, symbols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Walk from each start with one column of ``symbols`` per walk; returns endpoints and move counts."""
        pos = np.asarray(starts, dtype=np.int64).copy()
        moves = np.zeros(pos.size, dtype=np.int64)
        for row in symbols:
            new = self.step(pos, row)
            moves += new != pos
            pos = new
        return pos, moves

    def endpoint_distribution(self, starts: np.ndarray, length: int, dense_limit: int = 4096) -> np.ndarray:
        """Rows of P^length for the given starts; P^length is cached for desk-scale graphs."""
        if self.graph.n > dense_limit:
            return walk_distribution(self.P, starts, length)
        key = ("walk-power", length)
        power = self.graph.cache.get(key)
        if power is None:
            power = np.linalg.matrix_power(self.P.toarray(), length)
            self.graph.cache[key] = power
        return power[starts]

    def strings_ending_in(
        self, start: int, length: int, targets: np.ndarray, rng: np.random.Generator, batch: int = 256, tries: int = 4
    ) -> tuple[int, ...] | None:
        """Rejection sampler: a uniform string whose walk ends in ``targets`` (None if unlucky)."""
        hit = np.zeros(self.graph.n, dtype=bool)
        hit[targets] = True
        for _ in range(tries):
            syms = rng.integers(0, self.symbols, size=(length, batch))
            pos = np.full(batch, start, dtype=np.int64)
            for row in syms:
                pos = self.step(pos, row)
            good = np.flatnonzero(hit[pos])
            if good.size:
                return tuple(int(c) for c in syms[:, good[0]])
        return None

    def bridge(self, start: int, end: int, length: int, rng: np.random.Generator) -> tuple[int, ...]:
        """Uniform choice string among those leading from ``start`` to ``end`` in ``length`` steps."""
        g = self.graph
        h = [np.zeros(g.n)]
        h[0][end] = 1.0
        for _ in range(length - 1):
            h.append(self.P @ h[-1])
        out = []
        u = start
        for i in range(length):
            rest = h[length - 1 - i]
            row = self.P.getrow(u)
            w = row.data * rest[row.indices]
            nxt = int(row.indices[rng.choice(w.size, p=w / w.sum())])
            if nxt == u:
                out.append(int(rng.integers(g.degrees[u], self.symbols)))
            else:
                out.append(int(np.searchsorted(g.neighbors(u), nxt)))
            u = nxt
        return tuple(out)


def walk_oracle(chain: WalkChain, start: int, length: int, dist: np.ndarray, referees: np.ndarray) -> OracleSpec:
    mass = float(dist[referees].sum()) if referees.size else 0.0
    ref_set = frozenset(referees.tolist())
    weights = dist[referees]

    def sample(rng: np.random.Generator) -> tuple[int, ...]:
        found = chain.strings_ending_in(start, length, referees, rng)
        if found is not None:
            return found
        end = int(referees[rng.choice(referees.size, p=weights / weights.sum())])
        return chain.bridge(start, end, length, rng)

    c = walk_checking_cost(length)
    return OracleSpec(
        domain_size=chain.symbols ** length,
        marked_fraction=min(1.0, mass),
        is_marked=lambda s: chain.replay(start, s) in ref_set,
        sample_marked=sample if mass > 0 else None,
        checking_rounds=c,
        checking_messages=c,
    )


def quantum_rw_le(
    graph: Graph, tau: int, k: int, rng: RandomSource, constants: QConstants = DEFAULT_CONSTANTS
) -> LEOutcome:
    n = graph.n
    if tau < 1 or k < 1:
        raise ParameterError("need tau >= 1 and k >= 1")
    L = 2 * tau
    ctx = RunContext(constants)
    budget = rw_round_budget(n, tau, k, constants)
    eps, alpha = min(1.0, k / n), 1 / n**2
    candidates = sorted(sample_candidates(graph, rng))
    if not candidates:
        ctx.tick(budget)
        return LEOutcome(finish_statuses(n, []), ctx.ledger, budget, ctx, info={"no_candidates": True})
    ranks = assign_ranks(candidates, n, rng)
    chain = graph.cache.get("walk-chain")
    if chain is None:
        chain = graph.cache["walk-chain"] = WalkChain(graph)

    best = np.zeros(n, dtype=np.int64)
    chunk = max(1, 2**16 // k)
    for i in range(0, len(candidates), chunk):
        group = candidates[i:i + chunk]
        # each candidate draws its own walks' choices from its private stream
        syms = np.concatenate(
            [rng.node(v).integers(0, chain.symbols, size=(L, k), dtype=np.int64) for v in group], axis=1
        )
        ends, moves = chain.walks(np.repeat(group, k), syms)
        for j, v in enumerate(group):
            ctx.send("random walks", moves[j * k:(j + 1) * k].sum())
            np.maximum.at(best, ends[j * k:(j + 1) * k], ranks[v])
    ctx.tick(k * L)

    dist = chain.endpoint_distribution(np.array(candidates), L)
    c = walk_checking_cost(L)
    per_search = GroverSchedule.for_params(eps, alpha, constants).cost(c, c)
    elected = []
    for i, v in enumerate(candidates):
        oracle = walk_oracle(chain, v, L, dist[i], np.flatnonzero(best > ranks[v]))
        found, _ = grover_search(oracle, eps, alpha, rng.node(v), constants)
        if found is None:
            elected.append(v)
    ctx.charge("search walk strings", "grover", (eps, alpha, c), per_search.quantum_messages, len(candidates))
    ctx.tick(per_search.rounds)
    return LEOutcome(finish_statuses(n, elected), ctx.ledger, budget, ctx, candidates, ranks, {"walk_length": L})


def default_k(n: int, tau: int) -> int:
    return max(1, math.ceil(tau ** (2 / 3) * n ** (1 / 3)))
