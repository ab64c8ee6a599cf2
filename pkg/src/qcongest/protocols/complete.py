"""Leader election on complete networks: rank referees, then Grover for a contradiction."""
from __future__ import annotations

import math

import numpy as np

from ..netmodel import (
    Graph,
    ParameterError,
    RandomSource,
    assign_ranks,
    first_ports,
    sample_candidates,
)
from ..qprims import DEFAULT_CONSTANTS, GroverSchedule, OracleSpec, QConstants, grover_search
from .common import LEOutcome, RunContext, finish_statuses


def mask_oracle(mask: np.ndarray, checking: tuple[int, int] = (2, 2)) -> OracleSpec:
    """Oracle over node ids 0..n-1 whose marked set is ``mask``."""
    marked = np.flatnonzero(mask)

    def sample(rng: np.random.Generator) -> int:
        return int(marked[rng.integers(marked.size)])

    return OracleSpec(
        domain_size=mask.size,
        marked_fraction=marked.size / mask.size,
        is_marked=lambda w: bool(mask[w]),
        sample_marked=sample if marked.size else None,
        checking_rounds=checking[0],
        checking_messages=checking[1],
        marked_count=int(marked.size),
    )


def require_complete(graph: Graph) -> None:
    if graph.m != graph.n * (graph.n - 1) // 2:
        raise ParameterError("graph must be complete")


def complete_round_budget(n: int, k: int, constants: QConstants = DEFAULT_CONSTANTS) -> int:
    return 1 + GroverSchedule.for_params(k / n, 1 / n**2, constants).cost(2, 2).rounds


def deposit_ranks(graph: Graph, ranks: dict[int, int], fanout: int) -> np.ndarray:
    """Highest rank each node receives when every candidate contacts its first ``fanout`` ports."""
    best = np.zeros(graph.n, dtype=np.int64)
    for v, r in ranks.items():
        np.maximum.at(best, first_ports(graph, v, fanout), r)
    return best


def quantum_le_complete(
    graph: Graph,
    k: int,
    rng: RandomSource,
    constants: QConstants = DEFAULT_CONSTANTS,
    candidates: list[int] | None = None,
) -> LEOutcome:
    """``candidates`` overrides the random candidate sampling (for controlled experiments)."""
    require_complete(graph)
    n = graph.n
    if not 1 <= k <= n - 1:
        raise ParameterError("need 1 <= k <= n-1")
    ctx = RunContext(constants)
    eps, alpha = k / n, 1 / n**2
    budget = complete_round_budget(n, k, constants)
    candidates = sorted(sample_candidates(graph, rng) if candidates is None else candidates)
    if not candidates:
        ctx.tick(budget)
        return LEOutcome(finish_statuses(n, []), ctx.ledger, budget, ctx, info={"no_candidates": True})
    ranks = assign_ranks(candidates, n, rng)

    ctx.tick(1)
    ctx.send("contact referees", k * len(candidates))
    best = deposit_ranks(graph, ranks, k)

    elected = []
    per_search = GroverSchedule.for_params(eps, alpha, constants).cost(2, 2)
    for v in candidates:
        found, _ = grover_search(mask_oracle(best > ranks[v]), eps, alpha, rng.node(v), constants)
        if found is None:
            elected.append(v)
    ctx.charge("search referees", "grover", (eps, alpha, 2), per_search.quantum_messages, len(candidates))
    ctx.tick(per_search.rounds)
    return LEOutcome(finish_statuses(n, elected), ctx.ledger, budget, ctx, candidates, ranks)


def default_k(n: int) -> int:
    return max(1, math.ceil(n ** (1 / 3)))
