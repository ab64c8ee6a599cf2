"""Implicit agreement on complete networks with a shared coin.

Candidates estimate the fraction of ones by approximate counting, then
repeatedly compare it with a shared uniform threshold. Decided candidates
advertise their value to a few neighbors; undecided ones Grover-search for
an advertised value and adopt it.
"""
from __future__ import annotations

import math

import numpy as np

from ..netmodel import Graph, ParameterError, RandomSource, first_ports, sample_candidates
from ..qprims import (
    DEFAULT_CONSTANTS,
    GroverSchedule,
    OracleSpec,
    QConstants,
    approx_count,
    approx_count_cost,
    grover_search,
)
from .common import AgreementOutcome, RunContext
from .complete import mask_oracle, require_complete

EPS_MAX = 0.5


def agreement_iterations(n: int) -> int:
    return math.ceil(math.log(4 * n, 5)) + 1


def fanout(n: int, gamma: float) -> int:
    return max(1, math.ceil(n ** (1 / 3 - gamma)))


def detection_eps(n: int, gamma: float) -> float:
    return n ** (-2 / 3 - gamma)


def agreement_round_budget(n: int, eps: float, gamma: float, constants: QConstants = DEFAULT_CONSTANTS) -> int:
    est = approx_count_cost(eps, 1 / (2 * n**2), (2, 2), constants).rounds
    detect = GroverSchedule.for_params(detection_eps(n, gamma), 1 / (4 * n**3), constants).cost(2, 2).rounds
    return est + agreement_iterations(n) * (1 + detect)


def check_agreement_params(n: int, eps: float, gamma: float) -> None:
    if not 1 / n <= eps < EPS_MAX:
        raise ParameterError(f"eps must lie in [1/n, {EPS_MAX})")
    if not 0 <= gamma <= 1 / 3:
        raise ParameterError("gamma must lie in [0, 1/3]")


def quantum_agreement(
    graph: Graph,
    inputs: np.ndarray,
    eps: float,
    gamma: float,
    rng: RandomSource,
    constants: QConstants = DEFAULT_CONSTANTS,
) -> AgreementOutcome:
    require_complete(graph)
    n = graph.n
    inputs = np.asarray(inputs, dtype=np.int64)
    if inputs.shape != (n,) or not np.isin(inputs, (0, 1)).all():
        raise ParameterError("inputs must be one bit per node")
    check_agreement_params(n, eps, gamma)
    ctx = RunContext(constants)
    budget = agreement_round_budget(n, eps, gamma, constants)
    decisions = np.full(n, -1, dtype=np.int64)
    candidates = sorted(sample_candidates(graph, rng))
    if not candidates:
        ctx.tick(budget)
        return AgreementOutcome(decisions, inputs, ctx.ledger, budget, ctx, info={"no_candidates": True})

    # estimation
    alpha1 = 1 / (2 * n**2)
    ones = OracleSpec.from_marked(n, np.flatnonzero(inputs).tolist())
    q = {}
    for v in candidates:
        est, cost = approx_count(ones, eps, alpha1, rng.node(v), constants)
        q[v] = est / n
    per_count = approx_count_cost(eps, alpha1, (2, 2), constants)
    ctx.charge("estimation", "count", (eps, alpha1, 2), per_count.quantum_messages, len(candidates))
    ctx.tick(per_count.rounds)
    truth = inputs.mean()
    est_ok = all(abs(q[v] - truth) <= eps for v in candidates)

    # agreement iterations
    eps2, alpha2 = detection_eps(n, gamma), 1 / (4 * n**3)
    detect = GroverSchedule.for_params(eps2, alpha2, constants).cost(2, 2)
    fan = fanout(n, gamma)
    active = list(candidates)
    shared = rng.shared()
    undecided_iters = 0
    iterations_run = 0
    errors = 0
    for _ in range(agreement_iterations(n)):
        r = shared.random()
        if active:
            iterations_run += 1
        holding = np.full(n, -1, dtype=np.int64)
        undecided = []
        sent = 0
        for v in active:
            if abs(q[v] - r) <= eps:
                undecided.append(v)
                continue
            bit = int(q[v] > r)
            decisions[v] = bit
            ports = first_ports(graph, v, fan)
            clash = (holding[ports] >= 0) & (holding[ports] != bit)
            errors += int(clash.any())
            holding[ports] = np.where(holding[ports] < 0, bit, holding[ports])
            sent += ports.size
        ctx.send("advertise decision", sent)
        ctx.tick(1)
        undecided_iters += bool(undecided)
        oracle = mask_oracle(holding >= 0)
        still = []
        for u in undecided:
            w, _ = grover_search(oracle, eps2, alpha2, rng.node(u), constants)
            if w is None:
                still.append(u)
            else:
                decisions[u] = holding[w]
        ctx.charge("detect decision", "grover", (eps2, alpha2, 2), detect.quantum_messages, len(undecided))
        ctx.tick(detect.rounds)
        active = still

    info = {
        "est_ok": est_ok,
        "estimates": q,
        "undecided_iterations": undecided_iters,
        "iterations_with_candidates": iterations_run,
        "holder_conflicts": errors,
    }
    return AgreementOutcome(decisions, inputs, ctx.ledger, budget, ctx, candidates, info)


def half_inputs(n: int) -> np.ndarray:
    return (np.arange(n) % 2).astype(np.int64)
