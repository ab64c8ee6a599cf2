"""Shared run plumbing: the synchronous clock, the cost trace and outcome records."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..netmodel import CostLedger, ParameterError, Status
from ..qprims import (
    DEFAULT_CONSTANTS,
    GroverSchedule,
    QConstants,
    WalkCosts,
    WalkSchedule,
    approx_count_cost,
)

UNDECIDED, NON_ELECTED, ELECTED = 0, 1, 2
_STATUS = (Status.UNDECIDED, Status.NON_ELECTED, Status.ELECTED)


@dataclass(frozen=True)
class Charge:
    """One trace entry.

    ``kind`` is "classical" (``count`` messages actually sent) or the name of
    a quantum subroutine whose charge is recomputed from ``params``.
    """

    phase: str
    kind: str
    count: int = 1
    params: tuple = ()


def closed_form_messages(charge: Charge, constants: QConstants) -> int:
    """Quantum messages of ``count`` identical subroutine calls, from their parameters alone."""
    k = charge.kind
    if k == "grover":
        eps, alpha, mc = charge.params
        per = GroverSchedule.for_params(eps, alpha, constants).checkings * mc
    elif k == "count":
        c, alpha, mc = charge.params
        per = approx_count_cost(c, alpha, (0, mc), constants).quantum_messages
    elif k == "walk":
        eps, alpha, gap, setup_m, update_m, check_m = charge.params
        costs = WalkCosts((0, setup_m), (0, update_m), (0, check_m), gap)
        per = WalkSchedule.for_params(eps, alpha, gap, constants).cost(costs).quantum_messages
    elif k == "quantum":
        (per,) = charge.params
    else:
        raise ParameterError(f"unknown charge kind {k!r}")
    return per * charge.count


class RunContext:
    """Per-run clock and ledger; every charge is mirrored in the trace."""

    def __init__(self, constants: QConstants = DEFAULT_CONSTANTS):
        self.constants = constants
        self.ledger = CostLedger()
        self.trace: list[Charge] = []

    def tick(self, rounds: int) -> None:
        self.ledger.record_cost(rounds=rounds)

    def send(self, phase: str, messages: int) -> None:
        messages = int(messages)
        if messages:
            self.trace.append(Charge(phase, "classical", messages))
            self.ledger.record_cost(classical=messages)

    def charge(self, phase: str, kind: str, params: tuple, quantum_messages: int, count: int = 1) -> None:
        if count:
            self.trace.append(Charge(phase, kind, count, params))
            self.ledger.record_cost(quantum=quantum_messages * count)

    def recount_classical(self) -> int:
        return sum(c.count for c in self.trace if c.kind == "classical")

    def recount_quantum(self) -> int:
        return sum(closed_form_messages(c, self.constants) for c in self.trace if c.kind != "classical")


@dataclass
class LEOutcome:
    status: np.ndarray
    ledger: CostLedger
    budget_rounds: int
    context: RunContext
    candidates: list[int] = field(default_factory=list)
    ranks: dict[int, int] = field(default_factory=dict)
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def elected(self) -> set[int]:
        return set(np.flatnonzero(self.status == ELECTED).tolist())

    @property
    def valid(self) -> bool:
        return len(self.elected) == 1

    def status_of(self, v: int) -> Status:
        return _STATUS[int(self.status[v])]

    @property
    def top_candidate(self) -> int | None:
        if not self.ranks:
            return None
        return max(self.ranks, key=lambda v: (self.ranks[v], v))


@dataclass
class AgreementOutcome:
    decisions: np.ndarray  # -1 for undecided, else the bit
    inputs: np.ndarray
    ledger: CostLedger
    budget_rounds: int
    context: RunContext
    candidates: list[int] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def decided_values(self) -> set[int]:
        return set(self.decisions[self.decisions >= 0].tolist())

    @property
    def valid(self) -> bool:
        vals = self.decided_values
        return len(vals) == 1 and vals <= set(self.inputs.tolist())


def finish_statuses(n: int, elected: list[int]) -> np.ndarray:
    """Everybody not elected ends NON-ELECTED, so no node stays undecided."""
    status = np.full(n, NON_ELECTED, dtype=np.int8)
    status[list(elected)] = ELECTED
    return status
