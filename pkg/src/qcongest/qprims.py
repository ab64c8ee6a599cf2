"""Outcome models and cost charging for the distributed quantum subroutines.

Each subroutine is simulated by sampling from its exact measurement
distribution (no quantum registers are kept) and is charged a cost that
depends only on its parameters: every node follows the worst-case schedule
so that the network stays synchronized.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .netmodel import CostLedger, ParameterError


@dataclass(frozen=True)
class QConstants:
    """Hidden constants of the O(.) schedules.

    a: attempts = ceil(a ln(1/alpha)); b: iterations per attempt <= ceil(b/sqrt(eps));
    c_pe: walk-operator applications per reflection = ceil(c_pe/sqrt(gap)).
    """

    a: float = 3.0
    b: float = 2.0
    c_pe: float = 4.0


DEFAULT_CONSTANTS = QConstants()


@dataclass(frozen=True)
class OracleSpec:
    """A predicate over a finite domain together with the cost of one Checking.

    ``marked_fraction`` is the exact fraction of marked elements (or the
    stationary mass of the marked set for walk searches). ``sample_marked``
    draws a uniform marked element and ``is_marked`` re-evaluates the predicate.
    """

    domain_size: int
    marked_fraction: float
    is_marked: Callable[[Any], bool]
    sample_marked: Callable[[np.random.Generator], Any] | None = None
    checking_rounds: int = 2
    checking_messages: int = 2
    marked_count: int | None = None

    def __post_init__(self):
        if self.domain_size < 1:
            raise ParameterError("domain must be nonempty")
        if not 0.0 <= self.marked_fraction <= 1.0:
            raise ParameterError("marked fraction must lie in [0, 1]")
        if self.marked_count is not None and not 0 <= self.marked_count <= self.domain_size:
            raise ParameterError("marked count must lie in [0, |X|]")
        if self.checking_rounds < 0 or self.checking_messages < 0:
            raise ParameterError("checking costs must be nonnegative")
        if self.marked_fraction > 0 and self.sample_marked is None:
            raise ParameterError("a sampler is required when marked elements exist")

    @classmethod
    def from_marked(
        cls,
        domain: int | Sequence[Any],
        marked: Any,
        checking_rounds: int = 2,
        checking_messages: int = 2,
    ) -> OracleSpec:
        """Oracle over ``range(domain)`` (or an explicit element list) with an explicit marked set."""
        size = domain if isinstance(domain, int) else len(domain)
        members = sorted(set(marked))
        if not isinstance(domain, int):
            universe = set(domain)
            if any(x not in universe for x in members):
                raise ParameterError("marked elements must belong to the domain")
        elif members and (members[0] < 0 or members[-1] >= size):
            raise ParameterError("marked elements must belong to the domain")
        marked_set = frozenset(members)

        def sample(rng: np.random.Generator):
            return members[int(rng.integers(len(members)))]

        return cls(
            domain_size=size,
            marked_fraction=len(members) / size,
            is_marked=marked_set.__contains__,
            sample_marked=sample if members else None,
            checking_rounds=checking_rounds,
            checking_messages=checking_messages,
            marked_count=len(members),
        )

    @property
    def checking(self) -> tuple[int, int]:
        return self.checking_rounds, self.checking_messages


def _check_prob(name: str, value: float, *, closed_high: bool) -> None:
    ok = 0.0 < value <= 1.0 if closed_high else 0.0 < value < 1.0
    if not ok:
        raise ParameterError(f"{name}={value} out of range")


@dataclass(frozen=True)
class GroverSchedule:
    attempts: int
    max_iterations: int

    @classmethod
    def for_params(cls, eps: float, alpha: float, constants: QConstants = DEFAULT_CONSTANTS) -> GroverSchedule:
        _check_prob("eps", eps, closed_high=True)
        _check_prob("alpha", alpha, closed_high=False)
        attempts = max(1, math.ceil(constants.a * math.log(1.0 / alpha)))
        max_it = max(1, math.ceil(constants.b / math.sqrt(eps)))
        return cls(attempts, max_it)

    @property
    def checkings(self) -> int:
        # per attempt: Checking and its inverse per iteration, plus one verification
        return self.attempts * (2 * self.max_iterations + 1)

    def cost(self, checking_rounds: int, checking_messages: int) -> CostLedger:
        c = self.checkings
        return CostLedger(rounds=c * checking_rounds, quantum_messages=c * checking_messages)


def grover_success_probability(domain_size: int, marked_count: int, iterations: int) -> float:
    """Probability of measuring a marked element after ``iterations`` Grover steps."""
    if domain_size < 1:
        raise ParameterError("domain must be nonempty")
    if not 0 <= marked_count <= domain_size or iterations < 0:
        raise ParameterError("invalid marked count or iteration count")
    theta = math.asin(math.sqrt(marked_count / domain_size))
    return math.sin((2 * iterations + 1) * theta) ** 2


def mean_attempt_success(marked_fraction: float | np.ndarray, max_iterations: int) -> np.ndarray:
    """Success of one attempt whose iteration count is uniform on {0..max_iterations}."""
    theta = np.arcsin(np.sqrt(np.clip(np.asarray(marked_fraction, dtype=float), 0.0, 1.0)))
    t = np.arange(max_iterations + 1)
    return np.mean(np.sin(np.multiply.outer(theta, 2 * t + 1)) ** 2, axis=-1)


def grover_found_probability(marked_fraction: float | np.ndarray, schedule: GroverSchedule) -> np.ndarray:
    """Exact probability that at least one attempt of the schedule succeeds."""
    p = mean_attempt_success(marked_fraction, schedule.max_iterations)
    return 1.0 - (1.0 - p) ** schedule.attempts


def grover_search(
    oracle: OracleSpec,
    eps: float,
    alpha: float,
    rng: np.random.Generator,
    constants: QConstants = DEFAULT_CONSTANTS,
) -> tuple[Any | None, CostLedger]:
    schedule = GroverSchedule.for_params(eps, alpha, constants)
    cost = schedule.cost(*oracle.checking)
    theta = math.asin(math.sqrt(oracle.marked_fraction))
    if theta == 0.0:
        return None, cost
    t = rng.integers(0, schedule.max_iterations + 1, size=schedule.attempts)
    hits = rng.random(schedule.attempts) < np.sin((2 * t + 1) * theta) ** 2
    if not hits.any():
        return None, cost
    x = oracle.sample_marked(rng)
    if not oracle.is_marked(x):
        raise AssertionError("verification rejected a sampled marked element")
    return x, cost


def batch_grover_found(
    marked_fractions: np.ndarray, schedule: GroverSchedule, rng: np.random.Generator
) -> np.ndarray:
    """Found/not-found outcomes of many independent searches sharing one schedule."""
    p = grover_found_probability(marked_fractions, schedule)
    return rng.random(np.shape(p)) < p


def phase_estimation_distribution(omega: float, P: int) -> np.ndarray:
    """Outcome distribution of P-point phase estimation of eigenphase ``omega``."""
    if P < 1:
        raise ParameterError("P must be positive")
    m = np.arange(P)
    delta = omega - m / P
    s = np.sin(np.pi * delta)
    exact = np.abs(delta - np.round(delta)) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(P * np.pi * delta) ** 2 / (P * P * s * s)
    out[exact] = 1.0
    return out


def grover_phase_distribution(domain_size: int, marked_count: int, P: int) -> np.ndarray:
    """Phase-estimation outcomes on the Grover operator from the uniform start state.

    The start state splits evenly over the eigenphases +theta/pi and -theta/pi.
    """
    theta = math.asin(math.sqrt(marked_count / domain_size))
    w = theta / math.pi
    return 0.5 * (phase_estimation_distribution(w, P) + phase_estimation_distribution((1.0 - w) % 1.0, P))


def counting_points(c: float) -> int:
    return math.ceil(8 * math.pi / c)


def _estimates(domain_size: int, m: np.ndarray, P: int) -> np.ndarray:
    mh = np.minimum(m, P - m)
    est = np.rint(2 * domain_size * np.sin(np.pi * mh / P) ** 2).astype(np.int64)
    return np.clip(est, 0, domain_size)


def single_count_distribution(domain_size: int, marked_count: int, c: float) -> tuple[np.ndarray, np.ndarray]:
    """(estimates, probabilities) of one counting run on the doubled domain."""
    P = counting_points(c)
    theta = math.asin(math.sqrt(marked_count / (2 * domain_size)))
    dist = phase_estimation_distribution(theta / math.pi, P)
    return _estimates(domain_size, np.arange(P), P), dist


def count_in_band_mass(domain_size: int, marked_count: int, c: float) -> float:
    est, dist = single_count_distribution(domain_size, marked_count, c)
    return float(dist[np.abs(est - marked_count) < c * domain_size].sum())


def count_runs(alpha: float, constants: QConstants = DEFAULT_CONSTANTS) -> int:
    _check_prob("alpha", alpha, closed_high=False)
    return max(1, math.ceil(constants.a * math.log(1.0 / alpha)))


def approx_count_cost(c: float, alpha: float, checking: tuple[int, int], constants: QConstants = DEFAULT_CONSTANTS) -> CostLedger:
    uses = count_runs(alpha, constants) * counting_points(c) * 2
    return CostLedger(rounds=uses * checking[0], quantum_messages=uses * checking[1])


def approx_count(
    oracle: OracleSpec,
    c: float,
    alpha: float,
    rng: np.random.Generator,
    constants: QConstants = DEFAULT_CONSTANTS,
) -> tuple[int, CostLedger]:
    """Median of independent counting runs; each run doubles the domain first."""
    if not 0.0 < c < 1.0:
        raise ParameterError("c must lie in (0, 1)")
    runs = count_runs(alpha, constants)
    N = oracle.domain_size
    t = oracle.marked_count if oracle.marked_count is not None else round(oracle.marked_fraction * N)
    est, dist = single_count_distribution(N, t, c)
    m = rng.choice(dist.size, size=runs, p=dist / dist.sum())
    return int(statistics.median_low(est[m].tolist())), approx_count_cost(c, alpha, oracle.checking, constants)


def johnson_gap(universe_size: int, k: int) -> float:
    """Spectral gap of the uniform walk on J(universe_size, k), clamped to 1."""
    if not 1 <= k < universe_size:
        raise ParameterError("need 1 <= k < universe size")
    return min(1.0, universe_size / (k * (universe_size - k)))


@dataclass(frozen=True)
class WalkCosts:
    setup: tuple[int, int]
    update: tuple[int, int]
    checking: tuple[int, int]
    gap: float

    def __post_init__(self):
        if not 0.0 < self.gap <= 1.0:
            raise ParameterError("spectral gap must lie in (0, 1]")
        if min(*self.setup, *self.update, *self.checking) < 0:
            raise ParameterError("costs must be nonnegative")


@dataclass(frozen=True)
class WalkSchedule:
    attempts: int
    max_iterations: int
    updates_per_reflection: int

    @classmethod
    def for_params(cls, eps: float, alpha: float, gap: float, constants: QConstants = DEFAULT_CONSTANTS) -> WalkSchedule:
        g = GroverSchedule.for_params(eps, alpha, constants)
        if not 0.0 < gap <= 1.0:
            raise ParameterError("spectral gap must lie in (0, 1]")
        return cls(g.attempts, g.max_iterations, max(1, math.ceil(constants.c_pe / math.sqrt(gap))))

    @property
    def checkings(self) -> int:
        return self.attempts * (self.max_iterations + 1)

    def cost(self, costs: WalkCosts) -> CostLedger:
        def per_attempt(i: int) -> int:
            inner = self.updates_per_reflection * costs.update[i] + costs.checking[i]
            # trailing Checking verifies the measured element
            return costs.setup[i] + self.max_iterations * inner + costs.checking[i]

        return CostLedger(rounds=self.attempts * per_attempt(0), quantum_messages=self.attempts * per_attempt(1))


def walk_search(
    costs: WalkCosts,
    oracle: OracleSpec,
    eps: float,
    alpha: float,
    rng: np.random.Generator,
    constants: QConstants = DEFAULT_CONSTANTS,
    checking_error: float = 0.0,
) -> tuple[Any | None, CostLedger]:
    """Search via quantum walk; ``oracle.marked_fraction`` is the stationary marked mass.

    ``checking_error`` bounds the one-sided failure of a single Checking; the
    errors of all Checkings in an attempt add up and spoil that attempt.
    """
    schedule = WalkSchedule.for_params(eps, alpha, costs.gap, constants)
    cost = schedule.cost(costs)
    theta = math.asin(math.sqrt(oracle.marked_fraction))
    if theta == 0.0:
        return None, cost
    t = rng.integers(0, schedule.max_iterations + 1, size=schedule.attempts)
    p = np.sin((2 * t + 1) * theta) ** 2 * (1.0 - np.minimum(1.0, (t + 1) * checking_error))
    if not (rng.random(schedule.attempts) < p).any():
        return None, cost
    x = oracle.sample_marked(rng)
    if not oracle.is_marked(x):
        raise AssertionError("verification rejected a sampled marked element")
    return x, cost
