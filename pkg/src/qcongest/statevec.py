"""Exact state-vector kernel for quantum message routing on small star networks.

The center is node 0 and the leaves are nodes 1..L. Every port carries an
emission register (``u->v``) on the sender side and a reception register
(``v<-u``) on the receiver side; both hold a symbol of :data:`ALPHABET`.
The center additionally owns a port-pointer register ``x`` (which leaf it is
querying) and an answer register ``ans``.

The kernel is only meant as a brute-force oracle for :mod:`qcongest.qprims`:
states are sparse maps from basis configurations to amplitudes.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .netmodel import ContractError

BOT, QUERY, ZERO, ONE = "⊥", "q", "0", "1"
ALPHABET = (BOT, QUERY, ZERO, ONE)
MAX_LEAVES = 12
MAX_POINTS = 16

Config = tuple


class ResourceError(ContractError):
    """Instance exceeds the kernel's dimension bounds."""


@dataclass(frozen=True)
class StarLayout:
    """Register order: center registers first, then each leaf in id order."""

    leaves: int
    names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if not 1 <= self.leaves <= MAX_LEAVES:
            raise ResourceError(f"leaf count must lie in [1, {MAX_LEAVES}]")
        names = ["x", "ans"]
        for u in self.leaf_ids:
            names += [f"0->{u}", f"0<-{u}"]
        for u in self.leaf_ids:
            names += [f"{u}->0", f"{u}<-0"]
        object.__setattr__(self, "names", tuple(names))

    @property
    def leaf_ids(self) -> range:
        return range(1, self.leaves + 1)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def port_pairs(self) -> list[tuple[int, int]]:
        """(emission, matching reception) register indices of every directed port."""
        pairs = []
        for u in self.leaf_ids:
            pairs.append((self.index(f"0->{u}"), self.index(f"{u}<-0")))
            pairs.append((self.index(f"{u}->0"), self.index(f"0<-{u}")))
        return pairs

    def vacuum(self, x: int = 0) -> Config:
        return (x,) + (BOT,) * (len(self.names) - 1)


class StateVector:
    def __init__(self, layout: StarLayout, amplitudes: dict[Config, complex] | None = None):
        self.layout = layout
        self.amps: dict[Config, complex] = dict(amplitudes or {})

    @classmethod
    def uniform_pointer(cls, layout: StarLayout) -> StateVector:
        a = 1 / math.sqrt(layout.leaves)
        return cls(layout, {layout.vacuum(x): a for x in range(layout.leaves)})

    def copy(self) -> StateVector:
        return StateVector(self.layout, self.amps)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def permute(self, fn: Callable[[Config], Config]) -> StateVector:
        """Apply a basis permutation; ``fn`` must be injective on the support."""
        out: dict[Config, complex] = {}
        for c, a in self.amps.items():
            d = fn(c)
            if d in out:
                raise ContractError("basis map is not injective on the support")
            out[d] = a
        return StateVector(self.layout, out)

    def phase(self, fn: Callable[[Config], complex]) -> StateVector:
        return StateVector(self.layout, {c: a * fn(c) for c, a in self.amps.items()})

    def pruned(self, tol: float = 1e-14) -> StateVector:
        return StateVector(self.layout, {c: a for c, a in self.amps.items() if abs(a) > tol})

    def probability(self, pred: Callable[[Config], bool]) -> float:
        return sum(abs(a) ** 2 for c, a in self.amps.items() if pred(c))

    def emissions(self) -> int:
        """Messages sent by the next Send: max count of loaded emission registers over the support."""
        pairs = self.layout.port_pairs()
        return max((sum(c[e] != BOT for e, _ in pairs) for c in self.amps), default=0)

    def label(self, c: Config) -> str:
        return " ".join(f"{n}={v}" for n, v in zip(self.layout.names, c))

    def dump(self) -> list[str]:
        """Lines ``label<TAB>real<TAB>imag`` in lexicographic basis order."""
        rows = []
        for c in sorted(self.amps, key=lambda c: (c[0],) + tuple(ALPHABET.index(v) for v in c[1:])):
            a = self.amps[c]
            rows.append(f"{self.label(c)}\t{a.real:.15g}\t{a.imag:.15g}")
        return rows


def _swap_ports(state: StateVector, require_empty: int) -> StateVector:
    pairs = state.layout.port_pairs()

    def move(c: Config) -> Config:
        lst = list(c)
        for e, r in pairs:
            if lst[(e, r)[require_empty]] != BOT:
                which = "reception" if require_empty else "emission"
                raise ContractError(f"{which} register {state.layout.names[(e, r)[require_empty]]} is not empty")
            lst[e], lst[r] = lst[r], lst[e]
        return tuple(lst)

    return state.permute(move)


def apply_send(state: StateVector) -> StateVector:
    """Move every emission register's content into the matching reception register."""
    return _swap_ports(state, require_empty=1)


def apply_send_inverse(state: StateVector) -> StateVector:
    return _swap_ports(state, require_empty=0)


def _transpose(c: Config, i: int, j: int, a: tuple[str, str], b: tuple[str, str]) -> Config:
    """Swap the joint value of registers (i, j) between ``a`` and ``b``."""
    cur = (c[i], c[j])
    if cur not in (a, b):
        return c
    lst = list(c)
    lst[i], lst[j] = b if cur == a else a
    return tuple(lst)


class CheckingCircuit:
    """Query of the leaf selected by ``x``, answer loaded into ``ans``, and its inverse.

    ``checking`` returns the evolved state and the (rounds, messages) it used.
    """

    def __init__(self, layout: StarLayout, marked: Iterable[int]):
        self.layout = layout
        self.marked = frozenset(marked)
        if any(u not in layout.leaf_ids for u in self.marked):
            raise ContractError("marked leaves must be leaf ids")
        self.ix = layout.index("x")
        self.ians = layout.index("ans")

    def _emit_query(self, c: Config) -> Config:
        u = c[self.ix] + 1
        return _transpose(c, self.layout.index(f"0->{u}"), self.ians, (BOT, BOT), (QUERY, BOT))

    def _leaf_reply(self, c: Config) -> Config:
        for u in self.layout.leaf_ids:
            bit = ONE if u in self.marked else ZERO
            c = _transpose(c, self.layout.index(f"{u}<-0"), self.layout.index(f"{u}->0"), (QUERY, BOT), (BOT, bit))
        return c

    def _collect(self, c: Config) -> Config:
        u = c[self.ix] + 1
        r = self.layout.index(f"0<-{u}")
        for bit in (ZERO, ONE):
            c = _transpose(c, r, self.ians, (bit, BOT), (BOT, bit))
        return c

    def compute(self, s: StateVector) -> tuple[StateVector, int, int]:
        rounds = msgs = 0
        s = s.permute(self._emit_query)
        msgs += s.emissions()
        s, rounds = apply_send(s), rounds + 1
        s = s.permute(self._leaf_reply)
        msgs += s.emissions()
        s, rounds = apply_send(s), rounds + 1
        return s.permute(self._collect), rounds, msgs

    def uncompute(self, s: StateVector) -> tuple[StateVector, int, int]:
        # every local step is a transposition, hence its own inverse
        rounds = msgs = 0
        s = s.permute(self._collect)
        s = apply_send_inverse(s)
        rounds += 1
        msgs += s.emissions()
        s = s.permute(self._leaf_reply)
        s = apply_send_inverse(s)
        rounds += 1
        msgs += s.emissions()
        return s.permute(self._emit_query), rounds, msgs


def _phase_flip(layout: StarLayout) -> Callable[[Config], complex]:
    i = layout.index("ans")
    return lambda c: -1.0 if c[i] == ONE else 1.0


def diffusion(s: StateVector) -> StateVector:
    """Reflection about the uniform pointer state, applied per fixed remainder of the configuration."""
    L = s.layout.leaves
    groups: dict[Config, np.ndarray] = {}
    for c, a in s.amps.items():
        vec = groups.setdefault(c[1:], np.zeros(L, dtype=complex))
        vec[c[0]] += a
    out: dict[Config, complex] = {}
    for rest, vec in groups.items():
        new = 2 * vec.mean() - vec
        for x in range(L):
            out[(x,) + rest] = complex(new[x])
    return StateVector(s.layout, out).pruned()


@dataclass
class GroverRun:
    state: StateVector
    rounds: int = 0
    messages: int = 0


def grover_iterate(run: GroverRun, circuit: CheckingCircuit) -> GroverRun:
    s, r1, m1 = circuit.compute(run.state)
    s = s.phase(_phase_flip(circuit.layout))
    s, r2, m2 = circuit.uncompute(s)
    return GroverRun(diffusion(s), run.rounds + r1 + r2, run.messages + m1 + m2)


def _check_instance(leaf_count: int, marked: Iterable[int]) -> tuple[StarLayout, CheckingCircuit]:
    if leaf_count > MAX_LEAVES:
        raise ResourceError(f"at most {MAX_LEAVES} leaves are supported")
    layout = StarLayout(leaf_count)
    return layout, CheckingCircuit(layout, marked)


def grover_star_run(leaf_count: int, marked_leaves: Iterable[int], iterations: int) -> GroverRun:
    layout, circuit = _check_instance(leaf_count, marked_leaves)
    run = GroverRun(StateVector.uniform_pointer(layout))
    for _ in range(iterations):
        run = grover_iterate(run, circuit)
    return run


def marked_pointer_probability(state: StateVector, marked: Iterable[int]) -> float:
    ptr = {u - 1 for u in marked}
    return state.probability(lambda c: c[0] in ptr)


def grover_star_exact(leaf_count: int, marked_leaves: Iterable[int], iterations: int) -> float:
    """Probability that measuring ``x`` after the iterations hits a marked leaf."""
    marked = set(marked_leaves)
    run = grover_star_run(leaf_count, marked, iterations)
    return marked_pointer_probability(run.state, marked)


def phase_estimation_exact_distribution(leaf_count: int, marked_leaves: Iterable[int], P: int) -> np.ndarray:
    """P-point phase estimation of the Grover iterate started on the uniform pointer state.

    Outcome m has probability ``|| (1/P) sum_j exp(-2 pi i j m / P) G^j |s> ||^2``.
    """
    if not 1 <= P <= MAX_POINTS:
        raise ResourceError(f"P must lie in [1, {MAX_POINTS}]")
    layout, circuit = _check_instance(leaf_count, marked_leaves)
    powers = [StateVector.uniform_pointer(layout)]
    for _ in range(P - 1):
        powers.append(grover_iterate(GroverRun(powers[-1]), circuit).state)
    support = sorted({c for s in powers for c in s.amps})
    mat = np.array([[s.amps.get(c, 0j) for c in support] for s in powers])
    dist = np.empty(P)
    for m in range(P):
        w = np.array([cmath.exp(-2j * math.pi * j * m / P) for j in range(P)]) / P
        dist[m] = float(np.sum(np.abs(w @ mat) ** 2))
    return dist
