"""Network substrate: graphs with ports, node state, cost ledger and randomness.

Every protocol in :mod:`qcongest.protocols` runs on a :class:`Graph`, draws
its coins from a :class:`RandomSource` and accounts for rounds and messages in
a :class:`CostLedger`.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


class ContractError(ValueError):
    """A precondition of an operation was violated."""


class ParameterError(ContractError):
    """Invalid parameter values for an operation or protocol."""


class DegenerateSampling(RuntimeError):
    """Candidate sampling produced no candidate."""


class Graph:
    """Undirected connected graph stored in CSR form.

    ``neighbors(v)`` is sorted by node id and its position is the port number,
    so port ``p`` of ``v`` leads to ``neighbors(v)[p]``.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], *, check_connected: bool = True):
        if n < 1:
            raise ContractError("node count must be positive")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ContractError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ContractError("self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            raise ContractError("duplicate edges are not allowed")
        self.n = int(n)
        self.m = int(e.shape[0])
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        adj = sparse.csr_matrix(
            (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n)
        )
        adj.sort_indices()
        self._adj = adj
        self.indptr = adj.indptr
        self.indices = adj.indices
        self.degrees = np.diff(adj.indptr)
        self.cache: dict = {}
        if check_connected and n > 1:
            ncomp, _ = csgraph.connected_components(adj, directed=False)
            if ncomp != 1:
                raise ContractError("graph is not connected")
        if n > 1 and self.m == 0:
            raise ContractError("graph is not connected")

    @classmethod
    def from_adjacency(cls, adj: np.ndarray | sparse.spmatrix) -> Graph:
        a = sparse.triu(sparse.csr_matrix(adj), k=1).tocoo()
        return cls(adj.shape[0], np.column_stack([a.row, a.col]))

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def port(self, v: int, p: int) -> int:
        return int(self.indices[self.indptr[v] + p])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n > 1 else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n > 1 else 0

    def sparse_adjacency(self) -> sparse.csr_matrix:
        return self._adj

    def dense_adjacency(self) -> np.ndarray:
        return self._adj.toarray().astype(bool)

    def edges(self) -> np.ndarray:
        a = sparse.triu(self._adj, k=1).tocoo()
        order = np.lexsort((a.col, a.row))
        return np.column_stack([a.row[order], a.col[order]])

    def is_symmetric(self) -> bool:
        return (self._adj != self._adj.T).nnz == 0

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class CompleteGraph(Graph):
    """K_n with ports computed on demand; the CSR form is built only if asked for."""

    def __init__(self, n: int):
        if n < 2:
            raise ContractError("complete graph needs n >= 2")
        self.n = int(n)
        self.m = n * (n - 1) // 2
        self.degrees = np.full(n, n - 1, dtype=np.int64)
        self.cache: dict = {}
        self._built: Graph | None = None

    def _csr(self) -> Graph:
        if self._built is None:
            iu = np.triu_indices(self.n, k=1)
            self._built = Graph(self.n, np.column_stack(iu), check_connected=False)
        return self._built

    @property
    def indptr(self):
        return self._csr().indptr

    @property
    def indices(self):
        return self._csr().indices

    def neighbors(self, v: int) -> np.ndarray:
        return np.delete(np.arange(self.n), v)

    def port(self, v: int, p: int) -> int:
        return p if p < v else p + 1

    def first_ports(self, v: int, k: int) -> np.ndarray:
        nb = np.arange(min(k + 1, self.n))
        return nb[nb != v][:k]

    def has_edge(self, u: int, v: int) -> bool:
        return u != v

    def sparse_adjacency(self) -> sparse.csr_matrix:
        return self._csr().sparse_adjacency()

    def dense_adjacency(self) -> np.ndarray:
        return ~np.eye(self.n, dtype=bool)

    def edges(self) -> np.ndarray:
        return np.column_stack(np.triu_indices(self.n, k=1))

    def is_symmetric(self) -> bool:
        return True


def write_edge_list(graph: Graph, path: str | Path) -> None:
    lines = [f"{graph.n} {graph.m}"]
    lines += [f"{u} {v}" for u, v in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: str | Path) -> Graph:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ContractError("edge list must start with a 'n m' header line")
    n, m = int(rows[0][0]), int(rows[0][1])
    edges = [(int(u), int(v)) for u, v in rows[1:]]
    if len(edges) != m:
        raise ContractError(f"header declares {m} edges, found {len(edges)}")
    return Graph(n, edges)


class Status(enum.Enum):
    UNDECIDED = "undecided"
    NON_ELECTED = "non-elected"
    ELECTED = "elected"


@dataclass
class NodeState:
    status: Status = Status.UNDECIDED
    rank: int | None = None
    is_candidate: bool = False
    is_active: bool = False
    agreement_input: int | None = None
    agreement_decision: int | None = None

    def decide(self, status: Status) -> None:
        if status is Status.UNDECIDED:
            raise ContractError("cannot return to the undecided status")
        if self.status is not Status.UNDECIDED and self.status is not status:
            raise ContractError(f"status already {self.status.value}")
        self.status = status

    def make_candidate(self, rank: int) -> None:
        self.is_candidate = True
        self.rank = rank


@dataclass
class CostLedger:
    """Per-run accumulator of rounds and messages.

    ``quantum_messages`` counts charged units of O(log n)-bit messages.
    """

    rounds: int = 0
    classical_messages: int = 0
    quantum_messages: int = 0

    @property
    def total(self) -> int:
        return self.classical_messages + self.quantum_messages

    def record_cost(self, rounds: int = 0, classical: int = 0, quantum: int = 0) -> CostLedger:
        if rounds < 0 or classical < 0 or quantum < 0:
            raise ContractError("cost deltas must be nonnegative")
        self.rounds += int(rounds)
        self.classical_messages += int(classical)
        self.quantum_messages += int(quantum)
        return self

    def __add__(self, other: CostLedger) -> CostLedger:
        return CostLedger(
            self.rounds + other.rounds,
            self.classical_messages + other.classical_messages,
            self.quantum_messages + other.quantum_messages,
        )

    def scaled(self, k: int) -> CostLedger:
        if k < 0:
            raise ContractError("scale must be nonnegative")
        return CostLedger(self.rounds * k, self.classical_messages * k, self.quantum_messages * k)


def record_cost(ledger: CostLedger, rounds: int, classical: int, quantum: int) -> CostLedger:
    return ledger.record_cost(rounds, classical, quantum)


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed from arbitrary printable parts."""
    h = hashlib.blake2b(":".join(map(str, parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big") >> 1


@dataclass
class RandomSource:
    """Master seed split into per-node private streams and one shared stream.

    Node streams are created lazily from ``SeedSequence(seed, spawn_key=(v,))``
    so runs on large graphs only pay for the nodes that draw coins.
    """

    seed: int
    _nodes: dict[int, np.random.Generator] = field(default_factory=dict, repr=False)
    _named: dict[str, np.random.Generator] = field(default_factory=dict, repr=False)

    def node(self, v: int) -> np.random.Generator:
        g = self._nodes.get(v)
        if g is None:
            g = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(0, int(v))))
            self._nodes[v] = g
        return g

    def stream(self, name: str) -> np.random.Generator:
        g = self._named.get(name)
        if g is None:
            key = int.from_bytes(hashlib.blake2b(name.encode(), digest_size=4).digest(), "big")
            g = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(1, key)))
            self._named[name] = g
        return g

    def shared(self) -> np.random.Generator:
        """Global coin visible to every node (agreement protocol only)."""
        return self.stream("shared")

    def coins(self, n: int) -> np.ndarray:
        """One private uniform per node, entry ``v`` used only by node ``v``."""
        return self.stream("coins").random(n)


def candidate_probability(n: int) -> float:
    return min(1.0, 12.0 * math.log(n) / n)


def sample_candidates(graph: Graph | int, rng: RandomSource) -> set[int]:
    n = graph if isinstance(graph, int) else graph.n
    if n < 2:
        raise ContractError("candidate sampling needs n >= 2")
    p = candidate_probability(n)
    return set(np.flatnonzero(rng.coins(n) < p).tolist())


def assign_ranks(candidates: Iterable[int], n: int, rng: RandomSource) -> dict[int, int]:
    cands = sorted(candidates)
    if not cands:
        raise DegenerateSampling("no candidate was sampled")
    top = n ** 4
    return {v: int(rng.node(v).integers(1, top + 1)) for v in cands}


def first_ports(graph: Graph, v: int, k: int) -> np.ndarray:
    """The ``k`` lowest-numbered ports of ``v`` (the protocols' arbitrary choice)."""
    if isinstance(graph, CompleteGraph):
        return graph.first_ports(v, k)
    return graph.neighbors(v)[:k]


def all_distinct(values: Sequence[int]) -> bool:
    return len(set(values)) == len(values)
