"""Topology generators and structural measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .netmodel import CompleteGraph, ContractError, Graph, ParameterError

FAMILIES = ("complete", "hypercube", "diameter2_random", "gnm", "random_regular", "star", "cycle", "path")


def complete(n: int) -> Graph:
    if n < 2:
        raise ParameterError("complete graph needs n >= 2")
    return CompleteGraph(n)


def hypercube(d: int) -> Graph:
    if d < 1:
        raise ParameterError("hypercube dimension must be >= 1")
    n = 1 << d
    v = np.arange(n)
    edges = [np.column_stack([v[(v >> b) & 1 == 0], v[(v >> b) & 1 == 0] | (1 << b)]) for b in range(d)]
    return Graph(n, np.concatenate(edges), check_connected=False)


def star(n: int) -> Graph:
    if n < 2:
        raise ParameterError("star needs n >= 2")
    return Graph(n, [(0, v) for v in range(1, n)], check_connected=False)


def cycle(n: int) -> Graph:
    if n < 3:
        raise ParameterError("cycle needs n >= 3")
    return Graph(n, [(v, (v + 1) % n) for v in range(n)], check_connected=False)


def path(n: int) -> Graph:
    if n < 2:
        raise ParameterError("path needs n >= 2")
    return Graph(n, [(v, v + 1) for v in range(n - 1)], check_connected=False)


def _pair_index_to_edges(n: int, idx: np.ndarray) -> np.ndarray:
    # idx enumerates pairs (u, v), u < v, row by row
    row_start = lambda u: u * (2 * n - u - 1) // 2  # noqa: E731
    u = np.floor(((2 * n - 1) - np.sqrt((2 * n - 1) ** 2 - 8.0 * idx)) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    # float rounding can misplace u by one near row boundaries
    u -= row_start(u) > idx
    u += row_start(u + 1) <= idx
    v = idx - row_start(u) + u + 1
    return np.column_stack([u, v])


def _try_connected(n: int, edges: np.ndarray) -> Graph | None:
    try:
        return Graph(n, edges)
    except ContractError:
        return None


def gnp(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return np.column_stack([iu[keep], iv[keep]])


def diameter2_random(n: int, rng: np.random.Generator, p: float | None = None, max_tries: int = 200) -> Graph:
    """G(n, p) resampled until its diameter is at most 2; p defaults to sqrt(2 ln n / n)."""
    if n < 3:
        raise ParameterError("diameter2_random needs n >= 3")
    p = math.sqrt(2 * math.log(n) / n) if p is None else p
    if not 0 < p <= 1:
        raise ParameterError("edge probability must lie in (0, 1]")
    for _ in range(max_tries):
        g = _try_connected(n, gnp(n, p, rng))
        if g is not None and has_diameter_at_most_2(g):
            return g
    raise ParameterError(f"no diameter-2 sample in {max_tries} tries; p={p:.4f} too small")


def gnm(n: int, m: int, rng: np.random.Generator, max_tries: int = 200) -> Graph:
    """Uniform connected graph with exactly m edges (rejection on connectivity)."""
    total = n * (n - 1) // 2
    if not n - 1 <= m <= total:
        raise ParameterError("need n-1 <= m <= n(n-1)/2")
    for _ in range(max_tries):
        idx = np.sort(rng.choice(total, size=m, replace=False))
        g = _try_connected(n, _pair_index_to_edges(n, idx))
        if g is not None:
            return g
    raise ParameterError(f"no connected G(n={n}, m={m}) sample in {max_tries} tries")


def random_regular(n: int, d: int, rng: np.random.Generator, max_tries: int = 500) -> Graph:
    """Pairing model with rejection of loops, multi-edges and disconnected samples."""
    if n * d % 2 or not 1 <= d < n:
        raise ParameterError("random regular graph needs n*d even and 1 <= d < n")
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        key = np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1])
        if np.unique(key).size != key.size:
            continue
        g = _try_connected(n, pairs)
        if g is not None:
            return g
    raise ParameterError(f"no simple connected {d}-regular sample in {max_tries} tries")


@dataclass(frozen=True)
class GraphSpec:
    family: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)


def generate(spec: GraphSpec, rng: np.random.Generator | None = None) -> Graph:
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    f, n, p = spec.family, spec.n, spec.params
    if f == "complete":
        g = complete(n)
    elif f == "hypercube":
        d = int(round(math.log2(n)))
        if 1 << d != n:
            raise ParameterError("hypercube size must be a power of two")
        g = hypercube(d)
    elif f == "diameter2_random":
        g = diameter2_random(n, rng, p=p.get("p"))
    elif f == "gnm":
        g = gnm(n, int(p.get("m", round(n ** 1.5))), rng)
    elif f == "random_regular":
        g = random_regular(n, int(p.get("d", 3)), rng)
    elif f == "star":
        g = star(n)
    elif f == "cycle":
        g = cycle(n)
    elif f == "path":
        g = path(n)
    else:
        raise ParameterError(f"unknown graph family {f!r}")
    validate_family(g, f, p)
    return g


def validate_family(g: Graph, family: str, params: dict | None = None) -> None:
    params = params or {}
    ok = True
    if family == "complete":
        ok = g.m == g.n * (g.n - 1) // 2
    elif family == "hypercube":
        d = int(round(math.log2(g.n)))
        ok = g.min_degree == g.max_degree == d
    elif family == "diameter2_random":
        ok = has_diameter_at_most_2(g)
    elif family == "random_regular":
        ok = g.min_degree == g.max_degree == int(params.get("d", 3))
    elif family == "star":
        ok = g.degree(0) == g.n - 1 and g.m == g.n - 1
    if not ok:
        raise ContractError(f"generated graph fails the {family} validator")


def has_diameter_at_most_2(g: Graph) -> bool:
    a = g.sparse_adjacency().astype(np.float32)
    reach = (a @ a).toarray() + a.toarray()
    np.fill_diagonal(reach, 1.0)
    return bool(np.all(reach > 0))


def diameter(g: Graph) -> int:
    dist = csgraph.shortest_path(g.sparse_adjacency(), method="D", unweighted=True, directed=False)
    if np.isinf(dist).any():
        raise ContractError("graph is not connected")
    return int(dist.max())


def transition_matrix(g: Graph, holding: float = 0.5, max_degree_walk: bool = False) -> sparse.csr_matrix:
    """Lazy walk: stay with probability ``holding``, else move to a uniform neighbor.

    With ``max_degree_walk`` each neighbor is taken with probability 1/(2*maxdeg)
    and the remaining mass stays put, which makes the stationary law uniform.
    """
    if not 0 <= holding < 1:
        raise ParameterError("holding probability must lie in [0, 1)")
    a = g.sparse_adjacency().astype(float)
    if max_degree_walk:
        move = a / (2.0 * g.max_degree)
        stay = 1.0 - g.degrees / (2.0 * g.max_degree)
    else:
        move = sparse.diags((1 - holding) / g.degrees) @ a
        stay = np.full(g.n, holding)
    return sparse.csr_matrix(move + sparse.diags(stay))


def stationary(g: Graph, max_degree_walk: bool = False) -> np.ndarray:
    if max_degree_walk:
        return np.full(g.n, 1.0 / g.n)
    return g.degrees / g.degrees.sum()


def walk_distribution(P: sparse.csr_matrix, starts: np.ndarray, steps: int) -> np.ndarray:
    """Rows are the ``steps``-step distributions from each start node."""
    q = np.zeros((len(starts), P.shape[0]))
    q[np.arange(len(starts)), starts] = 1.0
    pt = P.T.tocsr()
    for _ in range(steps):
        q = (pt @ q.T).T
    return q


def estimate_mixing_time(
    g: Graph,
    tv_tolerance: float | None = None,
    holding: float = 0.5,
    starts: np.ndarray | None = None,
    max_degree_walk: bool = False,
    max_steps: int = 10**6,
) -> int:
    """Smallest t with max-over-starts TV distance from stationarity <= tolerance.

    ``starts`` restricts the maximum to a subset of start nodes (one node is
    enough on vertex-transitive graphs such as hypercubes).
    """
    tol = 1.0 / g.n**2 if tv_tolerance is None else tv_tolerance
    if tol <= 0:
        raise ParameterError("tolerance must be positive")
    P = transition_matrix(g, holding, max_degree_walk)
    pi = stationary(g, max_degree_walk)
    starts = np.arange(g.n) if starts is None else np.asarray(starts)
    q = walk_distribution(P, starts, 0)
    pt = P.T.tocsr()
    for t in range(max_steps + 1):
        if 0.5 * np.abs(q - pi).sum(axis=1).max() <= tol:
            return t
        q = (pt @ q.T).T
    raise ContractError(f"walk did not mix within {max_steps} steps")
