"""Explicit leader election on general graphs by repeated cluster merging.

Each phase, every node Grover-searches its neighborhood for an edge leaving
its cluster, the cluster center collects one such edge by convergecast, and
a maximal matching on the resulting fragment graph pairs clusters up;
unmatched clusters hang onto a matched neighbor. Clusters are named by their
center's node id.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from ..netmodel import Graph, RandomSource
from ..qprims import DEFAULT_CONSTANTS, GroverSchedule, QConstants, grover_found_probability
from .common import LEOutcome, RunContext, finish_statuses
from .matching import is_maximal, matching_super_rounds, maximal_matching_cv


def merge_phases(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def tree_merge_round_budget(n: int, constants: QConstants = DEFAULT_CONSTANTS) -> int:
    search = GroverSchedule.for_params(1.0 / max(1, n - 1), 1.0 / n**3, constants).cost(2, 2).rounds
    # search, convergecast, matching super-rounds (each one tree sweep plus one crossing), center broadcast
    phase = search + (n - 1) + matching_super_rounds(n) * n + (n - 1)
    return merge_phases(n) * phase + (n - 1)


def _search_costs(graph: Graph, constants: QConstants) -> dict[int, GroverSchedule]:
    alpha = 1.0 / graph.n**3
    return {int(d): GroverSchedule.for_params(1.0 / d, alpha, constants) for d in np.unique(graph.degrees)}


def quantum_general_le(
    graph: Graph, rng: RandomSource, constants: QConstants = DEFAULT_CONSTANTS
) -> LEOutcome:
    n = graph.n
    ctx = RunContext(constants)
    budget = tree_merge_round_budget(n, constants)
    center = np.arange(n)
    tree_edges: list[tuple[int, int]] = []
    schedules = _search_costs(graph, constants)
    deg_counts = Counter(graph.degrees.tolist())
    rows = np.repeat(np.arange(n), graph.degrees)
    search_rounds = GroverSchedule.for_params(1.0 / max(1, n - 1), 1.0 / n**3, constants).cost(2, 2).rounds
    sizes_per_phase = []
    halving_ok = True

    for phase in range(merge_phases(n)):
        clusters = np.unique(center)
        sizes_per_phase.append(int(clusters.size))
        # (1) every node searches its neighborhood for another cluster
        outside = center[graph.indices] != center[rows]
        counts = np.bincount(rows, weights=outside, minlength=n).astype(np.int64)
        for d, c in sorted(deg_counts.items()):
            s = schedules[d]
            ctx.charge("outgoing-edge search", "grover", (1.0 / d, 1.0 / n**3, 2), s.cost(2, 2).quantum_messages, c)
        ctx.tick(search_rounds)
        best: dict[int, tuple[int, int, int]] = {}
        for v in np.flatnonzero(counts):
            v = int(v)
            g = rng.node(v)
            p = float(grover_found_probability(counts[v] / graph.degrees[v], schedules[int(graph.degrees[v])]))
            if g.random() >= p:
                continue
            nb = graph.neighbors(v)
            outs = nb[center[nb] != center[v]]
            u = int(outs[g.integers(outs.size)])
            cand = (int(center[u]), v, u)
            cv = int(center[v])
            if cv not in best or cand < best[cv]:
                best[cv] = cand
        # convergecast of one outgoing edge per cluster
        ctx.send("convergecast", n - clusters.size)
        ctx.tick(n - 1)
        # (2) maximal matching on the fragment graph
        parent = {int(c): (best[int(c)][0] if int(c) in best else None) for c in clusters}
        result = maximal_matching_cv(parent, n)
        proposals = sum(p is not None for p in parent.values())
        ctx.send("fragment matching", result.super_rounds * (n - clusters.size + proposals))
        ctx.tick(result.super_rounds * n)
        if not is_maximal(parent, result.mate):
            raise AssertionError("matching is not maximal")
        # (3) merge
        new_center = {}
        for a, b in result.pairs:
            c = max(a, b)
            new_center[a] = new_center[b] = c
            child, par = (a, b) if parent.get(a) == b else (b, a)
            _, x, y = best[child]
            tree_edges.append((x, y))
        for c, p in parent.items():
            if c in result.mate or p is None:
                continue
            if p in result.mate:
                new_center[c] = new_center[p]
                _, x, y = best[c]
                tree_edges.append((x, y))
        lookup = np.arange(n)
        for old, new in new_center.items():
            lookup[old] = new
        center = lookup[center]
        merged = np.unique(center[np.isin(center, list(set(new_center.values())))], return_counts=True)[1]
        ctx.send("center broadcast", int((merged - 1).sum()))
        ctx.tick(n - 1)
        after = np.unique(center).size
        if clusters.size >= 2 and after > math.ceil(clusters.size / 2):
            halving_ok = False

    leaders = sorted(int(c) for c in np.unique(center))
    ctx.send("leader broadcast", n - len(leaders))
    ctx.tick(n - 1)
    info = {
        "clusters_per_phase": sizes_per_phase + [len(leaders)],
        "halving_ok": halving_ok,
        "tree_edges": tree_edges,
        "center": center,
        "informed": n - len(leaders) == len(tree_edges) and len(leaders) == 1,
    }
    return LEOutcome(finish_statuses(n, leaders), ctx.ledger, budget, ctx, info=info)
