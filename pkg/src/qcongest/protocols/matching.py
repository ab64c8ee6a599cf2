"""Maximal matching on a fragment graph where every fragment points to at most one other.

Fragments are named by distinct integer ids below ``id_bound``. Cole-Vishkin
color reduction brings the ids down to six colors, three shift-down steps
reach three colors, and one propose/accept sweep per color class builds the
matching. All counts of super-rounds depend on ``id_bound`` only.
"""
from __future__ import annotations

from dataclasses import dataclass, field


def cv_reduction_steps(id_bound: int) -> int:
    steps, bound = 0, id_bound
    while bound > 6:
        bound = 2 * max(1, (bound - 1).bit_length())
        steps += 1
    return steps


SHIFT_DOWN_SUPER_ROUNDS = 6
MATCHING_SUPER_ROUNDS = 12


def matching_super_rounds(id_bound: int) -> int:
    return cv_reduction_steps(id_bound) + SHIFT_DOWN_SUPER_ROUNDS + MATCHING_SUPER_ROUNDS


@dataclass
class MatchingResult:
    mate: dict[int, int]
    colors: dict[int, int]
    super_rounds: int
    pairs: list[tuple[int, int]] = field(default_factory=list)


def _cv_step(colors: dict[int, int], parent: dict[int, int | None]) -> dict[int, int]:
    out = {}
    for v, c in colors.items():
        p = parent[v]
        if p is None:
            out[v] = c & 1
        else:
            diff = c ^ colors[p]
            i = (diff & -diff).bit_length() - 1
            out[v] = 2 * i + ((c >> i) & 1)
    return out


def _neighbors(parent: dict[int, int | None]) -> dict[int, set[int]]:
    nb: dict[int, set[int]] = {v: set() for v in parent}
    for v, p in parent.items():
        if p is not None:
            nb[v].add(p)
            nb[p].add(v)
    return nb


def three_coloring(parent: dict[int, int | None], id_bound: int) -> dict[int, int]:
    colors = {v: v for v in parent}
    for _ in range(cv_reduction_steps(id_bound)):
        colors = _cv_step(colors, parent)
    nb = _neighbors(parent)
    for x in (5, 4, 3):
        shifted = {}
        for v, p in parent.items():
            shifted[v] = colors[p] if p is not None else min({0, 1, 2} - {colors[v]})
        colors = shifted
        for v in sorted(colors):
            if colors[v] == x:
                colors[v] = min({0, 1, 2} - {colors[u] for u in nb[v]})
    return colors


def maximal_matching_cv(parent: dict[int, int | None], id_bound: int) -> MatchingResult:
    """``parent[c]`` is the fragment that c proposes to (None if it found no outgoing edge)."""
    if any(p == v for v, p in parent.items()):
        raise ValueError("a fragment cannot propose to itself")
    if any(p is not None and p not in parent for p in parent.values()):
        raise ValueError("proposal to an unknown fragment")
    colors = three_coloring(parent, id_bound)
    children: dict[int, list[int]] = {v: [] for v in parent}
    for v, p in parent.items():
        if p is not None:
            children[p].append(v)
    mate: dict[int, int] = {}
    pairs = []

    def join(a: int, b: int) -> None:
        mate[a], mate[b] = b, a
        pairs.append((a, b))

    for c in (0, 1, 2):
        cls = sorted(v for v in parent if colors[v] == c)
        offers: dict[int, list[int]] = {}
        for v in cls:
            p = parent[v]
            if v not in mate and p is not None and p not in mate:
                offers.setdefault(p, []).append(v)
        for p, vs in sorted(offers.items()):
            join(min(vs), p)
        for v in cls:
            if v in mate:
                continue
            free = sorted(u for u in children[v] if u not in mate)
            if free:
                join(v, free[0])
    return MatchingResult(mate, colors, matching_super_rounds(id_bound), pairs)


def is_maximal(parent: dict[int, int | None], mate: dict[int, int]) -> bool:
    return all(p is None or v in mate or p in mate for v, p in parent.items())
