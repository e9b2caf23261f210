"""Minimum vertex cover: exact branch and bound plus the two classical heuristics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import Graph, GraphError, is_vertex_cover

EXACT = "exact"
GREEDY = "greedy-maxdeg"
APPROX2 = "matching-2approx"
MODEL = "model"
ALGORITHMS = (EXACT, GREEDY, APPROX2, MODEL)

DEFAULT_BUDGET = 2_000_000


class UnsolvedError(RuntimeError):
    """The exact search ran out of its node budget before proving optimality."""

    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"exact vertex cover unsolved within {budget} search nodes")


@dataclass(frozen=True)
class CoverResult:
    cover: tuple[int, ...]
    algorithm: str
    optimality: str = "heuristic"

    @property
    def size(self) -> int:
        return len(self.cover)

    @property
    def proven_optimal(self) -> bool:
        return self.optimality == "proven-optimal"


def _result(g, cover, algorithm, optimality="heuristic"):
    cover = tuple(sorted(cover))
    assert is_vertex_cover(g, cover), f"{algorithm} produced an invalid cover"
    return CoverResult(cover, algorithm, optimality)


def greedy_maxdeg(g: Graph) -> CoverResult:
    """Repeatedly take the vertex covering the most uncovered edges (smallest id on ties)."""
    deg = np.array(g.degrees(), dtype=np.int64)
    taken = np.zeros(g.n, dtype=bool)
    cover = []
    while g.n and deg.max() > 0:
        v = int(np.argmax(deg))
        cover.append(v)
        taken[v] = True
        deg[v] = 0
        for u in g.adjacency[v]:
            if not taken[u]:
                deg[u] -= 1
    return _result(g, cover, GREEDY)


def matching_2approx(g: Graph) -> CoverResult:
    """Take both ends of the lexicographically smallest uncovered edge until none remain."""
    covered = set()
    for u, v in g.edges():
        if u not in covered and v not in covered:
            covered.update((u, v))
    return _result(g, covered, APPROX2)


# ---------------------------------------------------------------- exact

def _matching_lower_bound(adj):
    used = set()
    size = 0
    for u in sorted(adj):
        if u in used:
            continue
        for w in sorted(adj[u]):
            if w not in used:
                used.update((u, w))
                size += 1
                break
    return size


def _remove(adj, vs):
    for v in vs:
        for w in adj.pop(v, ()):
            if w in adj:
                adj[w].discard(v)


def _components(adj):
    seen = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [s], [s]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append({v: set(adj[v]) for v in comp})
    return comps


class _Search:
    def __init__(self, budget):
        self.budget = budget
        self.nodes = 0

    def solve(self, adj, bound):
        """Minimum cover of ``adj`` if one smaller than ``bound`` exists, else None.

        ``adj`` is consumed.
        """
        self.nodes += 1
        if self.nodes > self.budget:
            raise UnsolvedError(self.budget)
        forced = []
        changed = True
        while changed:
            changed = False
            for v in sorted(adj):
                if v not in adj:
                    continue
                if not adj[v]:
                    del adj[v]
                elif len(adj[v]) == 1:
                    (u,) = adj[v]
                    forced.append(u)
                    _remove(adj, [u])
                    changed = True
        bound -= len(forced)
        if not adj:
            return forced if bound > 0 else None
        if bound <= 0:
            return None
        comps = _components(adj)
        if len(comps) > 1:
            lbs = [_matching_lower_bound(c) for c in comps]
            if sum(lbs) >= bound:
                return None
            total = []
            for i, comp in enumerate(comps):
                part = self.solve(comp, bound - len(total) - sum(lbs[i + 1:]))
                if part is None:
                    return None
                total.extend(part)
            return forced + total
        if _matching_lower_bound(adj) >= bound:
            return None
        v = max(sorted(adj), key=lambda x: len(adj[x]))
        nbrs = sorted(adj[v])
        best = None
        sub = {x: set(s) for x, s in adj.items()}
        _remove(sub, [v])
        r = self.solve(sub, bound - 1)
        if r is not None:
            best = [v] + r
            bound = len(best)
        if len(nbrs) < bound:
            sub = {x: set(s) for x, s in adj.items()}
            _remove(sub, nbrs + [v])
            r = self.solve(sub, bound - len(nbrs))
            if r is not None:
                best = nbrs + r
        return None if best is None else forced + best


def exact_vc(g: Graph, upper_bound: Optional[int] = None,
             budget: int = DEFAULT_BUDGET) -> Optional[CoverResult]:
    """Minimum vertex cover by branch and bound.

    Branches on a maximum-degree vertex ``v``: either ``v`` joins the cover or
    all of ``N(v)`` does. Degree-0/1 reductions, component splitting and a
    maximal-matching lower bound prune the tree.

    When ``upper_bound`` is given, only covers of at most that size are
    sought and ``None`` means vc(g) > upper_bound. Raises
    :class:`UnsolvedError` after ``budget`` search nodes.
    """
    if upper_bound is not None and upper_bound < 0:
        raise GraphError("upper_bound must be nonnegative")
    greedy = greedy_maxdeg(g)
    if upper_bound is None or upper_bound >= greedy.size:
        bound = greedy.size + 1
    else:
        bound = upper_bound + 1
    adj = {v: set(g.adjacency[v]) for v in range(g.n)}
    cover = _Search(budget).solve(adj, bound)
    if cover is None:
        if upper_bound is None:  # pragma: no cover - greedy cover always fits
            raise AssertionError("search missed the greedy cover")
        return None
    return _result(g, cover, EXACT, "proven-optimal")


def vc_at_most(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether ``g`` has a vertex cover of size at most ``k``."""
    if k < 0:
        return False
    return exact_vc(g, upper_bound=k, budget=budget) is not None


def solve(g: Graph, algorithm: str, budget: int = DEFAULT_BUDGET) -> CoverResult:
    if algorithm == EXACT:
        return exact_vc(g, budget=budget)
    if algorithm == GREEDY:
        return greedy_maxdeg(g)
    if algorithm == APPROX2:
        return matching_2approx(g)
    raise ValueError(f"unknown algorithm {algorithm!r}")
