"""Minor-order operations on simple graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

from .canon import canonical_form
from .graph import Graph, GraphError

HAS_MINOR_MAX_PATTERN = 8
HAS_MINOR_MAX_HOST = 12


def _compact(g: Graph, drop: int, edges) -> Graph:
    def f(x):
        return x - 1 if x > drop else x
    return Graph.from_edges(g.n - 1, ((f(u), f(v)) for u, v in edges))


def delete_vertex(g: Graph, v: int) -> Graph:
    """Remove ``v`` and its edges; ids above ``v`` shift down by one."""
    g.check_vertex(v)
    return _compact(g, v, ((a, b) for a, b in g.edges() if v not in (a, b)))


def delete_edge(g: Graph, u: int, v: int) -> Graph:
    g.check_edge(u, v)
    e = (min(u, v), max(u, v))
    return Graph.from_edges(g.n, (x for x in g.edges() if x != e))


def contract_edge(g: Graph, u: int, v: int) -> Graph:
    """Merge ``u`` and ``v`` into the smaller of the two ids.

    The merged vertex is adjacent to ``(N(u) | N(v)) - {u, v}``; the larger id
    is removed and the ids above it shift down by one.
    """
    g.check_edge(u, v)
    keep, gone = min(u, v), max(u, v)
    edges = []
    for a, b in g.edges():
        a = keep if a == gone else a
        b = keep if b == gone else b
        if a != b:
            edges.append((a, b))
    return _compact(g, gone, edges)


@dataclass(frozen=True)
class MinorStep:
    kind: Literal["delete-vertex", "delete-edge", "contract-edge"]
    site: Union[int, tuple[int, int]]

    def apply(self, g: Graph) -> Graph:
        if self.kind == "delete-vertex":
            return delete_vertex(g, self.site)
        if self.kind == "delete-edge":
            return delete_edge(g, *self.site)
        if self.kind == "contract-edge":
            return contract_edge(g, *self.site)
        raise GraphError(f"unknown minor step {self.kind!r}")


def minor_steps(g: Graph) -> list[MinorStep]:
    """Every single step, in order: vertex deletions, edge deletions, contractions."""
    edges = g.edges()
    return ([MinorStep("delete-vertex", v) for v in range(g.n)]
            + [MinorStep("delete-edge", e) for e in edges]
            + [MinorStep("contract-edge", e) for e in edges])


def one_step_minors(g: Graph) -> dict[str, Graph]:
    """Distinct one-step minors of ``g`` keyed by canonical code."""
    out: dict[str, Graph] = {}
    for step in minor_steps(g):
        h = step.apply(g)
        out.setdefault(canonical_form(h), h)
    return out


def has_minor(g: Graph, h: Graph) -> bool:
    """Decide ``h <=_m g`` by exhaustive search over minor steps.

    Exponential; intended as a test oracle on small graphs only.
    """
    if h.n > HAS_MINOR_MAX_PATTERN or g.n > HAS_MINOR_MAX_HOST:
        raise GraphError(
            f"has_minor is capped at pattern n<={HAS_MINOR_MAX_PATTERN}, "
            f"host n<={HAS_MINOR_MAX_HOST}")
    target = canonical_form(h)
    hdeg = sorted(h.degrees(), reverse=True)
    seen: set[str] = set()

    def viable(x: Graph) -> bool:
        if x.n < h.n or x.m < h.m:
            return False
        # same order: only edge deletions remain, so x must dominate h's degrees
        return x.n > h.n or all(a >= b for a, b in
                                zip(sorted(x.degrees(), reverse=True), hdeg))

    def search(x: Graph, code: str) -> bool:
        if code == target:
            return True
        seen.add(code)
        for step in minor_steps(x):
            y = step.apply(x)
            if not viable(y):
                continue
            c = canonical_form(y)
            if c not in seen and search(y, c):
                return True
        return False

    return viable(g) and search(g, canonical_form(g))
