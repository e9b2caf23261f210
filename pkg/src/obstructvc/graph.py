"""Simple undirected graphs: construction, parsing, sampling.

Vertices are dense 0-based ids. Parallel edges collapse on construction and
self-loops are rejected, so every :class:`Graph` is simple.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Structural problem with a graph or a vertex/edge reference."""


class ParseError(GraphError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    adjacency: tuple[frozenset[int], ...]
    # parse metadata (original labels, warnings); not part of identity
    meta: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], meta=None) -> "Graph":
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs), dict(meta or {}))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, v) for u in range(self.vertex_count)
                for v in sorted(self.adjacency[u]) if u < v]

    def neighbors(self, v: int) -> frozenset[int]:
        self.check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.vertex_count and v in self.adjacency[u]

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.vertex_count):
            raise GraphError(f"vertex {v} out of range for n={self.vertex_count}")

    def check_edge(self, u: int, v: int) -> None:
        self.check_vertex(u)
        self.check_vertex(v)
        if v not in self.adjacency[u]:
            raise GraphError(f"({u}, {v}) is not an edge")

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for w in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def components(self) -> list[list[int]]:
        """Vertex sets of the connected components, each sorted, ordered by smallest id."""
        seen = [False] * self.vertex_count
        comps = []
        for s in range(self.vertex_count):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [s], [s]
            while stack:
                for w in self.adjacency[stack.pop()]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def relabel(self, perm: Iterable[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.vertex_count)):
            raise GraphError("relabeling must be a permutation of the vertex ids")
        return Graph.from_edges(self.vertex_count,
                                ((perm[u], perm[v]) for u, v in self.edges()))

    def adjacency_matrix(self, dtype=float) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count), dtype=dtype)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def labels(self) -> list:
        """Original labels of the vertices (identity unless a parser recorded a map)."""
        return list(self.meta.get("labels", range(self.vertex_count)))

    def __repr__(self):
        return f"Graph(n={self.vertex_count}, edges={self.edges()})"


# ---------------------------------------------------------------- named graphs

def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, ())


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a simple cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with the center at vertex 0."""
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges())
        offset += g.vertex_count
    return Graph.from_edges(offset, edges)


# ---------------------------------------------------------------- parsing

def parse_edge_list(text: str) -> Graph:
    """Parse whitespace-separated ``u v`` lines over vertices ``0..max_id``.

    Lines starting with ``#`` or ``%`` and blank lines are skipped.
    Duplicate edges collapse; a self-loop raises :class:`GraphError`.
    """
    edges = []
    top = -1
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        tokens = s.split()
        if len(tokens) < 2:
            raise ParseError(f"expected two vertex ids, got {s!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"malformed vertex id in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {s!r}", lineno)
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u, v))
        top = max(top, u, v)
    return Graph.from_edges(top + 1, edges)


def serialize_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges())


def parse_dimacs(text: str) -> Graph:
    """Parse the DIMACS ``p edge n m`` / ``e u v`` format (1-based ids).

    A declared edge count that disagrees with the distinct edges read is
    tolerated; it is counted in ``meta["warnings"]``.
    """
    n = declared_m = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        kind = tokens[0]
        if kind == "p":
            if n is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(tokens) != 4 or tokens[1] not in ("edge", "col"):
                raise ParseError(f"bad problem line {line.strip()!r}", lineno)
            try:
                n, declared_m = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise ParseError(f"bad problem line {line.strip()!r}", lineno) from None
        elif kind == "e":
            if n is None:
                raise ParseError("edge line before 'p edge' header (missing header)", lineno)
            if len(tokens) < 3:
                raise ParseError(f"bad edge line {line.strip()!r}", lineno)
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise ParseError(f"malformed vertex id in {line.strip()!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"vertex id out of range 1..{n} in {line.strip()!r}", lineno)
            if u == v:
                raise GraphError(f"line {lineno}: self-loop at vertex {u}")
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno)
    if n is None:
        raise ParseError("missing 'p edge n m' header")
    meta = {"labels": list(range(1, n + 1)), "warnings": 0}
    g = Graph.from_edges(n, edges, meta)
    if g.m != declared_m:
        g.meta["warnings"] += 1
        log.warning("DIMACS header declares %d edges, read %d distinct", declared_m, g.m)
    return g


def read_graph(path) -> Graph:
    """Load a graph file, picking the format from content (DIMACS, graph6, edge list)."""
    from pathlib import Path
    from .canon import graph6_decode

    path = Path(path)
    text = path.read_text()
    if path.suffix == ".g6":
        lines = [s for s in text.splitlines() if s.strip()]
        if len(lines) != 1:
            raise ParseError(f"{path}: expected exactly one graph6 line, found {len(lines)}")
        return graph6_decode(lines[0].strip())
    for line in text.splitlines():
        tokens = line.split()
        if tokens and tokens[0] in ("p", "e"):
            return parse_dimacs(text)
        if tokens and tokens[0] not in ("c",) and tokens[0][0] not in "#%":
            break
    return parse_edge_list(text)


# ---------------------------------------------------------------- sampling

def er_sample(n: int, p: float, seed: int) -> Graph:
    """G(n, p) sample.

    Uses numpy's PCG64 generator seeded with ``seed``; one uniform draw in
    [0, 1) per unordered pair, pairs visited in lexicographic order, the pair
    kept iff its draw is below ``p``.
    """
    if n < 0:
        raise GraphError("n must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Graph:
    """Subgraph on ``vertices``, relabeled 0..k-1 in ascending original order."""
    keep = sorted(set(vertices))
    for v in keep:
        g.check_vertex(v)
    index = {v: i for i, v in enumerate(keep)}
    edges = [(index[u], index[w]) for u in keep for w in g.adjacency[u]
             if w in index and u < w]
    labels = g.labels()
    return Graph.from_edges(len(keep), edges, {"labels": [labels[v] for v in keep]})


def is_vertex_cover(g: Graph, cover: Iterable[int]) -> bool:
    cover = set(cover)
    for v in cover:
        g.check_vertex(v)
    return all(u in cover or v in cover for u, v in g.edges())
