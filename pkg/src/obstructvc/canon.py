"""graph6 serialization and canonical labeling.

The canonical form is the graph6 string of a relabeled copy of the graph,
chosen identically for every isomorphic input. Search is
individualization-refinement: 1-dimensional color refinement to a stable
coloring, then branching over the vertices of the first non-singleton color
class. Every discrete leaf yields a labeling; the one whose upper-triangle
adjacency bit-string is lexicographically smallest wins. Interchangeable
twin vertices are explored once.
"""

from __future__ import annotations

from .graph import Graph, GraphError, ParseError

CANON_MAX_VERTICES = 64

CanonicalCode = str


# ---------------------------------------------------------------- graph6

def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    if n <= 68719476735:
        return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    raise GraphError(f"graph6 cannot encode n={n}")


def _bits_to_text(bits: list[int]) -> str:
    bits = bits + [0] * (-len(bits) % 6)
    out = []
    for i in range(0, len(bits), 6):
        x = 0
        for b in bits[i:i + 6]:
            x = (x << 1) | b
        out.append(chr(x + 63))
    return "".join(out)


def graph6_encode(g: Graph) -> str:
    adj = g.adjacency
    bits = [1 if i in adj[j] else 0 for j in range(1, g.n) for i in range(j)]
    return _encode_n(g.n) + _bits_to_text(bits)


def graph6_decode(text) -> Graph:
    """Decode one graph6 string (no ``>>graph6<<`` header)."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    text = text.strip("\n")
    if text.startswith(">>graph6<<"):
        raise ParseError("graph6 header variant is not accepted")
    data = [ord(c) - 63 for c in text]
    if not data or any(not 0 <= x <= 63 for x in data):
        raise ParseError(f"malformed graph6 string {text!r}")
    if data[0] < 63:
        n, pos = data[0], 1
    elif len(data) >= 4 and data[1] < 63:
        n, pos = (data[1] << 12) | (data[2] << 6) | data[3], 4
    elif len(data) >= 8 and data[1] == 63:
        n = 0
        for x in data[2:8]:
            n = (n << 6) | x
        pos = 8
    else:
        raise ParseError(f"truncated graph6 size field in {text!r}")
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    body = data[pos:]
    if len(body) != need:
        raise ParseError(f"graph6 body has {len(body)} bytes, expected {need} for n={n}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (body[k // 6] >> (5 - k % 6)) & 1:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def write_graph6_lines(graphs, path) -> None:
    with open(path, "w", newline="\n") as f:
        for g in graphs:
            f.write(graph6_encode(g) + "\n")


def read_graph6_lines(path) -> list[Graph]:
    with open(path) as f:
        return [graph6_decode(line.strip()) for line in f if line.strip()]


# ---------------------------------------------------------------- canonical labeling

def _refine(adj, colors):
    ncolors = len(set(colors))
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v])))
                for v in range(len(adj))]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [rank[s] for s in sigs]
        if len(rank) == ncolors:
            return colors
        ncolors = len(rank)


def _individualize(colors, v):
    sigs = [(c, 0 if u == v else 1) for u, c in enumerate(colors)]
    rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [rank[s] for s in sigs]


def _twins(adj, a, b):
    return adj[a] - {b} == adj[b] - {a}


def _leaf_code(adj, colors):
    n = len(adj)
    inv = [0] * n
    for v, c in enumerate(colors):
        inv[c] = v
    x = 0
    for j in range(1, n):
        aj = adj[inv[j]]
        for i in range(j):
            x = (x << 1) | (inv[i] in aj)
    return x


def canonical_labeling(g: Graph) -> list[int]:
    """Permutation ``perm`` such that ``g.relabel(perm)`` is the canonical representative."""
    if g.n > CANON_MAX_VERTICES:
        raise GraphError(f"canonical labeling is capped at {CANON_MAX_VERTICES} vertices, got {g.n}")
    adj = g.adjacency
    n = g.n
    best_code, best_colors = None, None
    stack = [_refine(adj, [0] * n)]
    while stack:
        colors = stack.pop()
        counts = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        if len(counts) == n:
            code = _leaf_code(adj, colors)
            if best_code is None or code < best_code:
                best_code, best_colors = code, colors
            continue
        target = min(c for c, k in counts.items() if k > 1)
        cell = [v for v in range(n) if colors[v] == target]
        reps = []
        for v in cell:
            if not any(_twins(adj, v, w) for w in reps):
                reps.append(v)
        # reversed so the smallest id is explored first
        for v in reversed(reps):
            stack.append(_refine(adj, _individualize(colors, v)))
    return best_colors if best_colors is not None else []


def canonical_graph(g: Graph) -> Graph:
    return g.relabel(canonical_labeling(g))


def canonical_form(g: Graph) -> CanonicalCode:
    """graph6 string of the canonical representative; equal iff isomorphic."""
    return graph6_encode(canonical_graph(g))


def are_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.m != h.m or sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_form(g) == canonical_form(h)
