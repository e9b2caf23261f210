"""Connected vertex-cover obstruction sets.

``Ob(k)`` holds the minor-minimal graphs with minimum vertex cover above
``k``. Levels are grown from ``Ob(1) = {K3}`` by two local constructions,
subdividing an edge twice (:func:`method1`) and adding a closed twin of a
vertex (:func:`method2`). Every candidate is re-verified before admission.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from .canon import canonical_form, graph6_decode, graph6_encode, read_graph6_lines
from .graph import Graph, GraphError
from .minors import contract_edge, delete_edge, delete_vertex
from .solvers import DEFAULT_BUDGET, UnsolvedError, exact_vc, vc_at_most

log = logging.getLogger(__name__)

PROVENANCE_TAGS = ("seed", "brute-force", "method1", "method2")
BRUTE_FORCE_MAX_K = 3
BRUTE_FORCE_MAX_N = 8


def default_vertex_cap(k: int) -> int:
    return 3 * k + 2


@dataclass
class ObstructionLevel:
    k: int
    members: dict[str, Graph] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    rejected: int = 0
    skipped: int = 0

    @property
    def possibly_incomplete(self) -> bool:
        return self.skipped > 0

    def graphs(self) -> list[Graph]:
        """Members in sorted canonical-code order."""
        return [self.members[c] for c in sorted(self.members)]

    def add(self, g: Graph, tag: str, code: str | None = None) -> bool:
        code = code or canonical_form(g)
        if code in self.members:
            return False
        self.members[code] = graph6_decode(code)
        self.provenance[code] = tag
        return True

    def counts_by_provenance(self) -> dict[str, int]:
        out = dict.fromkeys(PROVENANCE_TAGS, 0)
        for tag in self.provenance.values():
            out[tag] += 1
        return out

    def __len__(self):
        return len(self.members)

    def __contains__(self, g: Graph) -> bool:
        return canonical_form(g) in self.members


def method1(g: Graph, u: int, v: int) -> Graph:
    """Replace edge ``uv`` by the path ``u - a - b - v`` through two new vertices."""
    g.check_edge(u, v)
    a, b = g.n, g.n + 1
    e = (min(u, v), max(u, v))
    edges = [x for x in g.edges() if x != e] + [(u, a), (a, b), (b, v)]
    return Graph.from_edges(g.n + 2, edges)


def method2(g: Graph, v: int) -> Graph:
    """Add a new vertex adjacent to ``v`` and to every neighbor of ``v``."""
    g.check_vertex(v)
    w = g.n
    edges = g.edges() + [(w, v)] + [(w, u) for u in sorted(g.adjacency[v])]
    return Graph.from_edges(g.n + 1, edges)


def is_obstruction(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff vc(g) = k + 1 and every one-step minor of g has vc <= k.

    Raises :class:`UnsolvedError` if any exact solve exceeds ``budget``.
    """
    if k < 0:
        return False
    if vc_at_most(g, k, budget) or not vc_at_most(g, k + 1, budget):
        return False
    edges = g.edges()
    # edge deletions fail most often, so check them first
    for u, v in edges:
        if not vc_at_most(delete_edge(g, u, v), k, budget):
            return False
    for v in range(g.n):
        if not vc_at_most(delete_vertex(g, v), k, budget):
            return False
    for u, v in edges:
        if not vc_at_most(contract_edge(g, u, v), k, budget):
            return False
    return True


def _candidates(level: ObstructionLevel) -> list[tuple[str, Graph, str]]:
    out = {}
    for g in level.graphs():
        for u, v in g.edges():
            h = method1(g, u, v)
            out.setdefault(canonical_form(h), (h, "method1"))
        for v in range(g.n):
            h = method2(g, v)
            out.setdefault(canonical_form(h), (h, "method2"))
    return [(code, h, tag) for code, (h, tag) in out.items()]


def _verify(args):
    code, k, budget = args
    try:
        return is_obstruction(graph6_decode(code), k, budget)
    except UnsolvedError:
        return None


def next_level(level: ObstructionLevel, vertex_cap: int | None = None,
               budget: int = DEFAULT_BUDGET, workers: int = 1) -> ObstructionLevel:
    """Grow ``Ob(k+1)`` candidates from every member of ``level`` and keep the verified ones.

    Candidates over ``vertex_cap`` vertices or exceeding the solver budget
    are skipped and counted; verified-false candidates are counted as rejected.
    """
    k = level.k + 1
    cap = default_vertex_cap(k) if vertex_cap is None else vertex_cap
    out = ObstructionLevel(k)
    cands = sorted(_candidates(level), key=lambda t: t[0])
    todo = []
    for code, h, tag in cands:
        if h.n > cap:
            out.skipped += 1
            log.warning("k=%d: skipping %s (n=%d over cap %d)", k, code, h.n, cap)
        else:
            todo.append((code, tag))
    jobs = [(code, k, budget) for code, _ in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(_verify, jobs, chunksize=4))
    else:
        verdicts = [_verify(j) for j in jobs]
    for (code, tag), ok in zip(todo, verdicts):
        if ok is None:
            out.skipped += 1
            log.warning("k=%d: skipping %s (solver budget exceeded)", k, code)
        elif ok:
            out.add(graph6_decode(code), tag, code)
        else:
            out.rejected += 1
            log.warning("k=%d: %s candidate %s is not an obstruction", k, tag, code)
    return out


def connected_graphs(n_max: int):
    """Yield one representative of every connected graph on 1..n_max vertices.

    Every connected graph on n vertices arises from a connected graph on
    n - 1 vertices plus a vertex joined to a nonempty subset (delete a
    non-cut vertex to see this), so extension level by level is complete.
    """
    if n_max < 1:
        return
    layer = {canonical_form(Graph.from_edges(1, ())): Graph.from_edges(1, ())}
    yield from layer.values()
    for n in range(2, n_max + 1):
        nxt = {}
        for code in sorted(layer):
            g = layer[code]
            base = g.edges()
            for r in range(1, n):
                for nbrs in combinations(range(n - 1), r):
                    h = Graph.from_edges(n, base + [(u, n - 1) for u in nbrs])
                    nxt.setdefault(canonical_form(h), h)
        layer = nxt
        for code in sorted(layer):
            yield layer[code]


def brute_force_obstructions(k: int, n_max: int, budget: int = DEFAULT_BUDGET) -> ObstructionLevel:
    """All connected obstructions of ``Ob(k)`` with at most ``n_max`` vertices, by exhaustion."""
    if not 1 <= k <= BRUTE_FORCE_MAX_K or n_max > BRUTE_FORCE_MAX_N:
        raise GraphError(
            f"brute force is capped at 1 <= k <= {BRUTE_FORCE_MAX_K}, n_max <= {BRUTE_FORCE_MAX_N}")
    out = ObstructionLevel(k)
    for g in connected_graphs(n_max):
        # obstructions for k have vc = k + 1, hence at least k + 2 vertices and k + 1 edges
        if g.n < k + 2 or g.m < k + 1:
            continue
        if is_obstruction(g, k, budget):
            out.add(g, "brute-force")
    return out


def generate_up_to(k_max: int, out_dir=None, budget: int = DEFAULT_BUDGET,
                   workers: int = 1, vertex_cap=None) -> dict[int, ObstructionLevel]:
    """Levels 1..k_max seeded with the exhaustive ``Ob(1)``.

    ``vertex_cap`` maps k to a vertex cap (default ``3k + 2``). With
    ``out_dir`` each level is written as ``obstructions_k{k}_connected.g6``
    plus a ``counts.csv`` summary.
    """
    if k_max < 1:
        raise GraphError("k_max must be at least 1")
    levels = {1: brute_force_obstructions(1, default_vertex_cap(1), budget)}
    for k in range(2, k_max + 1):
        cap = None if vertex_cap is None else vertex_cap(k)
        levels[k] = next_level(levels[k - 1], cap, budget, workers)
        log.info("k=%d: %d obstructions (%d rejected, %d skipped)",
                 k, len(levels[k]), levels[k].rejected, levels[k].skipped)
    if out_dir is not None:
        write_levels(levels, out_dir)
    return levels


def level_path(out_dir, k: int) -> Path:
    return Path(out_dir) / f"obstructions_k{k}_connected.g6"


COUNTS_HEADER = ["k", "count", "seed", "brute_force", "method1", "method2",
                 "rejected", "skipped", "possibly_incomplete"]


def write_levels(levels: dict[int, ObstructionLevel], out_dir) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k, level in sorted(levels.items()):
        with open(level_path(out_dir, k), "w", newline="\n") as f:
            for code in sorted(level.members):
                f.write(code + "\n")
    with open(out_dir / "counts.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COUNTS_HEADER)
        for k, level in sorted(levels.items()):
            c = level.counts_by_provenance()
            w.writerow([k, len(level), c["seed"], c["brute-force"], c["method1"],
                        c["method2"], level.rejected, level.skipped,
                        int(level.possibly_incomplete)])


def read_level(out_dir, k: int) -> ObstructionLevel:
    path = level_path(out_dir, k)
    if not path.exists():
        raise FileNotFoundError(f"missing obstruction level file {path}")
    level = ObstructionLevel(k)
    for g in read_graph6_lines(path):
        level.add(g, "seed")
    return level


def verify_level(level: ObstructionLevel, budget: int = DEFAULT_BUDGET) -> list[str]:
    """Codes of members that fail re-verification (connectivity or obstruction test)."""
    bad = []
    for code in sorted(level.members):
        g = level.members[code]
        if not g.is_connected() or not is_obstruction(g, level.k, budget):
            bad.append(code)
    return bad

