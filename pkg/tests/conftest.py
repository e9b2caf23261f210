"""Independent oracles shared by the test modules.

None of these call into the code paths they check: vertex cover by subset
enumeration, isomorphism by minimizing over every vertex permutation.
"""

from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import strategies as st

from obstructvc.graph import Graph


def brute_vc_size(g: Graph) -> int:
    edges = g.edges()
    for size in range(g.n + 1):
        for sub in combinations(range(g.n), size):
            s = set(sub)
            if all(u in s or v in s for u, v in edges):
                return size
    raise AssertionError("unreachable")


def no_cover_smaller_than(g: Graph, size: int) -> bool:
    edges = g.edges()
    for k in range(size):
        for sub in combinations(range(g.n), k):
            s = set(sub)
            if all(u in s or v in s for u, v in edges):
                return False
    return True


_PERMS = {}


def brute_canonical_key(g: Graph) -> tuple:
    """Smallest upper-triangle bit-string over all n! labelings (numpy-vectorized)."""
    n = g.n
    if n < 2:
        return (n, ())
    if n not in _PERMS:
        _PERMS[n] = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    perms = _PERMS[n]
    a = g.adjacency_matrix(dtype=np.int8)
    iu, ju = np.triu_indices(n, k=1)
    order = np.lexsort((iu, ju))  # graph6 order: column by column
    iu, ju = iu[order], ju[order]
    if iu.size == 0:
        return (n, ())
    bits = a[perms[:, iu], perms[:, ju]]
    best = bits[np.lexsort(bits.T[::-1])[0]]
    return (n, tuple(int(b) for b in np.ravel(best)))


def brute_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and brute_canonical_key(g) == brute_canonical_key(h)


def random_permutation(n, rng):
    return [int(x) for x in rng.permutation(n)]


@st.composite
def graphs(draw, max_n=9, min_n=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
