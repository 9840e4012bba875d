"""Vietoris-Rips persistence in dimensions 0 and 1.

An edge enters the filtration at its length and a triangle at its longest
edge.  Simplices with equal value are ordered by dimension, then by their
sorted vertex tuple.  Dimension 0 is a union-find sweep over the sorted
edges.  Dimension 1 is a Z/2 coboundary reduction over the positive edges
only; the edges that merged components are cleared up front because their
columns can only reduce to zero.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from ._reduction import reduce_filtration, simplex_faces
from .barcode import Barcode
from .minutiae import validate_distance_matrix

ORACLE_MAX_POINTS = 10


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x


def _resolve_cap(dm: np.ndarray, max_scale) -> float:
    if max_scale is None or max_scale == "auto":
        return float(dm.max()) if dm.size else 0.0
    max_scale = float(max_scale)
    if not max_scale > 0:
        raise ValueError("max_scale must be positive")
    return max_scale


def _make_barcode(dim: int, finite, essential_births, cap: float) -> Barcode:
    bars = [(b, d) for b, d in finite if b != d]
    bars.extend((b, cap) for b in essential_births)
    return Barcode(dim, np.array(bars, dtype=float).reshape(-1, 2), cap)


def _triangle_index(i, j, k):
    """Colexicographic rank of the sorted triple ``i < j < k``."""
    return k * (k - 1) * (k - 2) // 6 + j * (j - 1) // 2 + i


def _all_triangles(n: int) -> np.ndarray:
    """Every triple ``i < j < k`` listed in colexicographic rank order."""
    blocks = []
    for k in range(2, n):
        j, i = np.tril_indices(k, -1)
        blocks.append(np.column_stack([i, j, np.full_like(i, k)]))
    if not blocks:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(blocks).astype(np.int64)


def rips_persistence(dm, max_scale=None) -> tuple[Barcode, Barcode]:
    """Dimension-0 and dimension-1 Rips barcodes of a distance matrix.

    ``max_scale`` bounds the filtration (default: the largest distance).
    Classes still alive there are reported as bars ending at ``max_scale``.
    """
    dm = validate_distance_matrix(dm)
    n = len(dm)
    if n == 0:
        raise ValueError("cannot compute persistence of an empty point cloud")
    cap = _resolve_cap(dm, max_scale)

    iu, ju = np.triu_indices(n, 1)
    ev = dm[iu, ju]
    keep = ev <= cap
    iu, ju, ev = iu[keep], ju[keep], ev[keep]
    order = np.lexsort((ju, iu, ev))
    iu, ju, ev = iu[order], ju[order], ev[order]

    uf = UnionFind(n)
    h0_finite = []
    positive = []
    for e, (a, b) in enumerate(zip(iu.tolist(), ju.tolist())):
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            positive.append(e)
            continue
        # every vertex is born at 0, so the elder rule only fixes the root
        if ra < rb:
            uf.parent[rb] = ra
        else:
            uf.parent[ra] = rb
        h0_finite.append((0.0, float(ev[e])))
    n_components = len({uf.find(v) for v in range(n)})
    h0 = _make_barcode(0, h0_finite, [0.0] * n_components, cap)

    h1_finite, h1_essential = _h1_cohomology(dm, n, iu, ju, ev, positive, cap)
    h1 = _make_barcode(1, h1_finite, h1_essential, cap)
    return h0, h1


def _h1_cohomology(dm, n, iu, ju, ev, positive, cap):
    if n < 3 or not positive:
        return [], [float(ev[e]) for e in positive]

    tri = _all_triangles(n)
    tv = np.maximum(np.maximum(dm[tri[:, 0], tri[:, 1]], dm[tri[:, 0], tri[:, 2]]), dm[tri[:, 1], tri[:, 2]])
    inside = tv <= cap
    tri_order = np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0], tv))
    tri_order = tri_order[inside[tri_order]]
    # rank of each triangle in filtration order; -1 marks triangles above the cap
    tri_rank = np.full(len(tri), -1, dtype=np.int64)
    tri_rank[tri_order] = np.arange(len(tri_order))
    rank_value = tv[tri_order]

    others = np.arange(n)
    pivot_owner: dict[int, np.ndarray] = {}
    finite, essential = [], []
    for e in reversed(positive):
        a, b = int(iu[e]), int(ju[e])
        k = others[(others != a) & (others != b)]
        lo = np.minimum(k, a)
        hi = np.maximum(k, b)
        mid = a + b + k - lo - hi
        ranks = tri_rank[_triangle_index(lo, mid, hi)]
        col = np.sort(ranks[ranks >= 0])
        while col.size:
            reducer = pivot_owner.get(int(col[0]))
            if reducer is None:
                break
            col = np.setxor1d(col, reducer, assume_unique=True)
        if col.size:
            pivot_owner[int(col[0])] = col
            finite.append((float(ev[e]), float(rank_value[col[0]])))
        else:
            essential.append(float(ev[e]))
    return finite, essential


def oracle_rips_persistence(dm, max_scale=None) -> tuple[Barcode, Barcode]:
    """Reference implementation: explicit 2-skeleton, textbook reduction.

    Meant for tests only; refuses more than ten points.
    """
    dm = validate_distance_matrix(dm)
    n = len(dm)
    if n == 0:
        raise ValueError("cannot compute persistence of an empty point cloud")
    if n > ORACLE_MAX_POINTS:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_POINTS} points, got {n}")
    cap = _resolve_cap(dm, max_scale)

    cells = []
    for simplex in [(v,) for v in range(n)] + list(combinations(range(n), 2)) + list(combinations(range(n), 3)):
        value = max((float(dm[p, q]) for p, q in combinations(simplex, 2)), default=0.0)
        if value <= cap:
            cells.append((value, len(simplex) - 1, simplex))
    cells.sort()

    finite = {0: [], 1: []}
    essential = {0: [], 1: []}
    for birth, death in reduce_filtration(cells, simplex_faces):
        value, dim, _ = cells[birth]
        if dim > 1:
            continue
        if death is None:
            essential[dim].append(value)
        else:
            finite[dim].append((value, cells[death][0]))
    return (
        _make_barcode(0, finite[0], essential[0], cap),
        _make_barcode(1, finite[1], essential[1], cap),
    )
