"""Cubical persistence of grayscale images and the image transforms around it.

Pixels are vertices.  An edge joins 4-adjacent pixels and a square joins the
four pixels of a 2x2 block; each cell takes the largest pixel value it
touches.  Cells with equal value are ordered by dimension, then by the
sorted tuple of their flat pixel indices.

Dimension 0 is a union-find sweep with the elder rule.  Dimension 1 uses the
planar dual: squares become nodes, the outside of the grid is one extra
node, and every edge links the two regions it separates.  Sweeping edges in
reverse filtration order and merging regions pairs each cycle-creating edge
with the square that kills its cycle.
"""
from __future__ import annotations

import enum

import numpy as np

from ._reduction import reduce_filtration
from .barcode import Barcode, barcode_label

ORACLE_MAX_PIXELS = 36


class SlantKind(str, enum.Enum):
    X = "x"
    Y = "y"
    XY = "xy"


IMAGE_SOURCES = ("surface", "y_slant", "x_slant", "thr_y_slant", "thr_x_slant", "thr_xy_slant")


def _as_image(img) -> np.ndarray:
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image values must be finite")
    return arr


def invert_normalize(img) -> np.ndarray:
    """Invert (background becomes dark), then rescale to ``[0, 1]``."""
    arr = _as_image(img)
    inv = arr.max() - arr
    lo, hi = inv.min(), inv.max()
    if hi == lo:
        return np.zeros_like(inv)
    return (inv - lo) / (hi - lo)


def _axis_weights(n: int) -> np.ndarray:
    if n == 1:
        return np.zeros(1)
    return np.arange(n) / (n - 1)


def slant(img, kind: SlantKind) -> np.ndarray:
    """Multiply by ``x``, ``y`` or ``x*y`` with pixel coordinates scaled to ``[0, 1]``.

    ``x`` runs along columns and ``y`` along rows, origin at the top-left.
    """
    arr = _as_image(img)
    kind = SlantKind(kind)
    xs = _axis_weights(arr.shape[1])[None, :]
    ys = _axis_weights(arr.shape[0])[:, None]
    if kind is SlantKind.X:
        weight = np.broadcast_to(xs, arr.shape)
    elif kind is SlantKind.Y:
        weight = np.broadcast_to(ys, arr.shape)
    else:
        weight = ys * xs
    return arr * weight


def threshold_mean(img) -> np.ndarray:
    """1 where a value is at least the image mean, else 0."""
    arr = _as_image(img)
    # a rounded mean can land just above a constant image's value
    mean = min(arr.mean(), arr.max())
    return (arr >= mean).astype(float)


def _grid_edges(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(rows * cols).reshape(rows, cols)
    horiz = np.column_stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()])
    vert = np.column_stack([idx[:-1, :].ravel(), idx[1:, :].ravel()])
    return horiz, vert


def cubical_persistence(img, direction: str = "sublevel") -> tuple[Barcode, Barcode]:
    """Dimension-0 and dimension-1 barcodes of an image filtration.

    Superlevel persistence is the sublevel persistence of the negated image;
    its endpoints are reported on that negated (increasing) scale.
    """
    arr = _as_image(img)
    if direction == "superlevel":
        arr = -arr
    elif direction != "sublevel":
        raise ValueError(f"direction must be 'sublevel' or 'superlevel', got {direction!r}")
    rows, cols = arr.shape
    vals = arr.ravel()
    cap = float(vals.max())

    horiz, vert = _grid_edges(rows, cols)
    edges = np.concatenate([horiz, vert])
    ev = np.maximum(vals[edges[:, 0]], vals[edges[:, 1]])
    order = np.lexsort((edges[:, 1], edges[:, 0], ev))
    edges, ev = edges[order], ev[order]

    h0 = _sublevel_h0(vals, edges, ev, cap)
    h1 = _sublevel_h1(vals, rows, cols, edges, ev, cap)
    return h0, h1


def _sublevel_h0(vals, edges, ev, cap) -> Barcode:
    n = len(vals)
    # vertex age: position in (value, index) order, smaller is older
    age = np.empty(n, dtype=np.int64)
    age[np.lexsort((np.arange(n), vals))] = np.arange(n)
    age = age.tolist()
    parent = list(range(n))
    births = vals.tolist()
    bars = []
    for (a, b), value in zip(edges.tolist(), ev.tolist()):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if age[a] > age[b]:
            a, b = b, a
        parent[b] = a
        if births[b] != value:
            bars.append((births[b], value))
    bars.append((float(vals.min()), cap))
    return Barcode(0, np.array(bars, dtype=float).reshape(-1, 2), cap)


def _sublevel_h1(vals, rows, cols, edges, ev, cap) -> Barcode:
    if rows < 2 or cols < 2:
        return Barcode(1, np.empty((0, 2)), cap)
    grid = vals.reshape(rows, cols)
    sq_vals = np.maximum(np.maximum(grid[:-1, :-1], grid[:-1, 1:]), np.maximum(grid[1:, :-1], grid[1:, 1:])).ravel()
    n_sq = len(sq_vals)
    outside = n_sq
    # square age by (value, top-left index); the outside node is the eldest
    age = np.empty(n_sq + 1, dtype=np.int64)
    age[np.lexsort((np.arange(n_sq), sq_vals))] = np.arange(n_sq)
    age[outside] = n_sq
    age = age.tolist()
    sq_list = sq_vals.tolist()

    a, b = edges[:, 0], edges[:, 1]
    r, c = a // cols, a % cols
    is_h = b == a + 1
    sq_cols = cols - 1
    # the two squares on either side of each edge, or the outside node
    side1 = np.where(is_h, (r - 1) * sq_cols + c, r * sq_cols + c - 1)
    ok1 = np.where(is_h, r >= 1, c >= 1)
    side2 = np.where(is_h, r * sq_cols + c, r * sq_cols + c)
    ok2 = np.where(is_h, r < rows - 1, c < cols - 1)
    side1 = np.where(ok1, side1, outside).tolist()
    side2 = np.where(ok2, side2, outside).tolist()

    parent = list(range(n_sq + 1))
    bars = []
    for e in range(len(ev) - 1, -1, -1):
        p, q = side1[e], side2[e]
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        while parent[q] != q:
            parent[q] = parent[parent[q]]
            q = parent[q]
        if p == q:
            continue
        # the region whose generating square came later in reverse order dies
        if age[p] < age[q]:
            p, q = q, p
        parent[q] = p
        birth, death = float(ev[e]), sq_list[q]
        if birth != death:
            bars.append((birth, death))
    return Barcode(1, np.array(bars, dtype=float).reshape(-1, 2), cap)


def oracle_cubical_persistence(img, direction: str = "sublevel") -> tuple[Barcode, Barcode]:
    """Reference implementation: explicit cubical complex, textbook reduction.

    Meant for tests only; refuses images larger than 36 pixels.
    """
    arr = _as_image(img)
    if arr.size > ORACLE_MAX_PIXELS:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_PIXELS} pixels")
    if direction == "superlevel":
        arr = -arr
    rows, cols = arr.shape
    v = arr.ravel()
    cells = [(float(v[p]), 0, (p,)) for p in range(rows * cols)]
    for r in range(rows):
        for c in range(cols):
            p = r * cols + c
            if c + 1 < cols:
                cells.append((float(max(v[p], v[p + 1])), 1, (p, p + 1)))
            if r + 1 < rows:
                cells.append((float(max(v[p], v[p + cols])), 1, (p, p + cols)))
            if r + 1 < rows and c + 1 < cols:
                quad = (p, p + 1, p + cols, p + cols + 1)
                cells.append((float(max(v[i] for i in quad)), 2, quad))
    cells.sort()

    def faces(key):
        if len(key) == 2:
            return [(key[0],), (key[1],)]
        p, p1, pc, pc1 = key
        return [(p, p1), (pc, pc1), (p, pc), (p1, pc1)]

    cap = float(v.max())
    bars = {0: [], 1: []}
    for birth, death in reduce_filtration(cells, faces):
        value, dim, _ = cells[birth]
        if dim > 1:
            continue
        if death is None:
            bars[dim].append((value, cap))
        elif cells[death][0] != value:
            bars[dim].append((value, cells[death][0]))
    return tuple(Barcode(d, np.array(bars[d], dtype=float).reshape(-1, 2), cap) for d in (0, 1))


def image_barcode_suite(raw) -> dict[str, Barcode]:
    """The twelve image barcodes of one print, keyed ``<source>.H<dim>``."""
    base = invert_normalize(raw)
    thresholded = threshold_mean(base)
    filtrations = {
        "surface": (base, "superlevel"),
        "y_slant": (slant(base, SlantKind.Y), "superlevel"),
        "x_slant": (slant(base, SlantKind.X), "superlevel"),
        "thr_y_slant": (slant(thresholded, SlantKind.Y), "sublevel"),
        "thr_x_slant": (slant(thresholded, SlantKind.X), "sublevel"),
        "thr_xy_slant": (slant(thresholded, SlantKind.XY), "sublevel"),
    }
    out: dict[str, Barcode] = {}
    for source in IMAGE_SOURCES:
        matrix, direction = filtrations[source]
        h0, h1 = cubical_persistence(matrix, direction)
        out[barcode_label(source, 0)] = h0
        out[barcode_label(source, 1)] = h1
    return out
