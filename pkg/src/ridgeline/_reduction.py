"""Unoptimized Z/2 boundary-matrix reduction shared by the test oracles.

Nothing in the production path calls this; it exists so the fast engines can
be checked against the textbook algorithm on small complexes.
"""
from __future__ import annotations

from itertools import combinations


def reduce_filtration(cells: list[tuple[float, int, tuple]], faces) -> list[tuple[int, int | None]]:
    """Left-to-right column reduction of a filtered complex.

    ``cells`` holds ``(value, dim, key)`` already sorted into filtration
    order; ``faces(key)`` returns the keys of the codimension-one faces.
    Returns ``(birth_index, death_index_or_None)`` for every homology class.
    """
    position = {key: i for i, (_, _, key) in enumerate(cells)}
    columns: list[set[int]] = []
    for _, dim, key in cells:
        columns.append({position[f] for f in faces(key)} if dim > 0 else set())

    low_owner: dict[int, int] = {}
    pairs: list[tuple[int, int | None]] = []
    paired: set[int] = set()
    for j in range(len(columns)):
        col = columns[j]
        while col:
            low = max(col)
            other = low_owner.get(low)
            if other is None:
                break
            col = col ^ columns[other]
        columns[j] = col
        if col:
            low = max(col)
            low_owner[low] = j
            pairs.append((low, j))
            paired.update((low, j))
    for i in range(len(cells)):
        if i not in paired:
            pairs.append((i, None))
    return pairs


def simplex_faces(simplex: tuple) -> list[tuple]:
    if len(simplex) == 1:
        return []
    return [tuple(f) for f in combinations(simplex, len(simplex) - 1)]
