"""Fixed-length vectors from barcodes: 23 numbers per barcode, 552 per print."""
from __future__ import annotations

import numpy as np

from .barcode import Barcode, barcode_label
from .cubical import IMAGE_SOURCES
from .minutiae import METRIC_KINDS

POLYNOMIAL_NAMES = ("f1", "f2", "f3", "f4", "f5", "f6")
REGRESSION_NAMES = ("c0_1", "c1_1", "c0_2", "c1_2", "c2_2")
STATISTICAL_NAMES = tuple(f"g{i}" for i in range(1, 13))
FEATURE_NAMES = POLYNOMIAL_NAMES + REGRESSION_NAMES + STATISTICAL_NAMES

MINUTIAE_SOURCES = tuple(kind.value for kind in METRIC_KINDS)
MINUTIAE_LABELS = tuple(barcode_label(s, d) for s in MINUTIAE_SOURCES for d in (0, 1))
IMAGE_LABELS = tuple(barcode_label(s, d) for s in IMAGE_SOURCES for d in (0, 1))
BARCODE_LABELS = MINUTIAE_LABELS + IMAGE_LABELS

COLUMN_NAMES = tuple(f"{label}.{name}" for label in BARCODE_LABELS for name in FEATURE_NAMES)


def polynomial_features(bc: Barcode) -> np.ndarray:
    if len(bc) == 0:
        return np.zeros(6)
    n = len(bc)
    length = bc.deaths - bc.births
    gap = bc.deaths.max() - bc.deaths
    f1 = length.sum()
    f3 = (gap * length).sum()
    f5 = (gap**2 * length**4).sum()
    return np.array([f1, n * f1, f3, n * f3, f5, n * f5])


def _poly_fit(z: np.ndarray, degree: int) -> np.ndarray:
    """Least-squares coefficients ``c0..c_degree`` of ``z`` against ranks 1..n."""
    n = len(z)
    out = np.zeros(degree + 1)
    if n == 0:
        return out
    deg = min(degree, n - 1)
    ranks = np.arange(1, n + 1, dtype=float)
    vander = np.vander(ranks, deg + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(vander, z, rcond=None)
    out[: deg + 1] = coef
    return out


def regression_features(bc: Barcode) -> np.ndarray:
    """Line and parabola fitted to the deaths sorted in decreasing order."""
    z = np.sort(bc.deaths)[::-1]
    return np.concatenate([_poly_fit(z, 1), _poly_fit(z, 2)])


def _sd(values: np.ndarray) -> float:
    return float(values.std(ddof=1)) if len(values) > 1 else 0.0


def statistical_features(bc: Barcode) -> np.ndarray:
    if len(bc) == 0:
        return np.zeros(12)
    x, y = bc.births, bc.deaths
    groups = (x, y, y.max() - y, y - x)
    return np.array(
        [v.mean() for v in groups] + [np.median(v) for v in groups] + [_sd(v) for v in groups]
    )


def _canonical(bc: Barcode) -> Barcode:
    # fixed bar order makes every float sum independent of input order
    order = np.lexsort((bc.deaths, bc.births))
    return Barcode(bc.dim, bc.bars[order], bc.scale_cap)


def barcode_features(bc: Barcode) -> np.ndarray:
    """All 23 features in :data:`FEATURE_NAMES` order."""
    bc = _canonical(bc)
    return np.concatenate([polynomial_features(bc), regression_features(bc), statistical_features(bc)])


def featurize_print(barcodes: dict[str, Barcode]) -> np.ndarray:
    """552-vector in :data:`COLUMN_NAMES` order; absent barcodes give zeros."""
    unknown = set(barcodes) - set(BARCODE_LABELS)
    if unknown:
        raise KeyError(f"unknown barcode labels: {sorted(unknown)}")
    blocks = []
    for label in BARCODE_LABELS:
        bc = barcodes.get(label)
        blocks.append(barcode_features(bc) if bc is not None else np.zeros(len(FEATURE_NAMES)))
    return np.concatenate(blocks)


def featurize_labeled(pairs) -> np.ndarray:
    """Like :func:`featurize_print` but from ``(label, Barcode)`` pairs, rejecting duplicates."""
    seen: dict[str, Barcode] = {}
    for label, bc in pairs:
        if label in seen:
            raise KeyError(f"duplicate barcode label {label!r}")
        seen[label] = bc
    return featurize_print(seen)
