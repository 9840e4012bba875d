"""Feature matrices, class labels, standardization and correlation pruning."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class ClassLabel(enum.IntEnum):
    """Pattern classes; the integer order is the tie-break order."""

    ARCH = 0
    LOOP = 1
    WHORL = 2

    @property
    def token(self) -> str:
        return self.name[0]

    @classmethod
    def from_token(cls, token: str) -> "ClassLabel":
        for label in cls:
            if label.token == token.strip().upper():
                return label
        raise ValueError(f"unknown class token {token!r}")


CLASSES = tuple(ClassLabel)


@dataclass
class FeatureMatrix:
    """``n_prints x p`` values with column names.

    ``mean`` and ``sd`` hold the statistics used for standardization once
    :func:`zscore_and_drop` has been applied.
    """

    values: np.ndarray
    names: list[str]
    mean: np.ndarray | None = None
    sd: np.ndarray | None = None
    row_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("values must be 2-D with one column per name")
        self.names = list(self.names)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def columns(self, keep) -> "FeatureMatrix":
        keep = list(keep)
        return FeatureMatrix(
            self.values[:, keep],
            [self.names[i] for i in keep],
            None if self.mean is None else self.mean[keep],
            None if self.sd is None else self.sd[keep],
            list(self.row_ids),
        )

    def select(self, names) -> "FeatureMatrix":
        index = {name: i for i, name in enumerate(self.names)}
        return self.columns(index[name] for name in names)


def zero_variance(col_sd: np.ndarray, col_absmax: np.ndarray) -> np.ndarray:
    return col_sd <= 1e-12 * np.maximum(col_absmax, 1.0)


def zscore_and_drop(fm: FeatureMatrix) -> FeatureMatrix:
    """Drop constant columns and standardize the rest (sample SD)."""
    n = fm.shape[0]
    if n < 2:
        raise ValueError("standardization needs at least two rows")
    X = fm.values
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    keep = np.flatnonzero(~zero_variance(sd, np.abs(X).max(axis=0)))
    if keep.size == 0:
        raise ValueError("every feature column has zero variance")
    Z = (X[:, keep] - mean[keep]) / sd[keep]
    return FeatureMatrix(Z, [fm.names[i] for i in keep], mean[keep], sd[keep], list(fm.row_ids))


def abs_correlation(X: np.ndarray) -> np.ndarray:
    """Absolute Pearson correlations; pairs involving a constant column are 0."""
    Xc = X - X.mean(axis=0)
    norm = np.sqrt((Xc**2).sum(axis=0))
    safe = np.where(norm > 0, norm, 1.0)
    R = np.abs((Xc / safe).T @ (Xc / safe))
    R[:, norm == 0] = 0.0
    R[norm == 0, :] = 0.0
    np.fill_diagonal(R, 1.0)
    return np.clip(R, 0.0, 1.0)


def correlation_path(X: np.ndarray) -> tuple[list[int], list[float]]:
    """Full removal sequence of the pruning rule.

    At every step the remaining pair with the largest absolute correlation is
    found (first in row-major order on ties) and the member with the larger
    mean absolute correlation against the other remaining columns is removed;
    on equal means the lower index goes.  Returns the removed column indices
    and, for each removal, the pair correlation that triggered it.  These
    trigger values never increase, so stopping at the first one that does not
    exceed a cutoff gives the pruned set for that cutoff.
    """
    p = X.shape[1]
    R = abs_correlation(X)
    work = R.copy()
    np.fill_diagonal(work, -1.0)
    alive = np.ones(p, dtype=bool)
    removed, triggers = [], []
    for _ in range(p - 1):
        flat = int(np.argmax(work))
        i, j = divmod(flat, p)
        i, j = min(i, j), max(i, j)
        top = float(work[i, j])
        if top < 0:
            break
        # the self-correlation of 1 is common to both sums, so it cancels
        mean_i = R[i, alive].sum()
        mean_j = R[j, alive].sum()
        drop = j if mean_j > mean_i else i
        removed.append(drop)
        triggers.append(top)
        alive[drop] = False
        work[drop, :] = -1.0
        work[:, drop] = -1.0
    return removed, triggers


def prune_count(p: int, triggers: list[float], cutoff: float) -> int:
    """Number of surviving columns when pruning stops at ``cutoff``."""
    return p - sum(1 for t in triggers if t > cutoff)


def correlation_prune(fm: FeatureMatrix, cutoff: float) -> FeatureMatrix:
    """Remove columns until no remaining pair has ``|corr| > cutoff``."""
    if not 0 < cutoff < 1:
        raise ValueError("cutoff must lie strictly between 0 and 1")
    removed, triggers = correlation_path(fm.values)
    n_drop = sum(1 for t in triggers if t > cutoff)
    gone = set(removed[:n_drop])
    return fm.columns(i for i in range(fm.shape[1]) if i not in gone)


def _window_gap(count: int, lo: int, hi: int) -> int:
    return max(lo - count, count - hi, 0)


def cutoff_for_window(fm: FeatureMatrix, lo: int, hi: int, iterations: int = 60) -> tuple[float, int]:
    """Bisect a cutoff whose pruned set has between ``lo`` and ``hi`` columns.

    The surviving count is non-decreasing in the cutoff.  If no cutoff lands
    inside the window the closest achievable count is used.  Returns the
    cutoff and the surviving count.
    """
    p = fm.shape[1]
    _, triggers = correlation_path(fm.values)
    top = np.nextafter(1.0, 0.0)
    if prune_count(p, triggers, top) <= hi:
        return float(top), prune_count(p, triggers, top)
    left, right = 0.0, float(top)
    best = (float(top), prune_count(p, triggers, top))
    for _ in range(iterations):
        mid = 0.5 * (left + right)
        count = prune_count(p, triggers, mid)
        if lo <= count <= hi:
            return mid, count
        if _window_gap(count, lo, hi) < _window_gap(best[1], lo, hi):
            best = (mid, count)
        if count > hi:
            right = mid
        else:
            left = mid
    return best
