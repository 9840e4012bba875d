"""Linear discriminant analysis with a ridge-stabilized pooled covariance.

The discriminant for class k is::

    delta_k(v) = v' S^-1 mu_k - mu_k' S^-1 mu_k / 2 + log(prior_k)

with ``S = Sigma_W + lam * I`` and ``lam = ridge * trace(Sigma_W) / p``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import CLASSES

DEFAULT_RIDGE = 1e-6


def _ridge_amount(trace, p: int, ridge: float):
    lam = ridge * np.asarray(trace, dtype=float) / p
    # all-zero scatter would leave S singular; fall back to an absolute ridge
    return np.where(np.asarray(trace) > 0, lam, ridge)


def _log_priors(counts: np.ndarray) -> np.ndarray:
    total = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore"):
        return np.where(counts > 0, np.log(counts / total), -np.inf)


@dataclass
class LdaModel:
    classes: tuple
    means: np.ndarray
    covariance: np.ndarray
    ridge_amount: float
    inverse: np.ndarray
    priors: np.ndarray
    feature_names: list[str] | None = None

    def __post_init__(self):
        self._coef = self.inverse @ self.means.T
        with np.errstate(divide="ignore"):
            log_prior = np.where(self.priors > 0, np.log(np.where(self.priors > 0, self.priors, 1.0)), -np.inf)
        self._const = -0.5 * np.einsum("kp,pk->k", self.means, self._coef) + log_prior

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.means.shape[1]:
            raise ValueError(f"expected {self.means.shape[1]} features, got {X.shape[1]}")
        return X @ self._coef + self._const

    def predict(self, X) -> list:
        scores = self.decision_function(X)
        # argmax returns the first maximum, i.e. the earliest class on ties
        return [self.classes[k] for k in np.argmax(scores, axis=1)]


def lda_fit(X, y, classes=None, ridge: float = DEFAULT_RIDGE, feature_names=None) -> LdaModel:
    """Fit class means, pooled within-class covariance and empirical priors.

    ``classes`` fixes the class list (default: sorted labels present).  A
    listed class with no training rows gets prior 0 and is never predicted.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = list(y)
    n, p = X.shape
    if len(y) != n:
        raise ValueError("X and y disagree on the number of rows")
    classes = tuple(sorted(set(y))) if classes is None else tuple(classes)
    codes = np.array([classes.index(label) for label in y])
    K = len(classes)
    if len(set(codes.tolist())) < 2:
        raise ValueError("LDA needs at least two classes in the training data")
    present = len(set(codes.tolist()))
    if n <= present:
        raise ValueError("LDA needs more rows than classes")

    means = np.zeros((K, p))
    counts = np.zeros(K)
    scatter = np.zeros((p, p))
    for k in range(K):
        rows = X[codes == k]
        counts[k] = len(rows)
        if len(rows):
            means[k] = rows.mean(axis=0)
            centered = rows - means[k]
            scatter += centered.T @ centered
    cov = scatter / (n - present)
    lam = float(_ridge_amount(np.trace(cov), p, ridge))
    inverse = np.linalg.inv(cov + lam * np.eye(p))
    return LdaModel(classes, means, cov, lam, inverse, counts / n, feature_names)


def lda_predict(model: LdaModel, row):
    return model.predict(np.asarray(row, dtype=float).reshape(1, -1))[0]


@dataclass
class FoldStats:
    """Per-fold quantities of leave-one-out LDA.

    For fold i (row i held out): ``held[i]`` is the standardized held-out row,
    ``means[i]`` the class means, ``cov[i]`` the pooled within-class
    covariance and ``log_prior[i]`` the class log-priors, all computed from
    the other rows only.
    """

    held: np.ndarray
    means: np.ndarray
    cov: np.ndarray
    log_prior: np.ndarray

    def subset(self, cols) -> "FoldStats":
        cols = np.asarray(cols)
        return FoldStats(
            self.held[:, cols],
            self.means[:, :, cols],
            self.cov[:, cols[:, None], cols[None, :]],
            self.log_prior,
        )


def encode_labels(y, classes=CLASSES) -> np.ndarray:
    classes = tuple(classes)
    return np.array([classes.index(label) for label in y], dtype=np.int64)


def fold_statistics(X, codes, n_classes: int, normalization: str = "fold") -> FoldStats:
    """Leave-one-out statistics for every fold at once.

    ``normalization='fold'`` standardizes each fold with its own training
    rows; ``'global'`` standardizes once with every row.  Standardization is
    per column, so statistics of a column subset are sub-arrays of these.
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if n < 3:
        raise ValueError("leave-one-out needs at least three rows")
    train = np.array([np.delete(np.arange(n), i) for i in range(n)])
    Xtr = X[train]
    if normalization == "fold":
        center = Xtr.mean(axis=1)
        scale = Xtr.std(axis=1, ddof=1)
    elif normalization == "global":
        center = np.broadcast_to(X.mean(axis=0), (n, p))
        scale = np.broadcast_to(X.std(axis=0, ddof=1), (n, p))
    else:
        raise ValueError(f"unknown normalization mode {normalization!r}")
    scale = np.where(scale > 0, scale, 1.0)
    Z = (Xtr - center[:, None, :]) / scale[:, None, :]
    held = (X - center) / scale

    ytr = codes[train]
    onehot = (ytr[:, :, None] == np.arange(n_classes)).astype(float)
    counts = onehot.sum(axis=1)
    means = np.einsum("nik,nip->nkp", onehot, Z) / np.maximum(counts, 1.0)[:, :, None]
    resid = Z - np.take_along_axis(means, ytr[:, :, None], axis=1)
    dof = (n - 1) - (counts > 0).sum(axis=1)
    cov = (resid.transpose(0, 2, 1) @ resid) / dof[:, None, None]
    return FoldStats(held, means, cov, _log_priors(counts))


def fold_scores(stats: FoldStats, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Discriminant scores ``(n, K)`` of each held-out row under its fold model."""
    n, p = stats.held.shape
    lam = _ridge_amount(np.trace(stats.cov, axis1=1, axis2=2), p, ridge)
    A = stats.cov + lam[:, None, None] * np.eye(p)
    coef = np.linalg.solve(A, stats.means.transpose(0, 2, 1))
    linear = np.einsum("np,npk->nk", stats.held, coef)
    quad = np.einsum("nkp,npk->nk", stats.means, coef)
    return linear - 0.5 * quad + stats.log_prior


def removal_scores(stats: FoldStats, candidates, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Fold scores after deleting each candidate column, shape ``(c, n, K)``.

    Uses one eigendecomposition of every fold covariance and the Schur
    complement identity for the inverse of a principal submatrix, so each
    candidate costs O(n p K) instead of a fresh O(n p^3) solve.  The ridge is
    recomputed for the reduced column count exactly as a direct fit would.
    Candidate-dependent sums run along the last axis only, which keeps every
    candidate's result independent of how candidates are batched.
    """
    n, p = stats.held.shape
    K = stats.means.shape[1]
    cand = np.asarray(list(candidates), dtype=np.int64)
    evals, Q = np.linalg.eigh(stats.cov)
    trace = np.trace(stats.cov, axis1=1, axis2=2)
    diag = np.diagonal(stats.cov, axis1=1, axis2=2)
    lam = _ridge_amount(trace[:, None] - diag[:, cand], p - 1, ridge)  # (n, c)
    w = 1.0 / (evals[:, None, :] + lam[:, :, None])  # (n, c, m)
    Qj = Q[:, cand, :]  # (n, c, m)

    vectors = np.concatenate([stats.held[:, None, :], stats.means], axis=1)  # (n, R, p)
    rotated = vectors @ Q  # (n, R, m)
    # drop component j of each vector, expressed in the eigenbasis
    proj = rotated[:, None, :, :] - vectors[:, :, cand].transpose(0, 2, 1)[:, :, :, None] * Qj[:, :, None, :]
    h = (proj * (Qj * w)[:, :, None, :]).sum(axis=-1)  # (n, c, R)
    bjj = (Qj * Qj * w).sum(axis=-1)  # (n, c)

    def quad(r, s):
        full = (proj[:, :, r, :] * proj[:, :, s, :] * w).sum(axis=-1)
        return full - h[:, :, r] * h[:, :, s] / bjj

    scores = np.empty((len(cand), n, K))
    for k in range(K):
        val = quad(0, k + 1) - 0.5 * quad(k + 1, k + 1) + stats.log_prior[:, k][:, None]
        scores[:, :, k] = val.T
    return scores
