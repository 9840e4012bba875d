import numpy as np
import pytest

from ridgeline.learning.lda import encode_labels, fold_scores, fold_statistics, lda_fit, lda_predict, removal_scores
from ridgeline.learning.matrix import ClassLabel


def test_symmetric_one_dimensional_toy():
    X = np.array([[-1.2], [-1.0], [-0.8], [0.8], [1.0], [1.2]])
    y = [1, 1, 1, 2, 2, 2]
    model = lda_fit(X, y)
    assert lda_predict(model, [0.1]) == 2
    assert lda_predict(model, [-2.0]) == 1
    scores = model.decision_function([[0.0]])[0]
    assert scores[0] == pytest.approx(scores[1], abs=1e-12)


def test_two_dimensional_closed_form():
    mu1, mu2 = np.array([1.0, 2.0]), np.array([-0.5, 0.25])
    cov = np.array([[1.0, 0.3], [0.3, 0.5]])
    # rows chosen so the sample means and pooled covariance are exactly mu and cov
    L = np.linalg.cholesky(cov)
    offsets = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float) * np.sqrt(3 / 4)
    offsets = offsets @ L.T
    X = np.vstack([mu1 + offsets, mu2 + offsets])
    y = ["a"] * 4 + ["b"] * 4
    model = lda_fit(X, y, ridge=0.0)
    np.testing.assert_allclose(model.covariance, cov, atol=1e-12)
    # boundary: w.v + c = 0 with w = S^-1 (mu1 - mu2), c = -w.(mu1 + mu2)/2 (equal priors)
    w = np.linalg.solve(cov, mu1 - mu2)
    c = -w @ (mu1 + mu2) / 2
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(50, 2)) * 3
    scores = model.decision_function(pts)
    np.testing.assert_allclose(scores[:, 0] - scores[:, 1], pts @ w + c, atol=1e-8)


def test_duplicated_data_gives_same_model():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(12, 3))
    y = [0, 1, 2] * 4
    a = lda_fit(X, y, ridge=0.0)
    b = lda_fit(np.vstack([X, X]), y + y, ridge=0.0)
    np.testing.assert_allclose(a.means, b.means, atol=1e-12)
    # the pooled covariance divides by n - K, so doubling rescales it slightly
    np.testing.assert_allclose(a.covariance * (12 - 3) / (24 - 3) * 2, b.covariance, atol=1e-12)
    np.testing.assert_allclose(a.priors, b.priors)


def test_row_at_class_mean_is_that_class():
    X = np.array([[0, 0], [0.1, 0], [0, 0.1], [5, 5], [5.1, 5], [5, 5.1]], dtype=float)
    model = lda_fit(X, [0, 0, 0, 1, 1, 1])
    assert lda_predict(model, model.means[1]) == 1


def test_ties_break_by_class_order():
    X = np.array([[-1.0], [-1.0], [1.0], [1.0]])
    model = lda_fit(X, [ClassLabel.WHORL, ClassLabel.WHORL, ClassLabel.ARCH, ClassLabel.ARCH])
    assert lda_predict(model, [0.0]) is ClassLabel.ARCH


def test_larger_prior_wins_at_equidistant_point():
    X = np.array([[-1.1], [-0.9], [0.9], [1.1], [0.95], [1.05]])
    model = lda_fit(X, [0, 0, 1, 1, 1, 1])
    assert lda_predict(model, [0.0]) == 1


def test_singleton_class_keeps_its_mean():
    X = np.array([[0.0], [0.2], [0.1], [9.0]])
    model = lda_fit(X, [0, 0, 0, 1])
    assert model.means[1, 0] == 9.0
    assert lda_predict(model, [8.0]) == 1


def test_errors():
    with pytest.raises(ValueError):
        lda_fit([[0.0], [1.0]], [0, 0])
    with pytest.raises(ValueError):
        lda_fit([[0.0], [1.0]], [0, 1])
    model = lda_fit([[0.0], [0.1], [1.0], [1.1]], [0, 0, 1, 1])
    with pytest.raises(ValueError):
        lda_predict(model, [0.0, 1.0])


def test_singular_covariance_is_regularized():
    X = np.array([[0, 0], [1, 0], [2, 0], [0, 1], [1, 1], [2, 1]], dtype=float)
    model = lda_fit(X, [0, 0, 0, 1, 1, 1])
    assert model.ridge_amount > 0
    assert np.all(np.isfinite(model.inverse))


def naive_loocv_scores(X, codes, normalization):
    n = len(X)
    out = []
    for i in range(n):
        keep = np.delete(np.arange(n), i)
        src = X[keep] if normalization == "fold" else X
        mu, sd = src.mean(axis=0), src.std(axis=0, ddof=1)
        Z = (X[keep] - mu) / sd
        model = lda_fit(Z, codes[keep], classes=(0, 1, 2))
        out.append(model.decision_function((X[i] - mu) / sd)[0])
    return np.array(out)


@pytest.mark.parametrize("normalization", ["fold", "global"])
def test_batched_folds_match_naive_loop(normalization):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(24, 5)) + np.repeat(np.eye(3, 5) * 2, 8, axis=0)
    codes = np.repeat([0, 1, 2], 8)
    stats = fold_statistics(X, codes, 3, normalization)
    np.testing.assert_allclose(fold_scores(stats), naive_loocv_scores(X, codes, normalization), rtol=1e-9, atol=1e-9)


def test_fold_without_a_class_never_predicts_it():
    X = np.array([[0.0], [0.1], [0.2], [1.0], [1.1], [5.0]])
    codes = np.array([0, 0, 0, 1, 1, 2])
    scores = fold_scores(fold_statistics(X, codes, 3))
    assert scores[5, 2] == -np.inf


def test_removal_scores_match_direct_refits():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(30, 6))
    codes = np.repeat([0, 1, 2], 10)
    stats = fold_statistics(X, codes, 3)
    fast = removal_scores(stats, range(6))
    for j in range(6):
        cols = [c for c in range(6) if c != j]
        np.testing.assert_allclose(fast[j], fold_scores(stats.subset(cols)), rtol=1e-7, atol=1e-7)


def test_encode_labels():
    assert encode_labels([ClassLabel.WHORL, ClassLabel.ARCH]).tolist() == [2, 0]
