import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ridgeline.learning.matrix import (
    ClassLabel,
    FeatureMatrix,
    abs_correlation,
    correlation_prune,
    cutoff_for_window,
    zscore_and_drop,
)


def fm_of(X, names=None):
    X = np.asarray(X, dtype=float)
    return FeatureMatrix(X, names or [f"c{i}" for i in range(X.shape[1])])


def test_class_tokens():
    assert [c.token for c in ClassLabel] == ["A", "L", "W"]
    assert ClassLabel.from_token(" w ") is ClassLabel.WHORL
    with pytest.raises(ValueError):
        ClassLabel.from_token("X")


def test_zscore_example_and_constant_drop():
    out = zscore_and_drop(fm_of([[1, 5], [2, 5], [3, 5]]))
    assert out.names == ["c0"]
    np.testing.assert_allclose(out.values.ravel(), [-1, 0, 1], atol=1e-15)
    assert out.mean.tolist() == [2.0] and out.sd.tolist() == [1.0]


def test_zscore_errors():
    with pytest.raises(ValueError):
        zscore_and_drop(fm_of([[1, 2]]))
    with pytest.raises(ValueError):
        zscore_and_drop(fm_of([[1, 2], [1, 2]]))


@given(arrays(float, st.tuples(st.integers(2, 12), st.integers(1, 6)), elements=st.floats(-1e3, 1e3)))
def test_zscore_postcondition(X):
    try:
        out = zscore_and_drop(fm_of(X))
    except ValueError:
        return
    assert np.all(np.abs(out.values.mean(axis=0)) < 1e-12)
    assert np.all(np.abs(out.values.std(axis=0, ddof=1) - 1) < 1e-12)


def reference_prune(X, cutoff):
    """Step-by-step restatement of the pruning rule, recomputing correlations each time."""
    alive = list(range(X.shape[1]))
    while len(alive) > 1:
        R = np.abs(np.corrcoef(X[:, alive], rowvar=False))
        np.fill_diagonal(R, 0)
        best, pair = -1.0, None
        for a in range(len(alive)):
            for b in range(a + 1, len(alive)):
                if R[a, b] > best + 1e-12:
                    best, pair = R[a, b], (a, b)
        if best <= cutoff:
            break
        a, b = pair
        mean_a = R[a].sum() / (len(alive) - 1)
        mean_b = R[b].sum() / (len(alive) - 1)
        drop = b if mean_b > mean_a + 1e-12 else a
        alive.pop(drop)
    return alive


def test_identical_columns_lose_one():
    rng = np.random.default_rng(0)
    x = rng.normal(size=20)
    out = correlation_prune(fm_of(np.column_stack([x, x, rng.normal(size=20)])), 0.9)
    assert out.shape[1] == 2


def test_uncorrelated_input_is_unchanged():
    X = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert correlation_prune(fm_of(X), 0.5).names == ["c0", "c1"]


def test_planted_four_column_structure():
    rng = np.random.default_rng(11)
    a = rng.normal(size=40)
    b = rng.normal(size=40)
    X = np.column_stack([
        a,
        a + 0.1 * rng.normal(size=40),
        0.7 * a + 0.7 * b,
        b + 0.3 * rng.normal(size=40),
    ])
    for cutoff in (0.5, 0.7, 0.9, 0.99):
        got = correlation_prune(fm_of(X), cutoff).names
        assert got == [f"c{i}" for i in reference_prune(X, cutoff)], cutoff


@given(arrays(float, st.tuples(st.integers(6, 15), st.integers(2, 6)), elements=st.floats(-10, 10)),
       st.floats(0.05, 0.95))
def test_prune_leaves_no_pair_above_cutoff(X, cutoff):
    out = correlation_prune(fm_of(X), cutoff)
    R = abs_correlation(out.values)
    np.fill_diagonal(R, 0)
    assert (R <= cutoff).all()


@given(st.integers(0, 10_000), st.floats(0.05, 0.95))
def test_prune_matches_reference_on_random_data(seed, cutoff):
    rng = np.random.default_rng(seed)
    base = rng.normal(size=(30, 3))
    X = np.column_stack([base, base @ rng.normal(size=(3, 3)) + 0.5 * rng.normal(size=(30, 3))])
    got = correlation_prune(fm_of(X), cutoff).names
    assert got == [f"c{i}" for i in reference_prune(X, cutoff)]


def test_cutoff_validation():
    with pytest.raises(ValueError):
        correlation_prune(fm_of(np.eye(3)), 1.0)


def test_cutoff_for_window_lands_inside():
    rng = np.random.default_rng(3)
    base = rng.normal(size=(60, 20))
    X = np.column_stack([base, base + 0.2 * rng.normal(size=(60, 20)), base @ rng.normal(size=(20, 60))])
    fm = fm_of(X)
    cutoff, count = cutoff_for_window(fm, 25, 30)
    assert 25 <= count <= 30
    assert correlation_prune(fm, cutoff).shape[1] == count


def test_cutoff_for_window_small_group_keeps_everything():
    fm = fm_of(np.random.default_rng(1).normal(size=(10, 4)))
    cutoff, count = cutoff_for_window(fm, 70, 90)
    assert count == 4 and correlation_prune(fm, cutoff).shape[1] == 4


@given(st.integers(0, 1000))
def test_surviving_count_is_monotone_in_cutoff(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(25, 4)) @ rng.normal(size=(4, 10))
    X += 0.3 * rng.normal(size=X.shape)
    counts = [correlation_prune(fm_of(X), c).shape[1] for c in np.linspace(0.05, 0.95, 19)]
    assert counts == sorted(counts)
