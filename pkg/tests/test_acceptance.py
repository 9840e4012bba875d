"""Acceptance criteria, one check per criterion.

Each check prints a PASS/FAIL line (collected into the pytest terminal
summary).  Run directly with ``python tests/test_acceptance.py`` for the
plain listing.
"""
from __future__ import annotations

import functools
import json
import math
import time

import numpy as np
import pytest

from ridgeline.barcode import Barcode
from ridgeline.cubical import cubical_persistence, image_barcode_suite, oracle_cubical_persistence
from ridgeline.features import BARCODE_LABELS, COLUMN_NAMES, barcode_features, featurize_print, polynomial_features
from ridgeline.learning import (
    FeatureMatrix,
    backwards_elimination,
    group_columns,
    lda_fit,
    lda_predict,
    loocv_predictions,
    majority_baseline,
    run_experiment,
)
from ridgeline.learning.experiment import DEFAULT_WINDOW
from ridgeline.learning.matrix import correlation_prune, cutoff_for_window, zscore_and_drop
from ridgeline.minutiae import METRIC_KINDS, MinutiaCloud, distance_matrix, normalize_cloud
from ridgeline.pipeline import minutiae_barcode_suite, synthetic_features
from ridgeline.rips import oracle_rips_persistence, rips_persistence
from ridgeline.synthetic import SynthParams, iter_synthetic

RESULTS: list[str] = []

TWO_BARS_EXPECTED = [
    3, 6, 1, 2, 1, 2,
    3, -1, 3, -1, 0,
    0, 1.5, 0.5, 1.5, 0, 1.5, 0.5, 1.5, 0, math.sqrt(0.5), math.sqrt(0.5), math.sqrt(0.5),
]
N_SHUFFLES = 100


def record(name: str, check) -> None:
    start = time.perf_counter()
    try:
        detail = check()
    except AssertionError as exc:
        RESULTS.append(f"FAIL  {name}: {exc} ({time.perf_counter() - start:.1f}s)")
        print(RESULTS[-1])
        raise
    RESULTS.append(f"PASS  {name}: {detail} ({time.perf_counter() - start:.1f}s)")
    print(RESULTS[-1])


@functools.lru_cache(maxsize=None)
def corpus(seed: int = 42):
    return synthetic_features(SynthParams(seed=seed))


def euclidean(points):
    pts = np.asarray(points, dtype=float)
    return np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))


def check_structure():
    start = time.perf_counter()
    sp = next(iter_synthetic(SynthParams()))
    labeled = minutiae_barcode_suite(MinutiaCloud(sp.minutiae))
    labeled.update(image_barcode_suite(sp.image))
    row = featurize_print(labeled)
    elapsed = time.perf_counter() - start
    assert len(labeled) == 24, f"{len(labeled)} barcodes"
    assert row.shape == (552,) and len(COLUMN_NAMES) == 552 == len(set(COLUMN_NAMES))
    assert len(group_columns(COLUMN_NAMES, "unoriented")) == 46
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    return "24 barcodes, 552 features, 46 unoriented"


def check_oracles():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        # a coarse grid half of the time to force tied filtration values
        if rng.random() < 0.5:
            pts = np.column_stack([rng.integers(0, 4, n), rng.integers(0, 4, n), rng.integers(0, 4, n) * 90])
        else:
            pts = np.column_stack([rng.uniform(0, 500, n), rng.uniform(0, 500, n), rng.uniform(0, 360, n)])
        cloud = normalize_cloud(MinutiaCloud(pts.astype(float)))
        for kind in METRIC_KINDS:
            dm = distance_matrix(cloud, kind)
            fast, slow = rips_persistence(dm), oracle_rips_persistence(dm)
            for a, b in zip(fast, slow):
                assert a.sorted_bars() == b.sorted_bars(), f"rips mismatch, {kind.value}"
    for _ in range(200):
        shape = tuple(int(s) for s in rng.integers(1, 6, 2))
        img = rng.integers(0, 5, shape).astype(float) if rng.random() < 0.5 else rng.random(shape)
        for direction in ("sublevel", "superlevel"):
            fast, slow = cubical_persistence(img, direction), oracle_cubical_persistence(img, direction)
            for a, b in zip(fast, slow):
                assert a.sorted_bars() == b.sorted_bars(), "cubical mismatch"
    elapsed = time.perf_counter() - start
    assert elapsed < 60, f"took {elapsed:.1f}s"
    return "200 clouds x 6 metrics and 200 images x 2 directions agree exactly"


def check_closed_forms():
    _, h1 = rips_persistence(euclidean([[0, 0], [1, 0], [1, 1], [0, 1]]))
    assert len(h1) == 1 and h1.bars[0, 0] == 1.0 and abs(h1.bars[0, 1] - math.sqrt(2)) < 1e-12
    ring = np.zeros((3, 3))
    ring[1, 1] = 1
    _, c1 = cubical_persistence(ring)
    assert c1.sorted_bars() == [(0.0, 1.0)]
    h0, _ = rips_persistence(euclidean([[0], [1], [3]]))
    finite = sorted(h0.deaths.tolist())[:-1]
    assert finite == [1.0, 2.0]
    return "square [1, sqrt2], ring [0, 1], collinear deaths {1, 2}"


def check_feature_formulas():
    got = barcode_features(Barcode(0, [[0, 1], [0, 2]]))
    assert np.max(np.abs(got - TWO_BARS_EXPECTED)) <= 1e-12
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(0, 30))
        births = rng.uniform(-1, 1, n)
        bars = np.column_stack([births, births + rng.exponential(1.0, n)])
        f = polynomial_features(Barcode(0, bars))
        assert f[1] == n * f[0] and f[3] == n * f[2] and f[5] == n * f[4]
    return "23-vector within 1e-12; n-multiples hold on 1000 barcodes"


def check_lda():
    model = lda_fit([[-1.2], [-1.0], [-0.8], [0.8], [1.0], [1.2]], [1, 1, 1, 2, 2, 2])
    assert lda_predict(model, [0.1]) == 2 and lda_predict(model, [-2.0]) == 1
    mu1, mu2 = np.array([1.0, 2.0]), np.array([-0.5, 0.25])
    cov = np.array([[1.0, 0.3], [0.3, 0.5]])
    offsets = (np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]]) * np.sqrt(0.75)) @ np.linalg.cholesky(cov).T
    model = lda_fit(np.vstack([mu1 + offsets, mu2 + offsets]), [0] * 4 + [1] * 4, ridge=0.0)
    w = np.linalg.solve(cov, mu1 - mu2)
    c = -w @ (mu1 + mu2) / 2
    pts = np.random.default_rng(0).normal(size=(100, 2)) * 3
    s = model.decision_function(pts)
    err = np.max(np.abs((s[:, 0] - s[:, 1]) - (pts @ w + c)))
    assert err <= 1e-8, f"hyperplane error {err:.2e}"
    return f"hyperplane error {err:.1e}; 0.1 -> 2, -2 -> 1"


def check_learning_power():
    start = time.perf_counter()
    fm, labels = corpus(42)
    rep = run_experiment(fm, labels, "all", with_correlations=False)
    baseline = majority_baseline(labels)
    # pruning ignores labels, so the null reuses the pruned matrix
    z = zscore_and_drop(fm.select(group_columns(fm.names, "all")))
    cutoff, _ = cutoff_for_window(z, *DEFAULT_WINDOW)
    pruned = correlation_prune(z, cutoff)
    rng = np.random.default_rng(42)
    null = []
    for _ in range(N_SHUFFLES):
        shuffled = [labels[i] for i in rng.permutation(len(labels))]
        null.append(backwards_elimination(pruned, shuffled).peak_accuracy)
    q95 = float(np.percentile(null, 95))
    peak = rep.trace.peak_accuracy
    elapsed = time.perf_counter() - start
    assert peak >= baseline + 0.20, f"peak {peak:.3f} vs baseline {baseline:.3f}"
    saturated = float(np.mean(np.array(null) == 1.0))
    assert peak > q95, (f"peak {peak:.3f} vs null q95 {q95:.3f} (null mean {np.mean(null):.3f}, "
                        f"{100 * saturated:.0f}% of shuffles reach 1.0 with {pruned.shape[1]} features on "
                        f"{pruned.shape[0]} prints)")
    assert elapsed <= 600, f"took {elapsed:.0f}s"
    return f"peak {peak:.3f}, majority {baseline:.3f}, null q95 {q95:.3f}"


def check_ordering():
    peaks = {"all": [], "unoriented": []}
    for seed in range(42, 47):
        fm, labels = corpus(seed)
        for group in peaks:
            peaks[group].append(run_experiment(fm, labels, group, with_correlations=False).trace.peak_accuracy)
    mean_all, mean_unor = np.mean(peaks["all"]), np.mean(peaks["unoriented"])
    assert mean_all >= mean_unor, f"all {mean_all:.3f} < unoriented {mean_unor:.3f}"
    return f"mean peak all {mean_all:.3f} >= unoriented {mean_unor:.3f} over 5 seeds"


def check_invariance():
    # raw minutiae on an integer pixel grid; integer affine maps keep arithmetic exact
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(3, 40))
        pts = np.column_stack([rng.integers(0, 500, n), rng.integers(0, 500, n), rng.integers(0, 360, n)]).astype(float)
        ax, ay = (int(v) for v in rng.integers(1, 9, 2))
        bx, by = (int(v) for v in rng.integers(-300, 300, 2))
        moved = pts.copy()
        moved[:, 0] = ax * pts[:, 0] + bx
        moved[:, 1] = ay * pts[:, 1] + by
        a, b = minutiae_barcode_suite(MinutiaCloud(pts)), minutiae_barcode_suite(MinutiaCloud(moved))
        for label in a:
            assert np.array_equal(a[label].bars, b[label].bars) and a[label].scale_cap == b[label].scale_cap
    for _ in range(50):
        bars = np.sort(rng.random((int(rng.integers(0, 20)), 2)), axis=1)
        perm = rng.permutation(len(bars))
        assert np.array_equal(barcode_features(Barcode(1, bars)), barcode_features(Barcode(1, bars[perm])))

    fm, labels = corpus(42)
    z = zscore_and_drop(fm.select(group_columns(fm.names, "all")))
    keep = correlation_prune(z, cutoff_for_window(z, *DEFAULT_WINDOW)[0]).names
    raw = fm.select(keep)
    for normalization in ("fold", "global"):
        base = loocv_predictions(raw, labels, normalization=normalization)
        X = raw.values.copy()
        for j in range(X.shape[1]):
            X[:, j] = (j % 7 + 0.5) * X[:, j] + (j % 5 - 2) * 10.0
        moved = loocv_predictions(FeatureMatrix(X, raw.names), labels, normalization=normalization)
        assert np.array_equal(base, moved), f"predictions changed ({normalization})"

    serial = run_experiment(fm, labels, "all", workers=1)
    parallel = run_experiment(fm, labels, "all", workers=2)
    dump = lambda r: json.dumps({**r.to_dict(), "corr": r.class_correlations}, sort_keys=True)  # noqa: E731
    assert dump(serial) == dump(parallel), "parallel report differs"
    return "minutiae affine, bar permutation, feature affine, parallel == serial"


def check_end_to_end(tmp_path):
    """User-supplied data in the documented minimal formats runs through every stage."""
    from PIL import Image

    from ridgeline import cli

    data = tmp_path / "user"
    (data / "minutiae").mkdir(parents=True)
    (data / "images").mkdir()
    rows = ["print_id,class,minutiae_path,image_path"]
    params = SynthParams.nist_like(40, image_size=(72, 60))
    for sp in iter_synthetic(params):
        pid = f"sd{sp.print_id}"
        mins = np.round(sp.minutiae).astype(int)
        (data / "minutiae" / f"{pid}.csv").write_text(
            "x,y,theta\n" + "\n".join(f"{x},{y},{t}" for x, y, t in mins) + "\n")
        Image.fromarray(sp.image).save(data / "images" / f"{pid}.png")
        rows.append(f"{pid},{sp.label.token},minutiae/{pid}.csv,images/{pid}.png")
    (data / "manifest.csv").write_text("\n".join(rows) + "\n")
    out = tmp_path / "out"
    groups = "all,minutiae,jpeg,unoriented,dim0,dim1"
    common = ["--dataset", str(data / "manifest.csv"), "--out", str(out)]
    for argv in (["barcodes"], ["features"], ["evaluate", "--group", groups], ["report"]):
        code = cli.main(argv + common)
        assert code == 0, f"{argv[0]} exited {code}"
    summary = json.loads((out / "reports" / "summary.json").read_text())
    assert [r["group"] for r in summary] == groups.split(","), "Table 1 rows"
    for r in summary:
        gdir = out / "reports" / r["group"]
        cm = (gdir / "confusion_smallest.csv").read_text().splitlines()
        assert cm[0] == "actual,pred_arch,pred_loop,pred_whorl,total" and len(cm) == 4, "Table 2 layout"
        assert (gdir / "selected_features.csv").read_text().startswith("barcode,features"), "Table 3 layout"
        corr = (gdir / "class_correlations.csv").read_text().splitlines()
        assert corr[0] == "feature,source,r_whorl,r_loop,r_arch,mean_abs" and len(corr) > 1
    return "6 Table-1 rows with confusion, selected-feature and class-correlation tables"


def test_structural_fidelity():
    record("structural fidelity", check_structure)


def test_persistence_oracle_equivalence():
    record("persistence oracle equivalence", check_oracles)


def test_closed_form_barcodes():
    record("closed-form barcodes", check_closed_forms)


def test_feature_formulas():
    record("feature formulas", check_feature_formulas)


def test_lda_correctness():
    record("LDA correctness", check_lda)


def test_pipeline_learning_power():
    record("pipeline learning power", check_learning_power)


def test_ordering_sanity():
    record("ordering sanity", check_ordering)


def test_invariance_suite():
    record("invariance suite", check_invariance)


def test_end_to_end_user_data(tmp_path):
    record("end-to-end user data", lambda: check_end_to_end(tmp_path))


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    checks = [
        ("structural fidelity", check_structure),
        ("persistence oracle equivalence", check_oracles),
        ("closed-form barcodes", check_closed_forms),
        ("feature formulas", check_feature_formulas),
        ("LDA correctness", check_lda),
        ("pipeline learning power", check_learning_power),
        ("ordering sanity", check_ordering),
        ("invariance suite", check_invariance),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        checks.append(("end-to-end user data", lambda: check_end_to_end(Path(tmp))))
        failed = 0
        for name, fn in checks:
            try:
                record(name, fn)
            except AssertionError:
                failed += 1
    raise SystemExit(1 if failed else 0)
