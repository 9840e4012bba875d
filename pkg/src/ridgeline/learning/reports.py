"""Class-correlation analysis and the tabular report writers."""
from __future__ import annotations

import csv
import io

import numpy as np

from .matrix import ClassLabel, FeatureMatrix
from .selection import ConfusionMatrix, SelectionTrace

CODINGS = (("r_whorl", ClassLabel.WHORL), ("r_loop", ClassLabel.LOOP), ("r_arch", ClassLabel.ARCH))


def _abs_corr(x: np.ndarray, z: np.ndarray) -> float:
    xc, zc = x - x.mean(), z - z.mean()
    denom = np.sqrt((xc**2).sum() * (zc**2).sum())
    if denom == 0:
        return 0.0
    return float(min(abs((xc * zc).sum()) / denom, 1.0))


def class_correlation_report(fm: FeatureMatrix, labels) -> list[dict]:
    """|corr| of every feature with each one-vs-rest class indicator, plus their mean.

    Rows keep column order, which groups them by barcode source.
    """
    labels = [ClassLabel(label) for label in labels]
    indicators = {key: np.array([lab is cls for lab in labels], dtype=float) for key, cls in CODINGS}
    rows = []
    for j, name in enumerate(fm.names):
        col = fm.values[:, j]
        row = {"feature": name, "source": name.rsplit(".", 1)[0]}
        for key, _ in CODINGS:
            row[key] = _abs_corr(col, indicators[key])
        row["mean_abs"] = (row["r_whorl"] + row["r_loop"] + row["r_arch"]) / 3.0
        rows.append(row)
    return rows


def selected_feature_table(names) -> list[tuple[str, list[str]]]:
    """Group ``source.Hd.feature`` names by barcode, preserving first-seen order."""
    grouped: dict[str, list[str]] = {}
    for name in names:
        label, _, feature = name.rpartition(".")
        grouped.setdefault(label, []).append(feature)
    return list(grouped.items())


def _write(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    return format(float(x), ".17g")


def trace_csv(trace: SelectionTrace) -> str:
    rows = [["", len(trace.feature_names), trace.initial_correct, _num(trace.initial_accuracy)]]
    rows += [[s.removed, s.n_features, s.correct, _num(s.accuracy)] for s in trace.steps]
    return _write(rows, ["removed", "n_features", "correct", "accuracy"])


def confusion_csv(cm: ConfusionMatrix) -> str:
    d = cm.to_dict()
    rows = [[name, *counts, total] for name, counts, total in zip(d["classes"], d["counts"], d["row_totals"])]
    return _write(rows, ["actual", *[f"pred_{c}" for c in d["classes"]], "total"])


def selected_features_csv(names) -> str:
    return _write([[label, " ".join(feats)] for label, feats in selected_feature_table(names)],
                  ["barcode", "features"])


def class_correlation_csv(rows: list[dict]) -> str:
    header = ["feature", "source", "r_whorl", "r_loop", "r_arch", "mean_abs"]
    return _write([[r["feature"], r["source"], *(_num(r[k]) for k in header[2:])] for r in rows], header)


def summary_csv(reports) -> str:
    rows = [[r.group, r.n_candidates, r.n_pruned, _num(r.trace.peak_accuracy),
             " ".join(map(str, r.trace.peak_sizes)), _num(r.majority_baseline)] for r in reports]
    return _write(rows, ["group", "candidates", "after_pruning", "peak_accuracy", "peak_sizes", "majority_baseline"])


def size_ranges(sizes) -> str:
    """Compress a descending run of set sizes: [9, 8, 7, 5] -> "9-7, 5"."""
    runs: list[list[int]] = []
    for s in sizes:
        if runs and runs[-1][-1] - 1 == s:
            runs[-1].append(s)
        else:
            runs.append([s])
    return ", ".join(str(r[0]) if len(r) == 1 else f"{r[0]}-{r[-1]}" for r in runs)


def summary_text(reports) -> str:
    lines = [f"{'group':<12}{'features':>10}{'pruned':>8}{'peak':>9}  sizes"]
    for r in reports:
        sizes = size_ranges(r.trace.peak_sizes)
        lines.append(f"{r.group:<12}{r.n_candidates:>10}{r.n_pruned:>8}{100 * r.trace.peak_accuracy:>8.1f}%  {sizes}")
    return "\n".join(lines)
