"""One row of the peak-accuracy table: group -> prune -> eliminate -> report."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features import BARCODE_LABELS, IMAGE_LABELS, MINUTIAE_LABELS
from .lda import DEFAULT_RIDGE, encode_labels
from .matrix import CLASSES, FeatureMatrix, correlation_prune, cutoff_for_window, zscore_and_drop
from .reports import class_correlation_report
from .selection import ConfusionMatrix, SelectionTrace, backwards_elimination, loocv_accuracy

GROUPS = {
    "all": BARCODE_LABELS,
    "minutiae": MINUTIAE_LABELS,
    "jpeg": IMAGE_LABELS,
    "unoriented": ("unoriented.H0", "unoriented.H1"),
    "dim0": tuple(label for label in BARCODE_LABELS if label.endswith(".H0")),
    "dim1": tuple(label for label in BARCODE_LABELS if label.endswith(".H1")),
}
# groups small enough that the correlation window is not applied
UNPRUNED_GROUPS = ("unoriented",)
DEFAULT_WINDOW = (70, 90)


def group_columns(names, group: str) -> list[str]:
    if group not in GROUPS:
        raise KeyError(f"unknown feature group {group!r}; choose from {', '.join(GROUPS)}")
    labels = set(GROUPS[group])
    return [name for name in names if name.rsplit(".", 1)[0] in labels]


@dataclass
class ExperimentReport:
    group: str
    n_candidates: int
    n_nonconstant: int
    cutoff: float | None
    n_pruned: int
    trace: SelectionTrace
    peak_confusions: list[ConfusionMatrix]
    majority_baseline: float
    class_correlations: list[dict]

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "n_candidates": self.n_candidates,
            "n_nonconstant": self.n_nonconstant,
            "cutoff": self.cutoff,
            "n_pruned": self.n_pruned,
            "peak_accuracy": self.trace.peak_accuracy,
            "peak_sizes": self.trace.peak_sizes,
            "majority_baseline": self.majority_baseline,
            "peak_confusions": [cm.to_dict() for cm in self.peak_confusions],
            "trace": self.trace.to_dict(),
        }


def majority_baseline(labels) -> float:
    codes = encode_labels(labels)
    return float(np.bincount(codes, minlength=len(CLASSES)).max() / len(codes))


def run_experiment(fm: FeatureMatrix, labels, group: str = "all", *, window=DEFAULT_WINDOW,
                   normalization: str = "fold", ridge: float = DEFAULT_RIDGE, workers: int = 1,
                   with_correlations: bool = True) -> ExperimentReport:
    """Filter to ``group``, standardize, prune into ``window``, then eliminate."""
    cols = group_columns(fm.names, group)
    if not cols:
        raise ValueError(f"group {group!r} has no columns in this feature matrix")
    z = zscore_and_drop(fm.select(cols))
    if group in UNPRUNED_GROUPS:
        cutoff, pruned = None, z
    else:
        cutoff, _ = cutoff_for_window(z, *window)
        pruned = correlation_prune(z, cutoff)
    if pruned.shape[1] < 2:
        raise ValueError(f"group {group!r} keeps fewer than two usable features")
    trace = backwards_elimination(pruned, labels, normalization=normalization, ridge=ridge, workers=workers)
    confusions = [
        loocv_accuracy(pruned, labels, names, normalization=normalization, ridge=ridge)[1]
        for names in trace.peak_sets
    ]
    correlations = class_correlation_report(z, labels) if with_correlations else []
    return ExperimentReport(group, len(cols), z.shape[1], cutoff, pruned.shape[1], trace, confusions,
                            majority_baseline(labels), correlations)
