"""Leave-one-out evaluation and greedy backwards elimination."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lda import DEFAULT_RIDGE, FoldStats, encode_labels, fold_scores, fold_statistics, removal_scores
from .matrix import CLASSES, FeatureMatrix


@dataclass
class ConfusionMatrix:
    """Counts with rows = actual class and columns = predicted class."""

    counts: np.ndarray
    classes: tuple = CLASSES

    @classmethod
    def from_predictions(cls, actual, predicted, classes=CLASSES) -> "ConfusionMatrix":
        K = len(classes)
        counts = np.zeros((K, K), dtype=np.int64)
        np.add.at(counts, (np.asarray(actual), np.asarray(predicted)), 1)
        return cls(counts, tuple(classes))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else 0.0

    def per_class_accuracy(self) -> dict[str, float]:
        out = {}
        for k, label in enumerate(self.classes):
            row = int(self.counts[k].sum())
            out[_class_name(label)] = float(self.counts[k, k] / row) if row else float("nan")
        return out

    def to_dict(self) -> dict:
        names = [_class_name(c) for c in self.classes]
        return {
            "classes": names,
            "counts": self.counts.tolist(),
            "row_totals": self.counts.sum(axis=1).tolist(),
            "accuracy": self.accuracy,
            "per_class_accuracy": self.per_class_accuracy(),
        }


def _class_name(label) -> str:
    return label.name.lower() if hasattr(label, "name") else str(label)


def loocv_predictions(fm: FeatureMatrix, labels, subset=None, *, normalization="fold",
                      ridge=DEFAULT_RIDGE, classes=CLASSES) -> np.ndarray:
    codes = encode_labels(labels, classes)
    X = fm.values if subset is None else fm.select(subset).values
    if X.shape[1] == 0:
        raise ValueError("feature subset is empty")
    stats = fold_statistics(X, codes, len(classes), normalization)
    return np.argmax(fold_scores(stats, ridge), axis=1)


def loocv_accuracy(fm: FeatureMatrix, labels, subset=None, *, normalization="fold",
                   ridge=DEFAULT_RIDGE, classes=CLASSES) -> tuple[float, ConfusionMatrix]:
    """Accuracy and confusion matrix of leave-one-out LDA on ``subset`` columns."""
    codes = encode_labels(labels, classes)
    pred = loocv_predictions(fm, labels, subset, normalization=normalization, ridge=ridge, classes=classes)
    cm = ConfusionMatrix.from_predictions(codes, pred, classes)
    return cm.accuracy, cm


@dataclass
class EliminationStep:
    removed: str
    n_features: int
    correct: int
    accuracy: float


@dataclass
class SelectionTrace:
    """Backwards-elimination record.

    ``initial_*`` describe the starting set; each step removes one feature.
    ``peak_sets`` lists every evaluated feature set that reached the peak,
    largest first.
    """

    feature_names: list[str]
    n_rows: int
    initial_correct: int
    steps: list[EliminationStep] = field(default_factory=list)
    peak_correct: int = 0
    peak_sets: list[list[str]] = field(default_factory=list)

    @property
    def initial_accuracy(self) -> float:
        return self.initial_correct / self.n_rows

    @property
    def peak_accuracy(self) -> float:
        return self.peak_correct / self.n_rows

    @property
    def peak_sizes(self) -> list[int]:
        return [len(s) for s in self.peak_sets]

    def to_dict(self) -> dict:
        return {
            "features": list(self.feature_names),
            "n_rows": self.n_rows,
            "initial_accuracy": self.initial_accuracy,
            "steps": [
                {"removed": s.removed, "n_features": s.n_features, "correct": s.correct, "accuracy": s.accuracy}
                for s in self.steps
            ],
            "peak_accuracy": self.peak_accuracy,
            "peak_sizes": self.peak_sizes,
            "peak_sets": [list(s) for s in self.peak_sets],
        }


def _count_correct(stats: FoldStats, positions, codes, ridge) -> np.ndarray:
    scores = removal_scores(stats, positions, ridge)
    return (np.argmax(scores, axis=2) == codes[None, :]).sum(axis=1)


def _chunks(seq, k):
    size = -(-len(seq) // k)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def backwards_elimination(fm: FeatureMatrix, labels, *, normalization="fold", ridge=DEFAULT_RIDGE,
                          workers: int = 1, classes=CLASSES) -> SelectionTrace:
    """Greedy removal of the feature whose absence maximizes LOOCV accuracy.

    Runs until one feature remains; ties go to the earliest column.  With
    ``workers > 1`` candidate evaluations are spread over processes and
    gathered in candidate order, giving the same trace as a serial run.
    """
    n, p = fm.shape
    if p < 2:
        raise ValueError("backwards elimination needs at least two features")
    codes = encode_labels(labels, classes)
    stats = fold_statistics(fm.values, codes, len(classes), normalization)
    initial = int((np.argmax(fold_scores(stats, ridge), axis=1) == codes).sum())
    trace = SelectionTrace(list(fm.names), n, initial)

    active = list(range(p))
    history = [(initial, list(active))]
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while len(active) > 1:
            sub = stats.subset(active)
            positions = list(range(len(active)))
            if pool is None:
                correct = _count_correct(sub, positions, codes, ridge)
            else:
                parts = _chunks(positions, workers)
                results = pool.map(_count_correct, [sub] * len(parts), parts,
                                   [codes] * len(parts), [ridge] * len(parts))
                correct = np.concatenate(list(results))
            best = int(np.argmax(correct))
            removed = active.pop(best)
            hits = int(correct[best])
            trace.steps.append(EliminationStep(fm.names[removed], len(active), hits, hits / n))
            history.append((hits, list(active)))
    finally:
        if pool is not None:
            pool.shutdown()

    trace.peak_correct = max(h for h, _ in history)
    trace.peak_sets = [[fm.names[i] for i in cols] for h, cols in history if h == trace.peak_correct]
    return trace
