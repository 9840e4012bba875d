from .experiment import GROUPS, ExperimentReport, group_columns, majority_baseline, run_experiment
from .lda import DEFAULT_RIDGE, LdaModel, lda_fit, lda_predict
from .matrix import (
    CLASSES,
    ClassLabel,
    FeatureMatrix,
    correlation_path,
    correlation_prune,
    cutoff_for_window,
    zscore_and_drop,
)
from .reports import class_correlation_report, selected_feature_table
from .selection import ConfusionMatrix, SelectionTrace, backwards_elimination, loocv_accuracy, loocv_predictions

__all__ = [
    "CLASSES",
    "ClassLabel",
    "ConfusionMatrix",
    "DEFAULT_RIDGE",
    "ExperimentReport",
    "FeatureMatrix",
    "GROUPS",
    "LdaModel",
    "SelectionTrace",
    "backwards_elimination",
    "class_correlation_report",
    "correlation_path",
    "correlation_prune",
    "cutoff_for_window",
    "group_columns",
    "lda_fit",
    "lda_predict",
    "loocv_accuracy",
    "loocv_predictions",
    "majority_baseline",
    "run_experiment",
    "selected_feature_table",
    "zscore_and_drop",
]
