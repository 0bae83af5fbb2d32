"""Cross-validation, grid search, ROC metrics and extrapolation."""
from .extrapolate import Extrapolation, extrapolate, extrapolate_table
from .metrics import (
    MetricError,
    RocResult,
    auc,
    bounded_auc,
    f1_score,
    partial_area,
    predict_labels,
    roc_and_auc,
    roc_curve,
)
from .report import EvalReport, ExternalReport, evaluate_external, read_labels, read_scores
from .validation import (
    CVResult,
    EvaluationError,
    GridSearchResult,
    cross_validate,
    evaluate_specs,
    expand_grid,
    fold_assignments,
    grid_search,
    select_best,
    stratified_folds,
)

__all__ = [
    "CVResult", "EvalReport", "EvaluationError", "Extrapolation", "ExternalReport",
    "GridSearchResult", "MetricError", "RocResult", "auc", "bounded_auc", "cross_validate",
    "evaluate_external", "evaluate_specs", "expand_grid", "extrapolate", "extrapolate_table",
    "f1_score",
    "fold_assignments", "grid_search", "partial_area", "predict_labels", "read_labels",
    "read_scores", "roc_and_auc", "roc_curve", "select_best", "stratified_folds",
]
