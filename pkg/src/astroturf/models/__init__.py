"""Bot/human classifiers behind one train/score interface."""
from .base import (
    DEFAULT_GRIDS,
    Family,
    ModelError,
    ModelSpec,
    Standardizer,
    TrainedModel,
    complexity_key,
    load_model,
    predict_score,
    save_model,
    train,
)
from .ensemble import AdaBoost, GradientBoosting, RandomForest
from .linear import LinearSVC, LogisticRegression
from .neighbors import KNeighbors
from .tree import DecisionTree

__all__ = [
    "AdaBoost", "DEFAULT_GRIDS", "DecisionTree", "Family", "GradientBoosting", "KNeighbors",
    "LinearSVC", "LogisticRegression", "ModelError", "ModelSpec", "RandomForest",
    "Standardizer", "TrainedModel", "complexity_key", "load_model", "predict_score",
    "save_model", "train",
]
