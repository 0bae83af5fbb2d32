"""Uniform train/score interface over the classifier families."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ensemble import AdaBoost, GradientBoosting, RandomForest
from .linear import LinearSVC, LogisticRegression
from .neighbors import KNeighbors

MODEL_FORMAT = "astroturf-model"
MODEL_VERSION = 1


class Family(str, enum.Enum):
    GRADIENT_BOOSTING = "GradientBoosting"
    RANDOM_FOREST = "RandomForest"
    ADABOOST = "AdaBoost"
    LOGISTIC_REGRESSION = "LogisticRegression"
    KNEIGHBORS = "KNeighbors"
    LINEAR_SVC = "LinearSVC"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        key = name.strip().lower().replace("-", "").replace("_", "")
        if key in _ALIASES:
            return _ALIASES[key]
        for fam in cls:
            if fam.value.lower() == key:
                return fam
        raise ValueError(f"unknown model family {name!r}")


_ALIASES = {
    "gb": Family.GRADIENT_BOOSTING, "gbm": Family.GRADIENT_BOOSTING,
    "rf": Family.RANDOM_FOREST, "ada": Family.ADABOOST, "adaboost": Family.ADABOOST,
    "lr": Family.LOGISTIC_REGRESSION, "logreg": Family.LOGISTIC_REGRESSION,
    "knn": Family.KNEIGHBORS, "svc": Family.LINEAR_SVC, "linsvc": Family.LINEAR_SVC,
    "linearsvc": Family.LINEAR_SVC,
}

DEFAULTS = {
    Family.GRADIENT_BOOSTING: {"n_estimators": 100, "max_depth": 3, "learning_rate": 0.1},
    Family.RANDOM_FOREST: {"n_estimators": 100, "max_depth": None},
    Family.ADABOOST: {"n_estimators": 100},
    Family.LOGISTIC_REGRESSION: {"l2": 1.0},
    Family.KNEIGHBORS: {"k": 5},
    Family.LINEAR_SVC: {"l2": 0.01, "epochs": 50},
}

# max_depth None means unbounded
DEFAULT_GRIDS = {
    Family.GRADIENT_BOOSTING: {"n_estimators": [100, 300], "max_depth": [2, 3],
                               "learning_rate": [0.05, 0.1]},
    Family.RANDOM_FOREST: {"n_estimators": [100, 300], "max_depth": [None, 8]},
    Family.ADABOOST: {"n_estimators": [100, 300]},
    Family.LOGISTIC_REGRESSION: {"l2": [0.01, 0.1, 1.0]},
    Family.KNEIGHBORS: {"k": [5, 11, 21]},
    Family.LINEAR_SVC: {"l2": [0.01, 0.1], "epochs": [50]},
}


_OPTIONAL = {
    Family.GRADIENT_BOOSTING: {"min_samples_leaf", "max_bins"},
    Family.RANDOM_FOREST: {"min_samples_leaf", "max_bins", "max_features", "bootstrap"},
    Family.ADABOOST: {"learning_rate", "max_bins"},
    Family.LOGISTIC_REGRESSION: {"tol", "max_iter"},
    Family.KNEIGHBORS: set(),
    Family.LINEAR_SVC: set(),
}


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    family: Family
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        params = dict(DEFAULTS[self.family])
        params.update(self.hyperparameters)
        object.__setattr__(self, "hyperparameters", params)
        validate(self.family, params)

    def __hash__(self):
        return hash((self.family, json.dumps(self.hyperparameters, sort_keys=True), self.seed))

    def with_params(self, **params) -> "ModelSpec":
        return ModelSpec(self.family, {**self.hyperparameters, **params}, self.seed)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "hyperparameters": self.hyperparameters,
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["family"], d.get("hyperparameters", {}), int(d.get("seed", 0)))


def _positive_int(params, key):
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
        raise ModelError(f"{key} must be an integer >= 1, got {v!r}")


def validate(family: Family, params: dict) -> None:
    known = set(DEFAULTS[family]) | _OPTIONAL[family]
    unknown = set(params) - known
    if unknown:
        raise ModelError(f"unknown hyperparameters for {family.value}: {sorted(unknown)}")
    if family in (Family.GRADIENT_BOOSTING, Family.RANDOM_FOREST, Family.ADABOOST):
        _positive_int(params, "n_estimators")
    if family is Family.GRADIENT_BOOSTING:
        _positive_int(params, "max_depth")
        if not params["learning_rate"] > 0:
            raise ModelError("learning_rate must be > 0")
    if family is Family.RANDOM_FOREST and params["max_depth"] is not None:
        _positive_int(params, "max_depth")
    if family in (Family.LOGISTIC_REGRESSION, Family.LINEAR_SVC) and not params["l2"] > 0:
        raise ModelError("l2 must be > 0")
    if family is Family.LINEAR_SVC:
        _positive_int(params, "epochs")
    if family is Family.KNEIGHBORS:
        _positive_int(params, "k")
        if params["k"] % 2 == 0:
            raise ModelError("k must be odd")


def complexity_key(spec: ModelSpec) -> tuple:
    """Smaller means simpler: fewer trees, stronger regularization, larger k."""
    p = spec.hyperparameters
    if spec.family in (Family.GRADIENT_BOOSTING, Family.RANDOM_FOREST, Family.ADABOOST):
        return (p["n_estimators"],)
    if spec.family in (Family.LOGISTIC_REGRESSION, Family.LINEAR_SVC):
        return (-p["l2"],)
    return (-p["k"],)


class Standardizer:
    """Per-feature centering and scaling from training data only.

    Missing values (NaN) are replaced by the training median before scaling;
    constant features get unit scale.
    """

    def fit(self, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        med = np.nanmedian(X, axis=0) if X.size else np.zeros(X.shape[1])
        self.median_ = np.where(np.isnan(med), 0.0, med)
        X = self._impute(X)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        return self

    def _impute(self, X):
        if np.isnan(X).any():
            X = np.where(np.isnan(X), self.median_[None, :], X)
        return X

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = self._impute(np.asarray(X, dtype=np.float64))
        return (X - self.mean_) / self.scale_

    def to_dict(self):
        return {"median": self.median_.tolist(), "mean": self.mean_.tolist(),
                "scale": self.scale_.tolist()}

    @classmethod
    def from_dict(cls, d):
        s = cls()
        s.median_ = np.asarray(d["median"], dtype=np.float64)
        s.mean_ = np.asarray(d["mean"], dtype=np.float64)
        s.scale_ = np.asarray(d["scale"], dtype=np.float64)
        return s


def _estimator(spec: ModelSpec):
    p = dict(spec.hyperparameters)
    fam = spec.family
    if fam is Family.GRADIENT_BOOSTING:
        return GradientBoosting(**p)
    if fam is Family.RANDOM_FOREST:
        return RandomForest(seed=spec.seed, **p)
    if fam is Family.ADABOOST:
        return AdaBoost(**p)
    if fam is Family.LOGISTIC_REGRESSION:
        return LogisticRegression(**p)
    if fam is Family.KNEIGHBORS:
        return KNeighbors(**p)
    return LinearSVC(seed=spec.seed, **p)


@dataclass
class TrainedModel:
    spec: ModelSpec
    standardizer: Standardizer
    estimator: object
    n_features: int

    def score(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} features, got {X.shape[1]}")
        s = self.estimator.score(self.standardizer.transform(X))
        return np.clip(s, 0.0, 1.0)

    def truncated(self, n_estimators: int) -> "TrainedModel":
        """Same model cut to its first ``n_estimators`` members (ensembles only)."""
        spec = self.spec.with_params(n_estimators=n_estimators)
        return TrainedModel(spec, self.standardizer, self.estimator.truncated(n_estimators),
                            self.n_features)


def encode_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.dtype.kind in "US":
        mapped = np.where(y == "bot", 1.0, np.where(y == "human", 0.0, np.nan))
        if np.isnan(mapped).any():
            raise ModelError("labels must be 'bot' or 'human'")
        return mapped
    y = y.astype(np.float64)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ModelError("numeric labels must be 0 (human) or 1 (bot)")
    return y


def train(spec: ModelSpec, X: np.ndarray, y) -> TrainedModel:
    """Fit ``spec`` on ``X``; labels are 1/"bot" and 0/"human"."""
    X = np.asarray(X, dtype=np.float64)
    y = encode_labels(y)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ModelError("X must be 2-D with one row per label")
    if y.size < 2:
        raise ModelError("need at least two training rows")
    if np.unique(y).size < 2:
        raise ModelError("training labels contain a single class")
    if not np.isfinite(X).all():
        raise ModelError("training features must be finite")
    std = Standardizer().fit(X)
    est = _estimator(spec).fit(std.transform(X), y)
    return TrainedModel(spec, std, est, X.shape[1])


def predict_score(model: TrainedModel, x: np.ndarray) -> np.ndarray | float:
    """Bot score in [0, 1]; a single row returns a float."""
    x = np.asarray(x, dtype=np.float64)
    s = model.score(x)
    return float(s[0]) if x.ndim == 1 else s


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "spec": model.spec.to_dict(),
        "n_features": model.n_features,
        "standardizer": model.standardizer.to_dict(),
        "parameters": model.estimator.to_dict(),
    }


def save_model(model: TrainedModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, default=_json_default, sort_keys=True)


def load_model(path: str | Path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if d.get("format") != MODEL_FORMAT:
        raise ModelError(f"{path}: not a model file")
    if d.get("version") != MODEL_VERSION:
        raise ModelError(f"{path}: unsupported model version {d.get('version')}")
    spec = ModelSpec.from_dict(d["spec"])
    est = _estimator(spec).load_dict(d["parameters"])
    return TrainedModel(spec, Standardizer.from_dict(d["standardizer"]), est,
                        int(d["n_features"]))
