"""Repeated stratified k-fold cross-validation and grid search."""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..models import DEFAULT_GRIDS, Family, ModelSpec, complexity_key, train
from ..models.base import encode_labels
from .metrics import (
    RocResult,
    bounded_auc,
    f1_score,
    predict_labels,
    roc_and_auc,
    roc_curve,
    trapezoid_area,
)

_ENSEMBLES = (Family.GRADIENT_BOOSTING, Family.RANDOM_FOREST, Family.ADABOOST)


class EvaluationError(ValueError):
    pass


def stratified_folds(y, k: int, rng: np.random.Generator) -> np.ndarray:
    """Fold index per row. Each class is shuffled and dealt round-robin, with
    the dealing position carried over between classes, so every fold's class
    counts and total size are within one of each other."""
    y = np.asarray(y)
    fold = np.empty(y.size, dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        fold[idx] = (offset + np.arange(idx.size)) % k
        offset = (offset + idx.size) % k
    return fold


def _repeat_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))


def fold_assignments(y, k: int, repeats: int, seed: int) -> np.ndarray:
    """Fold indices for every repeat, shape (repeats, n)."""
    return np.stack([stratified_folds(y, k, _repeat_rng(seed, r)) for r in range(repeats)])


@dataclass
class CVResult:
    """Metrics of one model spec over every repeat x fold cell.

    ``oof_scores[r]`` holds the held-out score of each row in repeat ``r``.
    """

    spec: ModelSpec
    f1: np.ndarray
    auc: np.ndarray
    bounded_auc: np.ndarray
    oof_scores: np.ndarray
    labels: np.ndarray = field(repr=False)

    def mean(self, metric: str) -> float:
        return float(np.mean(getattr(self, metric)))

    def std(self, metric: str) -> float:
        return float(np.std(getattr(self, metric)))

    def summary(self) -> dict:
        out = {"family": self.spec.family.value,
               "params": json.dumps(self.spec.hyperparameters, sort_keys=True),
               "cells": int(self.auc.size)}
        for m in ("f1", "auc", "bounded_auc"):
            out[f"{m}_mean"] = self.mean(m)
            out[f"{m}_std"] = self.std(m)
        return out

    def pooled_roc(self) -> RocResult:
        """ROC of all held-out scores from all repeats taken together."""
        return roc_and_auc(self.oof_scores.ravel(), np.tile(self.labels, self.oof_scores.shape[0]))


def _check(y, k):
    if k < 2:
        raise EvaluationError("k must be at least 2")
    counts = np.bincount(y.astype(np.int64), minlength=2)
    if counts.min() == 0:
        raise EvaluationError("cross-validation needs both classes")
    if k > counts.min():
        raise EvaluationError(f"k={k} exceeds the minority class count {counts.min()}")


def _staging_groups(specs: list[ModelSpec]) -> list[list[int]]:
    """Indices of specs that differ only in ``n_estimators``. One fit with the
    largest count serves the whole group, because a truncated ensemble equals
    a freshly fitted smaller one."""
    groups: dict[str, list[int]] = {}
    for i, spec in enumerate(specs):
        p = dict(spec.hyperparameters)
        if spec.family in _ENSEMBLES:
            p.pop("n_estimators")
        key = json.dumps([spec.family.value, p, spec.seed], sort_keys=True, default=str)
        groups.setdefault(key, []).append(i)
    return list(groups.values())


def _fit_cell(specs, group, X, y, train_idx, test_idx):
    big = max(group, key=lambda i: specs[i].hyperparameters.get("n_estimators", 0))
    model = train(specs[big], X[train_idx], y[train_idx])
    out = {}
    for i in group:
        m = model
        if specs[i].family in _ENSEMBLES and i != big:
            m = model.truncated(specs[i].hyperparameters["n_estimators"])
        out[i] = m.score(X[test_idx])
    return out


def evaluate_specs(specs: list[ModelSpec], X, y, k: int = 10, repeats: int = 100,
                   seed: int = 0, n_jobs: int = 1) -> list[CVResult]:
    """Cross-validate several specs on shared fold assignments."""
    X = np.asarray(X, dtype=np.float64)
    y = encode_labels(y)
    _check(y, k)
    folds = fold_assignments(y, k, repeats, seed)
    groups = _staging_groups(specs)
    cells = [(r, f, g) for r in range(repeats) for f in range(k) for g in range(len(groups))]

    def work(cell):
        r, f, g = cell
        test = folds[r] == f
        return _fit_cell(specs, groups[g], X, y, np.flatnonzero(~test), np.flatnonzero(test))

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            outputs = list(pool.map(work, cells))
    else:
        outputs = [work(c) for c in cells]

    shape = (repeats, k)
    f1s = [np.zeros(shape) for _ in specs]
    aucs = [np.zeros(shape) for _ in specs]
    baucs = [np.zeros(shape) for _ in specs]
    oof = [np.zeros((repeats, y.size)) for _ in specs]
    for (r, f, _), scores in zip(cells, outputs):
        test = folds[r] == f
        yt = y[test]
        for i, s in scores.items():
            fpr, tpr, _ = roc_curve(s, yt)
            aucs[i][r, f] = trapezoid_area(fpr, tpr)
            baucs[i][r, f] = bounded_auc(fpr, tpr)
            f1s[i][r, f] = f1_score(predict_labels(s), yt)
            oof[i][r, test] = s
    return [CVResult(spec, f1s[i], aucs[i], baucs[i], oof[i], y) for i, spec in enumerate(specs)]


def cross_validate(spec: ModelSpec, X, y, k: int = 10, repeats: int = 100, seed: int = 0,
                   n_jobs: int = 1) -> CVResult:
    """Repeated stratified k-fold CV of one spec; every repeat reshuffles the
    folds from its own child seed of ``seed``."""
    return evaluate_specs([spec], X, y, k, repeats, seed, n_jobs)[0]


def expand_grid(family, grid: dict[str, list], base: dict | None = None,
                seed: int = 0) -> list[ModelSpec]:
    """All grid points in declaration order (last key varies fastest)."""
    family = Family.parse(family)
    if not grid:
        return [ModelSpec(family, dict(base or {}), seed)]
    keys = list(grid)
    for key in keys:
        if not isinstance(grid[key], (list, tuple)) or not grid[key]:
            raise EvaluationError(f"grid entry {key!r} must be a non-empty list")
    return [ModelSpec(family, {**(base or {}), **dict(zip(keys, values))}, seed)
            for values in itertools.product(*(grid[k] for k in keys))]


@dataclass
class GridSearchResult:
    best: ModelSpec
    results: list[CVResult]

    @property
    def best_result(self) -> CVResult:
        return next(r for r in self.results if r.spec == self.best)


def select_best(results: list[CVResult]) -> CVResult:
    """Highest mean AUC; exact ties go to the simpler spec, then the earlier one."""
    ranked = sorted(range(len(results)),
                    key=lambda i: (-results[i].mean("auc"), complexity_key(results[i].spec), i))
    return results[ranked[0]]


def grid_search(family, grid: dict[str, list] | None, X, y, k: int = 10, repeats: int = 10,
                seed: int = 0, n_jobs: int = 1, base: dict | None = None,
                model_seed: int = 0) -> GridSearchResult:
    """Cross-validate every grid point and keep the best by mean AUC.

    ``grid=None`` uses the family's default grid; an empty grid is an error.
    """
    family = Family.parse(family)
    if grid is None:
        grid = DEFAULT_GRIDS[family]
    if not grid or not all(grid.values()):
        raise EvaluationError("grid search needs at least one value per parameter")
    specs = expand_grid(family, grid, base, model_seed)
    results = evaluate_specs(specs, X, y, k, repeats, seed, n_jobs)
    return GridSearchResult(select_best(results).spec, results)
