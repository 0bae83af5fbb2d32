"""ROC curves, AUC, partial AUC and F1 for bot-vs-human scores."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

THRESHOLD = 0.5
MAX_FPR = 0.1


class MetricError(ValueError):
    pass


@dataclass
class RocResult:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float
    bounded_auc: float


def _binary(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.dtype.kind in "US":
        return y == "bot"
    return y.astype(bool)


def roc_curve(scores, labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ROC points from a descending sweep over distinct scores.

    Tied scores enter as one step, so a block of ties with both classes is a
    diagonal segment. The first point is always (0, 0) with threshold +inf.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = _binary(labels)
    if s.shape != y.shape:
        raise MetricError("scores and labels differ in length")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("ROC needs both classes")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s)), s.size - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    return fpr, tpr, np.r_[np.inf, s[last]]


def trapezoid_area(x, y) -> float:
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def partial_area(fpr, tpr, max_fpr: float = MAX_FPR) -> float:
    """Raw area under the ROC over FPR in [0, max_fpr], interpolating the cut."""
    stop = np.searchsorted(fpr, max_fpr, side="right")
    x = fpr[:stop]
    y = tpr[:stop]
    if x[-1] < max_fpr:
        x0, x1 = fpr[stop - 1], fpr[stop]
        y0, y1 = tpr[stop - 1], tpr[stop]
        y_cut = y0 + (y1 - y0) * (max_fpr - x0) / (x1 - x0)
        x = np.r_[x, max_fpr]
        y = np.r_[y, y_cut]
    return trapezoid_area(x, y)


def bounded_auc(fpr, tpr, max_fpr: float = MAX_FPR) -> float:
    """Partial AUC over FPR <= ``max_fpr``, standardized so that a perfect
    ranking scores 1 and a chance-level diagonal scores 0.5."""
    area = partial_area(fpr, tpr, max_fpr)
    lo = max_fpr * max_fpr / 2.0
    hi = max_fpr
    return float(0.5 * (1.0 + (area - lo) / (hi - lo)))


def roc_and_auc(scores, labels, max_fpr: float = MAX_FPR) -> RocResult:
    fpr, tpr, thr = roc_curve(scores, labels)
    return RocResult(fpr, tpr, thr, trapezoid_area(fpr, tpr), bounded_auc(fpr, tpr, max_fpr))


def auc(scores, labels) -> float:
    fpr, tpr, _ = roc_curve(scores, labels)
    return trapezoid_area(fpr, tpr)


def predict_labels(scores, threshold: float = THRESHOLD) -> np.ndarray:
    """Bot (True) when the score reaches ``threshold``."""
    return np.asarray(scores, dtype=np.float64) >= threshold


def f1_score(predictions, labels) -> float:
    """F1 of the bot class; 0 when there are no true positives."""
    p = _binary(predictions)
    y = _binary(labels)
    if p.shape != y.shape:
        raise MetricError("predictions and labels differ in length")
    tp = int(np.sum(p & y))
    fp = int(np.sum(p & ~y))
    fn = int(np.sum(~p & y))
    if tp == 0:
        return 0.0
    return 2.0 * tp / (2.0 * tp + fp + fn)
