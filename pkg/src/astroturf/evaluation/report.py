"""Evaluation reports: metric tables, ROC points and ROC charts on disk."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import svg
from .metrics import MAX_FPR, RocResult, f1_score, predict_labels, roc_and_auc
from .validation import CVResult

METRIC_COLUMNS = ["family", "params", "cells", "f1_mean", "f1_std", "auc_mean", "auc_std",
                  "bounded_auc_mean", "bounded_auc_std", "best"]


def read_labels(path: str | Path) -> dict[int, str]:
    """``user_id,label`` rows with label ``bot`` or ``human``."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            label = row["label"].strip().lower()
            if label not in ("bot", "human"):
                raise ValueError(f"{path}: bad label {row['label']!r}")
            out[int(row["user_id"])] = label
    return out


def read_scores(path: str | Path) -> dict[int, float]:
    """``account,score`` rows; ``user_id`` is accepted for the id column."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        id_col = "account" if "account" in (reader.fieldnames or []) else "user_id"
        for row in reader:
            out[int(row[id_col])] = float(row["score"])
    return out


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_roc_csv(roc: RocResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fpr", "tpr", "threshold"])
        for row in zip(roc.fpr, roc.tpr, roc.thresholds):
            w.writerow([_fmt(v) for v in row])


def roc_svg(curves: dict[str, RocResult], title: str) -> tuple[str, str]:
    """Full-range and low-FPR panels."""
    series = {f"{name} (AUC {r.auc:.3f})": (r.fpr.tolist(), r.tpr.tolist())
              for name, r in curves.items()}
    full = svg.line_chart(series, title, (0.0, 1.0), (0.0, 1.0),
                          "false positive rate", "true positive rate")
    low = {}
    for name, r in curves.items():
        stop = int(np.searchsorted(r.fpr, MAX_FPR, side="right"))
        xs = r.fpr[:stop + 1].tolist()
        ys = r.tpr[:stop + 1].tolist()
        low[f"{name} (bounded {r.bounded_auc:.3f})"] = (xs, ys)
    zoom = svg.line_chart(low, f"{title}, FPR <= {MAX_FPR}", (0.0, MAX_FPR), (0.0, 1.0),
                          "false positive rate", "true positive rate")
    return full, zoom


@dataclass
class EvalReport:
    results: list[CVResult]
    best: CVResult

    def write(self, out: str | Path) -> list[Path]:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        metrics = out / "metrics.csv"
        with open(metrics, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(METRIC_COLUMNS)
            for r in self.results:
                s = r.summary()
                s["best"] = int(r is self.best)
                w.writerow([_fmt(s[c]) for c in METRIC_COLUMNS])
        cells = out / "cells.csv"
        with open(cells, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["repeat", "fold", "f1", "auc", "bounded_auc"])
            for (rep, fold), a in np.ndenumerate(self.best.auc):
                w.writerow([rep, fold, _fmt(self.best.f1[rep, fold]), _fmt(a),
                            _fmt(self.best.bounded_auc[rep, fold])])
        roc = self.best.pooled_roc()
        write_roc_csv(roc, out / "roc.csv")
        full, zoom = roc_svg({self.best.spec.family.value: roc}, "ROC")
        svg.write(out / "roc.svg", full)
        svg.write(out / "roc_bounded.svg", zoom)
        return [metrics, cells, out / "roc.csv", out / "roc.svg", out / "roc_bounded.svg"]


@dataclass
class ExternalReport:
    n_scored: int
    n_missing: int
    roc: RocResult
    f1: float

    def write(self, out: str | Path) -> list[Path]:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        metrics = out / "metrics.csv"
        with open(metrics, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scored", "missing", "f1", "auc", "bounded_auc"])
            w.writerow([self.n_scored, self.n_missing, _fmt(self.f1), _fmt(self.roc.auc),
                        _fmt(self.roc.bounded_auc)])
        write_roc_csv(self.roc, out / "roc.csv")
        full, zoom = roc_svg({"external": self.roc}, "ROC")
        svg.write(out / "roc.svg", full)
        svg.write(out / "roc_bounded.svg", zoom)
        return [metrics, out / "roc.csv", out / "roc.svg", out / "roc_bounded.svg"]


def evaluate_external(scores: dict[int, float], labels: dict[int, str]) -> ExternalReport:
    """Metrics of third-party scores on the labeled accounts they cover."""
    ids = sorted(uid for uid in labels if uid in scores)
    s = np.array([scores[uid] for uid in ids])
    y = np.array([labels[uid] == "bot" for uid in ids])
    roc = roc_and_auc(s, y)
    return ExternalReport(len(ids), len(labels) - len(ids), roc, f1_score(predict_labels(s), y))
