"""Apply a trained detector to every sufficiently active unlabeled account."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import CorpusStats, FeatureTable, extract_store
from ..ingest import Store
from ..models import TrainedModel
from .metrics import THRESHOLD


@dataclass
class Extrapolation:
    scores: dict[int, float]
    predicted_bots: int
    predicted_humans: int
    labeled_bots: int = 0
    labeled_humans: int = 0
    screen_names: dict[int, str] = field(default_factory=dict, repr=False)

    @property
    def bots(self) -> int:
        return self.predicted_bots + self.labeled_bots

    @property
    def humans(self) -> int:
        return self.predicted_humans + self.labeled_humans

    @property
    def total(self) -> int:
        return self.bots + self.humans

    @property
    def bot_fraction(self) -> float:
        return self.bots / self.total if self.total else 0.0

    @property
    def predicted_bot_fraction(self) -> float:
        n = self.predicted_bots + self.predicted_humans
        return self.predicted_bots / n if n else 0.0


def extrapolate_table(model: TrainedModel, table: FeatureTable,
                      labeled: dict[int, str] | None = None) -> Extrapolation:
    """Score the rows of ``table`` that carry no label.

    Rows whose account is labeled are not scored; their known class is added
    to the totals instead.
    """
    labeled = labeled or {}
    keep = [i for i, uid in enumerate(table.user_ids) if uid not in labeled]
    known = [uid for uid in table.user_ids if uid in labeled]
    labeled_bots = sum(1 for uid in known if labeled[uid] == "bot")
    if not keep:
        return Extrapolation({}, 0, 0, labeled_bots, len(known) - labeled_bots)
    ids = [table.user_ids[i] for i in keep]
    s = model.score(table.X[keep])
    bots = int(np.sum(s >= THRESHOLD))
    return Extrapolation(
        dict(zip(ids, s.tolist())), bots, len(ids) - bots, labeled_bots,
        len(known) - labeled_bots, {table.user_ids[i]: table.screen_names[i] for i in keep},
    )


def extrapolate(model: TrainedModel, store: Store, min_tweets: int = 30,
                labeled: dict[int, str] | None = None,
                stats: CorpusStats | None = None) -> Extrapolation:
    """Score every account with at least ``min_tweets`` tweets and no label."""
    return extrapolate_table(model, extract_store(store, min_tweets, stats), labeled)
