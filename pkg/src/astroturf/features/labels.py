"""Rule-based label suggestions that help a human annotator triage accounts.

Bot rules:

* ``R1`` at least half of the tweets have a near-duplicate sibling
* ``R2`` no real sleep: average longest 48h break under 4h with 200+ tweets
* ``R3`` at least 30% of tweets combine two or more trending hashtags with a URL

Human rule:

* ``H1`` regular long breaks (6h+), an official client, and little duplication

A verdict is only given when the rules agree.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..ingest import UserTimeline
from .extract import CorpusStats, features_by_name

DAY = 86400


@dataclass
class LabelSuggestion:
    account: int
    verdict: str
    fired_rules: list[str] = field(default_factory=list)


def trending_url_share(timeline: UserTimeline, trending: dict[int, frozenset[str]]) -> float:
    """Fraction of tweets with a URL and at least two of that day's trending hashtags."""
    if not timeline.tweets:
        return 0.0
    hits = 0
    for t in timeline.tweets:
        if not t.urls:
            continue
        today = trending.get(t.created_at // DAY, frozenset())
        if len(set(t.hashtags) & today) >= 2:
            hits += 1
    return hits / len(timeline.tweets)


def suggest_labels(features, timeline: UserTimeline, stats: CorpusStats) -> LabelSuggestion:
    f = features if isinstance(features, dict) else features_by_name(np.asarray(features))
    fired = []
    if f["duplicate_simhash_ratio"] >= 0.5:
        fired.append("R1")
    if f["avg_longest_break"] < 4.0 and f["total_tweets"] >= 200:
        fired.append("R2")
    if trending_url_share(timeline, stats.trending) >= 0.3:
        fired.append("R3")
    if (f["avg_longest_break"] >= 6.0 and f["official_client"] == 1
            and f["duplicate_simhash_ratio"] < 0.1):
        fired.append("H1")
    bot = any(r.startswith("R") for r in fired)
    human = "H1" in fired
    if bot and not human:
        verdict = "bot"
    elif human and not bot:
        verdict = "human"
    else:
        verdict = "undecided"
    return LabelSuggestion(timeline.user_id, verdict, fired)


def write_suggestions(suggestions, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "verdict", "fired_rules"])
        for s in suggestions:
            w.writerow([s.account, s.verdict, ";".join(s.fired_rules)])
