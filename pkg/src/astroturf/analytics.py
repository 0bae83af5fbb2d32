"""Corpus-level landscape statistics: tweet types over time and top-k rankings."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .ingest import Store, Tweet, TweetType

DAY = 86400


@dataclass
class RankedCounts:
    """``(key, count)`` pairs, count descending, ties by key ascending."""

    entries: list[tuple[str, int]] = field(default_factory=list)

    @classmethod
    def from_counter(cls, counter: Counter, k: int | None = None) -> "RankedCounts":
        items = sorted(((str(key), c) for key, c in counter.items() if c > 0),
                       key=lambda kv: (-kv[1], kv[0]))
        return cls(items if k is None else items[:k])

    def as_dict(self) -> dict[str, int]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class TimeSeries:
    bin_width: int
    origin: int | None
    series: dict[TweetType, list[tuple[int, int]]]

    def total(self) -> int:
        return sum(c for pts in self.series.values() for _, c in pts)


def _tweets(store) -> Iterable[Tweet]:
    return store.iter_tweets() if isinstance(store, Store) else store


def tweet_type_timeseries(store, bin_width: int = DAY) -> TimeSeries:
    """Per-type tweet counts in contiguous bins aligned to UTC midnight.

    Only types that occur get a series; every series covers the full span.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    counts: dict[TweetType, Counter] = {}
    lo = hi = None
    for t in _tweets(store):
        b = t.created_at - t.created_at % bin_width
        counts.setdefault(t.tweet_type, Counter())[b] += 1
        lo = b if lo is None or b < lo else lo
        hi = b if hi is None or b > hi else hi
    if lo is None:
        return TimeSeries(bin_width, None, {})
    bins = range(lo, hi + bin_width, bin_width)
    series = {
        kind: [(b, counts[kind].get(b, 0)) for b in bins]
        for kind in TweetType if kind in counts
    }
    return TimeSeries(bin_width, lo, series)


def _check_k(k):
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")


def top_hashtags(store, k: int | None = 10) -> RankedCounts:
    """Every hashtag occurrence counts, including repeats inside one tweet."""
    _check_k(k)
    c = Counter()
    for t in _tweets(store):
        c.update(t.hashtags)
    return RankedCounts.from_counter(c, k)


def hashtag_pairs(hashtags: Iterable[str]) -> list[str]:
    """Distinct unordered pairs of one tweet's hashtags, rendered ``a+b``."""
    tags = sorted(set(hashtags))
    return [f"{a}+{b}" for a, b in combinations(tags, 2)]


def top_hashtag_pairs(store, k: int | None = 10) -> RankedCounts:
    _check_k(k)
    c = Counter()
    for t in _tweets(store):
        if len(t.hashtags) > 1:
            c.update(hashtag_pairs(t.hashtags))
    return RankedCounts.from_counter(c, k)


def top_media(store, k: int | None = 10) -> RankedCounts:
    _check_k(k)
    c = Counter()
    for t in _tweets(store):
        c.update(t.media_ids)
    return RankedCounts.from_counter(c, k)


def top_referenced_users(store, k: int | None = 10, mode: str = "retweeted") -> RankedCounts:
    """Most quoted or retweeted accounts.

    Keys are the referenced account's screen name when that account has a
    timeline in ``store``, otherwise its numeric id.
    """
    _check_k(k)
    kinds = {"quoted": TweetType.QUOTE, "retweeted": TweetType.RETWEET}
    if mode not in kinds:
        raise ValueError(f"mode must be 'quoted' or 'retweeted', got {mode!r}")
    kind = kinds[mode]
    by_id = Counter(
        t.referenced_author_id for t in _tweets(store)
        if t.tweet_type is kind and t.referenced_author_id is not None
    )
    names = Counter()
    for uid, cnt in by_id.items():
        name = store.screen_name(uid) if isinstance(store, Store) else None
        names[name if name is not None else str(uid)] += cnt
    return RankedCounts.from_counter(names, k)
