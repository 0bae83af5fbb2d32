"""The 44-feature account profile.

Features come in four groups (metadata, text, time, user). ``twitter_client``
is a hashed tf-idf block of ``CLIENT_BUCKETS`` numbers, so a vector holds 43
scalars plus the block. All ratios named ``*_ratio`` except ``zip_ratio`` are
fractions of the account's tweets and lie in [0, 1]; ``unique_*`` variants
count tweets that introduce a value not seen in an earlier tweet of the same
account, which keeps them at or below their plain counterpart.
"""
from __future__ import annotations

import csv
import math
import re
import zlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable
from urllib.parse import urlsplit

import numpy as np

from .._text import hash64, tokenize
from ..ingest import Store, Tweet, TweetType, UserProfile, UserTimeline
from .simhash import SIMILAR_DISTANCE, _fingerprints, similar_counts
from .timing import chi_square_seconds, longest_breaks, median_hours

CLIENT_BUCKETS = 16
DAY = 86400

METADATA_FEATURES = [
    "avg_tweets_per_day", "total_tweets", "orig_ratio", "retweet_ratio", "quote_ratio",
    "reply_ratio", "twitter_client", "official_client", "total_clients",
    "unique_users_retweet_ratio", "unique_users_quotes_ratio", "unique_users_reply_ratio",
    "longest_conversation", "unique_users_conv_ratio",
]
TEXT_FEATURES = [
    "avg_text_len", "std_text_len", "url_ratio", "unique_url_ratio", "unique_url_host_ratio",
    "vocabulary_diversity", "mentions_ratio", "hashtags_ratio", "unique_mentions_ratio",
    "unique_hashtags_ratio", "ending_hashtags_ratio", "starting_mention_ratio",
    "starting_rt_ratio", "zip_ratio", "user_simhash", "avg_duplicate_simhash",
    "duplicate_simhash_ratio",
]
TIME_FEATURES = [
    "chi_square_seconds", "avg_longest_break", "avg_second_longest_break",
    "median_retweet", "median_quote",
]
USER_FEATURES = [
    "total_friends", "total_followers", "friend_follower_ratio", "has_default_profile_image",
    "has_default_user_image", "is_verified", "has_geo_coordinates", "self_bot",
]
FEATURE_NAMES = METADATA_FEATURES + TEXT_FEATURES + TIME_FEATURES + USER_FEATURES
CLIENT_COLUMNS = [f"twitter_client_{i:02d}" for i in range(CLIENT_BUCKETS)]
COLUMN_NAMES = [c for name in FEATURE_NAMES
                for c in (CLIENT_COLUMNS if name == "twitter_client" else [name])]

INTEGER_FEATURES = {"total_tweets", "total_clients", "longest_conversation", "total_friends",
                    "total_followers"}
BOOLEAN_FEATURES = {"official_client", "has_default_profile_image", "has_default_user_image",
                    "is_verified", "has_geo_coordinates", "self_bot"}

OFFICIAL_CLIENTS = frozenset(c.lower() for c in (
    "Twitter for iPhone", "Twitter for Android", "Twitter Web Client", "Twitter Web App",
    "Twitter for iPad", "Twitter for Mac", "Twitter for Windows", "Twitter for Windows Phone",
    "Twitter for BlackBerry", "Twitter Lite", "TweetDeck", "Mobile Web", "Mobile Web (M2)",
))

_ENDS_WITH_HASHTAG = re.compile(r"#\w+$")
_STARTS_WITH_RT = re.compile(r"RT\b")


class EmptyTimelineError(ValueError):
    pass


@dataclass
class TweetRef:
    author_id: int
    created_at: int
    tweet_type: TweetType
    referenced_tweet_id: int | None
    referenced_author_id: int | None


@dataclass
class CorpusStats:
    """Corpus-wide inputs to per-account extraction, computed in one pass."""

    span_start: int
    span_end: int
    n_users: int
    client_df: dict[str, int]
    tweets: dict[int, TweetRef] = field(repr=False)
    median_retweet_default: float = 0.0
    median_quote_default: float = 0.0
    trending: dict[int, frozenset[str]] = field(default_factory=dict, repr=False)

    @property
    def span_days(self) -> float:
        return max((self.span_end - self.span_start) / DAY, 1.0)

    @classmethod
    def from_store(cls, store: Store | dict[int, UserTimeline], trending_k: int = 10) -> "CorpusStats":
        timelines = store.timelines if isinstance(store, Store) else store
        tweets: dict[int, TweetRef] = {}
        client_df: Counter = Counter()
        lo = hi = None
        daily: dict[int, Counter] = {}
        for tl in timelines.values():
            client_df.update(set(tok for t in tl.tweets for tok in tokenize(t.client_source)))
            for t in tl.tweets:
                tweets[t.tweet_id] = TweetRef(t.author_id, t.created_at, t.tweet_type,
                                              t.referenced_tweet_id, t.referenced_author_id)
                lo = t.created_at if lo is None or t.created_at < lo else lo
                hi = t.created_at if hi is None or t.created_at > hi else hi
                if t.hashtags:
                    daily.setdefault(t.created_at // DAY, Counter()).update(t.hashtags)
        stats = cls(
            span_start=lo or 0,
            span_end=hi or 0,
            n_users=len(timelines),
            client_df=dict(client_df),
            tweets=tweets,
        )
        rt, qt = [], []
        for tl in timelines.values():
            rt += stats.reference_deltas(tl.tweets, TweetType.RETWEET)
            qt += stats.reference_deltas(tl.tweets, TweetType.QUOTE)
        stats.median_retweet_default = median_hours(rt, 0.0)
        stats.median_quote_default = median_hours(qt, 0.0)
        stats.trending = {
            day: frozenset(k for k, _ in sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:trending_k])
            for day, c in daily.items()
        }
        return stats

    def reference_deltas(self, tweets: Iterable[Tweet], kind: TweetType) -> list[int]:
        """Seconds between each tweet of ``kind`` and the referenced original,
        for originals present in the corpus."""
        out = []
        for t in tweets:
            if t.tweet_type is kind and t.referenced_tweet_id in self.tweets:
                out.append(t.created_at - self.tweets[t.referenced_tweet_id].created_at)
        return out


def zip_ratio(texts: Iterable[str], level: int = 6) -> float:
    """Raw-DEFLATE size of the newline-joined texts over their UTF-8 size."""
    raw = "\n".join(texts).encode("utf-8")
    if not raw:
        return 1.0
    comp = zlib.compressobj(level, zlib.DEFLATED, -15)
    packed = comp.compress(raw) + comp.flush()
    return len(packed) / len(raw)


def client_tfidf(clients: Iterable[str], stats: CorpusStats) -> np.ndarray:
    """Hashed, L2-normalized tf-idf vector of the client-name tokens."""
    counts = Counter(tok for c in clients for tok in tokenize(c))
    out = np.zeros(CLIENT_BUCKETS)
    total = sum(counts.values())
    if not total:
        return out
    for tok in sorted(counts):
        tf = counts[tok] / total
        idf = math.log((1 + stats.n_users) / (1 + stats.client_df.get(tok, 0))) + 1.0
        out[hash64(tok) % CLIENT_BUCKETS] += tf * idf
    norm = np.sqrt((out ** 2).sum())
    return out / norm if norm > 0 else out


def _first_seen_ratio(values_per_tweet: list[list]) -> float:
    """Fraction of tweets carrying at least one value unseen in earlier tweets."""
    seen: set = set()
    fresh = 0
    for values in values_per_tweet:
        if any(v not in seen for v in values):
            fresh += 1
        seen.update(values)
    return fresh / len(values_per_tweet)


def _conversations(tweets: list[Tweet], user_id: int, stats: CorpusStats) -> tuple[int, int]:
    """Longest alternating reply chain (in reply edges) and the number of
    partners with a chain of at least two edges."""
    longest = 0
    partners = set()
    for t in tweets:
        if t.tweet_type is not TweetType.REPLY or t.referenced_author_id is None:
            continue
        partner = t.referenced_author_id
        edges = 1
        expected, other = partner, user_id
        visited = {t.tweet_id}
        parent_id = t.referenced_tweet_id
        parent = stats.tweets.get(parent_id)
        while (parent is not None and parent_id not in visited
               and parent.author_id == expected
               and parent.tweet_type is TweetType.REPLY
               and parent.referenced_author_id == other):
            edges += 1
            visited.add(parent_id)
            expected, other = other, expected
            parent_id = parent.referenced_tweet_id
            parent = stats.tweets.get(parent_id)
        longest = max(longest, edges)
        if edges >= 2:
            partners.add(partner)
    return longest, len(partners)


def _host(url: str) -> str:
    try:
        return (urlsplit(url).hostname or "").lower()
    except ValueError:
        return ""


def extract_features(timeline: UserTimeline, profile: UserProfile | None,
                     stats: CorpusStats) -> np.ndarray:
    """Feature vector in ``COLUMN_NAMES`` order.

    Tweets are ordered by ``(created_at, tweet_id)`` first, so the result does
    not depend on the order the timeline arrived in.
    """
    tweets = sorted(timeline.tweets, key=lambda t: (t.created_at, t.tweet_id))
    if not tweets:
        raise EmptyTimelineError(f"user {timeline.user_id} has no tweets")
    profile = profile or timeline.profile
    n = len(tweets)
    f: dict[str, float | np.ndarray] = {}

    # metadata
    types = Counter(t.tweet_type for t in tweets)
    f["avg_tweets_per_day"] = n / stats.span_days
    f["total_tweets"] = n
    f["orig_ratio"] = types[TweetType.ORIGINAL] / n
    f["retweet_ratio"] = types[TweetType.RETWEET] / n
    f["quote_ratio"] = types[TweetType.QUOTE] / n
    f["reply_ratio"] = types[TweetType.REPLY] / n
    clients = [t.client_source for t in tweets]
    f["twitter_client"] = client_tfidf(clients, stats)
    f["official_client"] = float(any(c.lower() in OFFICIAL_CLIENTS for c in clients))
    f["total_clients"] = len(set(clients))

    def refs(kind):
        return [[t.referenced_author_id] if t.tweet_type is kind and t.referenced_author_id
                is not None else [] for t in tweets]

    f["unique_users_retweet_ratio"] = _first_seen_ratio(refs(TweetType.RETWEET))
    f["unique_users_quotes_ratio"] = _first_seen_ratio(refs(TweetType.QUOTE))
    f["unique_users_reply_ratio"] = _first_seen_ratio(refs(TweetType.REPLY))
    longest_conv, conv_partners = _conversations(tweets, timeline.user_id, stats)
    f["longest_conversation"] = longest_conv
    f["unique_users_conv_ratio"] = conv_partners / n

    # text
    texts = [t.text for t in tweets]
    lengths = np.array([len(x) for x in texts], dtype=np.float64)
    f["avg_text_len"] = float(lengths.mean())
    f["std_text_len"] = float(lengths.std())
    f["url_ratio"] = sum(1 for t in tweets if t.urls) / n
    f["unique_url_ratio"] = _first_seen_ratio([t.urls for t in tweets])
    urls = [u for t in tweets for u in t.urls]
    f["unique_url_host_ratio"] = len({_host(u) for u in urls}) / len(urls) if urls else 0.0
    token_lists = [tokenize(x) for x in texts]
    all_tokens = [tok for toks in token_lists for tok in toks]
    f["vocabulary_diversity"] = len(set(all_tokens)) / len(all_tokens) if all_tokens else 1.0
    f["mentions_ratio"] = sum(1 for t in tweets if t.mentions) / n
    f["hashtags_ratio"] = sum(1 for t in tweets if t.hashtags) / n
    f["unique_mentions_ratio"] = _first_seen_ratio([t.mentions for t in tweets])
    f["unique_hashtags_ratio"] = _first_seen_ratio([t.hashtags for t in tweets])
    f["ending_hashtags_ratio"] = sum(1 for x in texts if _ENDS_WITH_HASHTAG.search(x.rstrip())) / n
    f["starting_mention_ratio"] = sum(1 for x in texts if x.lstrip().startswith("@")) / n
    f["starting_rt_ratio"] = sum(1 for x in texts if _STARTS_WITH_RT.match(x.lstrip())) / n
    f["zip_ratio"] = zip_ratio(texts)
    fps = _fingerprints(token_lists + [all_tokens])
    tweet_fps, user_fp = fps[:-1], fps[-1]
    f["user_simhash"] = float(np.bitwise_count(tweet_fps ^ user_fp).mean() / 64.0)
    similar = similar_counts(tweet_fps, SIMILAR_DISTANCE)
    f["avg_duplicate_simhash"] = float((similar + 1).mean())
    f["duplicate_simhash_ratio"] = float((similar > 0).mean())

    # time
    stamps = [t.created_at for t in tweets]
    f["chi_square_seconds"] = chi_square_seconds(stamps)
    f["avg_longest_break"], f["avg_second_longest_break"] = longest_breaks(stamps)
    f["median_retweet"] = median_hours(stats.reference_deltas(tweets, TweetType.RETWEET),
                                       stats.median_retweet_default)
    f["median_quote"] = median_hours(stats.reference_deltas(tweets, TweetType.QUOTE),
                                     stats.median_quote_default)

    # user
    f["total_friends"] = profile.friends
    f["total_followers"] = profile.followers
    both = profile.friends + profile.followers
    f["friend_follower_ratio"] = profile.friends / both if both else 0.0
    f["has_default_profile_image"] = float(profile.default_profile_image)
    f["has_default_user_image"] = float(profile.default_user_image)
    f["is_verified"] = float(profile.verified)
    f["has_geo_coordinates"] = float(profile.geo_enabled)
    f["self_bot"] = float("bot" in profile.screen_name.lower()
                          or "bot" in profile.display_name.lower())

    out = np.concatenate([np.atleast_1d(np.asarray(f[name], dtype=np.float64))
                          for name in FEATURE_NAMES])
    return out


def features_by_name(vector: np.ndarray) -> dict[str, float | np.ndarray]:
    """Split a column vector back into the 44 named features."""
    out = {}
    i = 0
    for name in FEATURE_NAMES:
        width = CLIENT_BUCKETS if name == "twitter_client" else 1
        out[name] = vector[i:i + width].copy() if width > 1 else float(vector[i])
        i += width
    return out


@dataclass
class FeatureTable:
    user_ids: list[int]
    screen_names: list[str]
    X: np.ndarray

    def __len__(self) -> int:
        return len(self.user_ids)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["user_id", "screen_name"] + COLUMN_NAMES)
            for uid, name, row in zip(self.user_ids, self.screen_names, self.X):
                w.writerow([uid, name] + [repr(float(v)) for v in row])

    @classmethod
    def read_csv(cls, path: str | Path) -> "FeatureTable":
        with open(path, newline="", encoding="utf-8") as fh:
            r = csv.reader(fh)
            header = next(r)
            if header[2:] != COLUMN_NAMES:
                raise ValueError(f"{path}: unexpected feature columns")
            ids, names, rows = [], [], []
            for row in r:
                ids.append(int(row[0]))
                names.append(row[1])
                rows.append([float(v) for v in row[2:]])
        X = np.array(rows, dtype=np.float64).reshape(len(rows), len(COLUMN_NAMES))
        return cls(ids, names, X)


def extract_store(store: Store, min_tweets: int = 1,
                  stats: CorpusStats | None = None) -> FeatureTable:
    """Feature rows for every account with at least ``min_tweets`` tweets,
    ascending by user id."""
    stats = stats or CorpusStats.from_store(store)
    ids, names, rows = [], [], []
    for uid in sorted(store.timelines):
        tl = store.timelines[uid]
        if len(tl.tweets) < max(min_tweets, 1):
            continue
        ids.append(uid)
        names.append(tl.profile.screen_name)
        rows.append(extract_features(tl, tl.profile, stats))
    X = np.array(rows).reshape(len(rows), len(COLUMN_NAMES))
    return FeatureTable(ids, names, X)
