"""Tweet record parsing, term filtering, and per-user timeline storage.

Input is newline-delimited JSON in the classic Twitter status layout. Only a
small subset of fields is read; everything else is ignored.
"""
from __future__ import annotations

import enum
import glob
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from ._text import tokenize

__all__ = [
    "TweetType",
    "Tweet",
    "UserProfile",
    "UserTimeline",
    "CorpusConfig",
    "ExclusionStats",
    "ParseError",
    "Store",
    "parse_tweet",
    "serialize_tweet",
    "iter_records",
    "matches_terms",
    "filter_terms",
    "apply_exclusion",
    "build_timelines",
    "write_store",
    "load_store",
]

DEFAULT_SEARCH_TERMS = (
    "afd", "cdu", "csu", "fdp", "gruene", "grüne", "diegruenen", "diegrünen",
    "linke", "dielinke", "npd", "spd",
)
DEFAULT_EXCLUSION_TERMS = ("fdp",)


class TweetType(str, enum.Enum):
    ORIGINAL = "original"
    RETWEET = "retweet"
    QUOTE = "quote"
    REPLY = "reply"


class ParseError(ValueError):
    """A record could not be turned into a :class:`Tweet`."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass
class UserProfile:
    user_id: int
    screen_name: str
    account_created_at: int | None = None
    followers: int = 0
    friends: int = 0
    verified: bool = False
    default_profile_image: bool = False
    default_user_image: bool = False
    geo_enabled: bool = False
    display_name: str = ""

    def __post_init__(self):
        if self.followers < 0 or self.friends < 0:
            raise ValueError("follower and friend counts must be non-negative")


@dataclass
class Tweet:
    """One parsed status. ``created_at`` is UTC epoch seconds."""

    tweet_id: int
    author_id: int
    author_screen_name: str
    created_at: int
    text: str
    tweet_type: TweetType = TweetType.ORIGINAL
    hashtags: list[str] = field(default_factory=list)
    urls: list[str] = field(default_factory=list)
    media_ids: list[str] = field(default_factory=list)
    mentions: list[int] = field(default_factory=list)
    client_source: str = ""
    referenced_tweet_id: int | None = None
    referenced_author_id: int | None = None
    lang: str | None = None
    profile: UserProfile | None = field(default=None, compare=False, repr=False)


@dataclass
class UserTimeline:
    profile: UserProfile
    tweets: list[Tweet]

    @property
    def user_id(self) -> int:
        return self.profile.user_id


@dataclass
class CorpusConfig:
    search_terms: list[str] = field(default_factory=lambda: list(DEFAULT_SEARCH_TERMS))
    exclusion_terms: list[str] = field(default_factory=lambda: list(DEFAULT_EXCLUSION_TERMS))
    match_mode: str = "token"
    inputs: list[str] = field(default_factory=list)
    store: str | None = None

    def __post_init__(self):
        self.search_terms = [t.lower() for t in self.search_terms]
        self.exclusion_terms = [t.lower() for t in self.exclusion_terms]
        if not self.search_terms:
            raise ValueError("search_terms must not be empty")
        if self.match_mode not in ("token", "substring"):
            raise ValueError(f"match_mode must be 'token' or 'substring', got {self.match_mode!r}")

    @property
    def effective_search_terms(self) -> list[str]:
        """Search terms with excluded terms removed."""
        excluded = set(self.exclusion_terms)
        return [t for t in self.search_terms if t not in excluded]


@dataclass
class ExclusionStats:
    parsed: int = 0
    kept: int = 0
    excluded: int = 0

    @property
    def excluded_fraction(self) -> float:
        return self.excluded / self.parsed if self.parsed else 0.0


# -- timestamps -------------------------------------------------------------

_MONTHS = {m: i + 1 for i, m in enumerate(
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"])}
_MONTH_NAMES = {v: k for k, v in _MONTHS.items()}
_DAY_NAMES = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]


def parse_timestamp(value) -> int:
    """UTC epoch seconds from the Twitter layout, ISO-8601, or a number."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return int(value)
    if not isinstance(value, str):
        raise ValueError(f"unsupported timestamp {value!r}")
    parts = value.split()
    if len(parts) == 6 and parts[1] in _MONTHS:
        # Wed Oct 10 20:19:24 +0000 2018
        h, m, s = parts[3].split(":")
        dt = datetime(int(parts[5]), _MONTHS[parts[1]], int(parts[2]), int(h), int(m), int(s),
                      tzinfo=timezone.utc)
        tz = parts[4]
        offset = (int(tz[1:3]) * 3600 + int(tz[3:5]) * 60) * (-1 if tz[0] == "-" else 1)
        return int(dt.timestamp()) - offset
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(ts: int) -> str:
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    return (f"{_DAY_NAMES[dt.weekday()]} {_MONTH_NAMES[dt.month]} {dt.day:02d} "
            f"{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d} +0000 {dt.year}")


# -- parsing ----------------------------------------------------------------

_HASHTAG_RE = re.compile(r"#(\w+)")
_SOURCE_RE = re.compile(r">([^<]*)<")


def _client_name(source: str) -> str:
    m = _SOURCE_RE.search(source)
    return m.group(1) if m else source


def _parse_profile(user: dict) -> UserProfile:
    created = user.get("created_at")
    return UserProfile(
        user_id=int(user["id"]),
        screen_name=str(user["screen_name"]),
        account_created_at=parse_timestamp(created) if created is not None else None,
        followers=int(user.get("followers_count") or 0),
        friends=int(user.get("friends_count") or 0),
        verified=bool(user.get("verified", False)),
        default_profile_image=bool(user.get("default_profile_image", False)),
        default_user_image=bool(user.get("default_profile", False)),
        geo_enabled=bool(user.get("geo_enabled", False)),
        display_name=str(user.get("name") or ""),
    )


def tweet_from_record(rec: dict, offset: int = 0) -> Tweet:
    """Build a :class:`Tweet` from an already decoded record."""
    try:
        user = rec["user"]
        tweet_id = int(rec["id"])
        text = rec.get("full_text", rec["text"])
        profile = _parse_profile(user)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or invalid mandatory field: {exc}", offset) from None
    if "created_at" not in rec:
        raise ParseError("missing mandatory field: created_at", offset)
    try:
        created = parse_timestamp(rec["created_at"])
    except (ValueError, IndexError, KeyError) as exc:
        raise ParseError(f"unparseable created_at: {exc}", offset) from None

    entities = rec.get("entities") or {}
    if "hashtags" in entities:
        hashtags = [
            (h["text"] if isinstance(h, dict) else str(h)).lstrip("#").lower()
            for h in entities["hashtags"]
        ]
    else:
        hashtags = [h.lower() for h in _HASHTAG_RE.findall(text)]
    urls = [
        (u.get("expanded_url") or u.get("url", "")) if isinstance(u, dict) else str(u)
        for u in entities.get("urls", ())
    ]
    media_ids = [
        str(m["id"]) if isinstance(m, dict) else str(m)
        for m in entities.get("media", ())
    ]
    mentions = [
        int(m["id"]) if isinstance(m, dict) else int(m)
        for m in entities.get("user_mentions", ())
    ]

    rt = rec.get("retweeted_status")
    qt = rec.get("quoted_status")
    reply_to = rec.get("in_reply_to_status_id")
    ref_id = ref_author = None
    if rt is not None:
        kind = TweetType.RETWEET
        ref_id, ref_author = rt.get("id"), (rt.get("user") or {}).get("id")
    elif qt is not None:
        kind = TweetType.QUOTE
        ref_id, ref_author = qt.get("id"), (qt.get("user") or {}).get("id")
    elif reply_to is not None:
        kind = TweetType.REPLY
        ref_id, ref_author = reply_to, rec.get("in_reply_to_user_id")
    else:
        kind = TweetType.ORIGINAL

    return Tweet(
        tweet_id=tweet_id,
        author_id=profile.user_id,
        author_screen_name=profile.screen_name,
        created_at=created,
        text=text,
        tweet_type=kind,
        hashtags=hashtags,
        urls=urls,
        media_ids=media_ids,
        mentions=mentions,
        client_source=_client_name(str(rec.get("source") or "")),
        referenced_tweet_id=int(ref_id) if ref_id is not None else None,
        referenced_author_id=int(ref_author) if ref_author is not None else None,
        lang=rec.get("lang"),
        profile=profile,
    )


def parse_tweet(line: str | bytes, offset: int = 0) -> Tweet:
    """Parse one newline-delimited record.

    ``offset`` is the byte position of the line in its file and is carried by
    any :class:`ParseError` raised.
    """
    try:
        rec = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed record: {exc}", offset) from None
    if not isinstance(rec, dict):
        raise ParseError("record is not an object", offset)
    return tweet_from_record(rec, offset)


def _profile_record(p: UserProfile) -> dict:
    rec = {
        "id": p.user_id,
        "screen_name": p.screen_name,
        "name": p.display_name,
        "followers_count": p.followers,
        "friends_count": p.friends,
        "verified": p.verified,
        "default_profile_image": p.default_profile_image,
        "default_profile": p.default_user_image,
        "geo_enabled": p.geo_enabled,
    }
    if p.account_created_at is not None:
        rec["created_at"] = format_timestamp(p.account_created_at)
    return rec


def tweet_to_record(t: Tweet) -> dict:
    profile = t.profile or UserProfile(t.author_id, t.author_screen_name)
    rec = {
        "id": t.tweet_id,
        "created_at": format_timestamp(t.created_at),
        "text": t.text,
        "source": t.client_source,
        "user": _profile_record(profile),
        "entities": {
            "hashtags": [{"text": h} for h in t.hashtags],
            "urls": [{"expanded_url": u} for u in t.urls],
            "media": [{"id": m} for m in t.media_ids],
            "user_mentions": [{"id": m} for m in t.mentions],
        },
    }
    if t.lang is not None:
        rec["lang"] = t.lang
    ref = {"id": t.referenced_tweet_id, "user": {"id": t.referenced_author_id}}
    if t.tweet_type is TweetType.RETWEET:
        rec["retweeted_status"] = ref
    elif t.tweet_type is TweetType.QUOTE:
        rec["quoted_status"] = ref
    elif t.tweet_type is TweetType.REPLY:
        rec["in_reply_to_status_id"] = t.referenced_tweet_id
        rec["in_reply_to_user_id"] = t.referenced_author_id
    return rec


def serialize_tweet(t: Tweet) -> str:
    """One-line record that :func:`parse_tweet` reads back field-identical."""
    return json.dumps(tweet_to_record(t), ensure_ascii=False, separators=(",", ":"))


def iter_records(paths: Iterable[str | Path], errors: list | None = None) -> Iterator[Tweet]:
    """Parse every line of every file. Bad lines are skipped and, when
    ``errors`` is given, appended to it as ``(path, ParseError)``."""
    for path in paths:
        offset = 0
        with open(path, "rb") as fh:
            for raw in fh:
                start, offset = offset, offset + len(raw)
                if not raw.strip():
                    continue
                try:
                    yield parse_tweet(raw, start)
                except ParseError as exc:
                    if errors is None:
                        raise ParseError(f"{path}: {exc.args[0]}", start) from None
                    errors.append((str(path), exc))


def expand_inputs(patterns: Iterable[str]) -> list[str]:
    out: list[str] = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        out.extend(hits if hits else [pat])
    return out


# -- term matching ----------------------------------------------------------

def matches_terms(tweet: Tweet, terms: Iterable[str], mode: str = "token") -> bool:
    """True when a term is one of the tweet's hashtags or occurs in its text.

    In ``"token"`` mode the text match must sit on non-alphanumeric
    boundaries; ``"substring"`` reproduces a raw stream-filter match.
    """
    terms = list(terms)
    if not terms:
        return False
    tags = set(tweet.hashtags)
    if any(t in tags for t in terms):
        return True
    text = tweet.text.lower()
    if mode == "substring":
        return any(t in text for t in terms)
    toks = set(tokenize(text))
    return any(t in toks for t in terms)


def filter_terms(tweets: Iterable[Tweet], config: CorpusConfig) -> Iterator[Tweet]:
    """Collection-time filter: keep tweets matching any search term."""
    terms = config.search_terms
    for t in tweets:
        if matches_terms(t, terms, config.match_mode):
            yield t


def apply_exclusion(
    tweets: Iterable[Tweet], config: CorpusConfig
) -> tuple[list[Tweet], ExclusionStats]:
    """Drop every tweet matching an exclusion term (token matching)."""
    stats = ExclusionStats()
    kept = []
    terms = config.exclusion_terms
    for t in tweets:
        stats.parsed += 1
        if terms and matches_terms(t, terms, "token"):
            stats.excluded += 1
        else:
            kept.append(t)
    stats.kept = len(kept)
    return kept, stats


# -- timelines and the on-disk store ---------------------------------------

def build_timelines(tweets: Iterable[Tweet]) -> dict[int, UserTimeline]:
    """Group tweets by author and sort each timeline by (created_at, tweet_id).

    Duplicate tweet ids keep the first occurrence. The profile retained per
    user is the snapshot attached to that user's most recent tweet.
    """
    seen: set[int] = set()
    by_user: dict[int, list[Tweet]] = {}
    for t in tweets:
        if t.tweet_id in seen:
            continue
        seen.add(t.tweet_id)
        by_user.setdefault(t.author_id, []).append(t)
    out = {}
    for uid in sorted(by_user):
        tl = sorted(by_user[uid], key=lambda t: (t.created_at, t.tweet_id))
        last = tl[-1]
        profile = last.profile or UserProfile(uid, last.author_screen_name)
        out[uid] = UserTimeline(profile=profile, tweets=tl)
    return out


@dataclass
class Store:
    """In-memory view of a timeline store."""

    timelines: dict[int, UserTimeline]

    def __len__(self) -> int:
        return len(self.timelines)

    @property
    def n_tweets(self) -> int:
        return sum(len(tl.tweets) for tl in self.timelines.values())

    def iter_tweets(self) -> Iterator[Tweet]:
        for tl in self.timelines.values():
            yield from tl.tweets

    def screen_name(self, user_id: int) -> str | None:
        tl = self.timelines.get(user_id)
        return tl.profile.screen_name if tl else None

    @classmethod
    def from_tweets(cls, tweets: Iterable[Tweet]) -> "Store":
        return cls(build_timelines(tweets))


_TWEET_FIELDS = ("tweet_id", "created_at", "text", "tweet_type", "hashtags", "urls",
                 "media_ids", "mentions", "client_source", "referenced_tweet_id",
                 "referenced_author_id", "lang", "author_screen_name")


def _profile_dict(p: UserProfile) -> dict:
    return {k: getattr(p, k) for k in p.__dataclass_fields__}


def write_store(timelines: dict[int, UserTimeline] | Store, directory: str | Path) -> Path:
    """Write ``timelines.jsonl`` (one user per line, ascending user id)."""
    if isinstance(timelines, Store):
        timelines = timelines.timelines
    directory = Path(directory)
    path = directory / "timelines.jsonl"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for uid in sorted(timelines):
                tl = timelines[uid]
                row = {
                    "profile": _profile_dict(tl.profile),
                    "tweets": [
                        [t.tweet_type.value if f == "tweet_type" else getattr(t, f)
                         for f in _TWEET_FIELDS]
                        for t in tl.tweets
                    ],
                }
                fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write store at {path}: {exc.strerror}") from exc
    return path


def load_store(directory: str | Path) -> Store:
    path = Path(directory) / "timelines.jsonl"
    timelines = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            profile = UserProfile(**row["profile"])
            tweets = []
            for values in row["tweets"]:
                kw = dict(zip(_TWEET_FIELDS, values))
                kw["tweet_type"] = TweetType(kw["tweet_type"])
                tweets.append(Tweet(author_id=profile.user_id, profile=profile, **kw))
            timelines[profile.user_id] = UserTimeline(profile, tweets)
    return Store(timelines)
