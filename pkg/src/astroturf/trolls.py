"""Matching a published troll-account roster against the corpus by user id."""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .ingest import Store, TweetType

DAY = 86400


class TrollListError(ValueError):
    pass


@dataclass
class TrollList:
    """Roster entries keyed by user id; insertion order follows the file."""

    entries: dict[int, list[str]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, user_id: int) -> bool:
        return user_id in self.entries


@dataclass
class MatchedAccount:
    user_id: int
    screen_name: str
    tweets_total: int
    originals: int
    retweets: int
    quotes: int
    replies: int
    renamed: bool


@dataclass
class Interactions:
    """Retweets and quotes whose referenced author is a matched troll,
    split by whether the referencing account is itself a matched troll."""

    retweets_by_trolls: int = 0
    retweets_by_others: int = 0
    quotes_by_trolls: int = 0
    quotes_by_others: int = 0

    @property
    def troll_tweets_retweeted(self) -> int:
        return self.retweets_by_trolls + self.retweets_by_others


@dataclass
class TrollMatchReport:
    matched_accounts: list[MatchedAccount]
    unmatched: int
    list_size: int
    creation_histogram: dict[str, int]
    activity_series: dict[str, int]
    interaction: Interactions

    @property
    def matched_ids(self) -> set[int]:
        return {a.user_id for a in self.matched_accounts}

    @property
    def tweets_total(self) -> int:
        return sum(a.tweets_total for a in self.matched_accounts)


# Released rosters name their columns differently; first hit wins.
COLUMN_ALIASES = {
    "user_id": ("user_id", "userid", "id", "user id"),
    "screen_name": ("screen_name", "user_screen_name", "handle", "screenname"),
}


def _resolve_columns(header: list[str]) -> dict[str, str]:
    lowered = {h.strip().lower(): h for h in header}
    out = {}
    for canonical, aliases in COLUMN_ALIASES.items():
        for a in aliases:
            if a in lowered:
                out[canonical] = lowered[a]
                break
        else:
            raise TrollListError(f"troll list lacks a {canonical!r} column (header: {header})")
    return out


def load_troll_list(path: str | Path) -> TrollList:
    """Read a roster CSV. Several rows per id merge their screen names."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise TrollListError(f"{path}: empty file, expected a header row")
        cols = _resolve_columns(reader.fieldnames)
        out = TrollList()
        for row in reader:
            raw_id = (row[cols["user_id"]] or "").strip()
            if not raw_id:
                continue
            uid = int(raw_id)
            name = (row[cols["screen_name"]] or "").strip()
            names = out.entries.setdefault(uid, [])
            if name and name not in names:
                names.append(name)
    return out


def _month(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m")


def _day(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%d")


def troll_interactions(store: Store, matched: set[int]) -> Interactions:
    out = Interactions()
    for t in store.iter_tweets():
        if t.referenced_author_id not in matched:
            continue
        by_troll = t.author_id in matched
        if t.tweet_type is TweetType.RETWEET:
            if by_troll:
                out.retweets_by_trolls += 1
            else:
                out.retweets_by_others += 1
        elif t.tweet_type is TweetType.QUOTE:
            if by_troll:
                out.quotes_by_trolls += 1
            else:
                out.quotes_by_others += 1
    return out


def match_trolls(store: Store, trolls: TrollList) -> TrollMatchReport:
    """Match strictly by user id; screen names only decide ``renamed``."""
    accounts = []
    created = Counter()
    activity = Counter()
    for uid in sorted(trolls.entries):
        tl = store.timelines.get(uid)
        if tl is None:
            continue
        types = Counter(t.tweet_type for t in tl.tweets)
        name = tl.profile.screen_name
        known = {n.lower() for n in trolls.entries[uid]}
        accounts.append(MatchedAccount(
            user_id=uid,
            screen_name=name,
            tweets_total=len(tl.tweets),
            originals=types[TweetType.ORIGINAL],
            retweets=types[TweetType.RETWEET],
            quotes=types[TweetType.QUOTE],
            replies=types[TweetType.REPLY],
            renamed=bool(known) and name.lower() not in known,
        ))
        if tl.profile.account_created_at is not None:
            created[_month(tl.profile.account_created_at)] += 1
        for t in tl.tweets:
            activity[_day(t.created_at)] += 1
    matched = {a.user_id for a in accounts}
    return TrollMatchReport(
        matched_accounts=accounts,
        unmatched=len(trolls) - len(accounts),
        list_size=len(trolls),
        creation_histogram=dict(sorted(created.items())),
        activity_series=dict(sorted(activity.items())),
        interaction=troll_interactions(store, matched),
    )
