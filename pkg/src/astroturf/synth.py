"""Seeded generator of labeled synthetic election-tweet corpora.

Humans post while awake and sleep 6 to 9 hours every night. Bots come in three
archetypes:

* scheduler: posts at a fixed interval with a constant seconds field, each
  tweet a headline with a URL and the currently popular hashtags
* repeater: cycles through at most five templates around the clock
* amplifier: never sleeps and leans heavily on one tweet type (retweets,
  replies or originals); it reacts either within minutes or with a long
  delay, and its own text comes from the same distribution as human text

Every account draws from its own child seed, so the corpus does not depend
on generation order. Tweet times are fixed first; content is then assigned
in global time order so that retweets, quotes and replies always point at
earlier tweets of other accounts.
"""
from __future__ import annotations

import bisect
import csv
import dataclasses
import itertools
import json
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ingest import Tweet, TweetType, UserProfile, serialize_tweet

DAY = 86400
HOUR = 3600
START = int(datetime(2017, 8, 25, tzinfo=timezone.utc).timestamp())
ARCHETYPES = ("scheduler", "repeater", "amplifier")
PARTY_TERMS = ("afd", "cdu", "csu", "spd", "linke", "gruene", "npd")
TOPIC_TAGS = (
    "btw17", "wahl2017", "bundestagswahl", "merkel", "schulz", "afd", "spd", "cdu",
    "gruene", "linke", "kanzlerduell", "traudichdeutschland", "zeitfuermartin",
    "fedidwgugl", "wahlkampf", "migration", "rente", "diesel", "bildung", "europa",
)
NEWS_HOSTS = ("spiegel.de", "zeit.de", "faz.net", "sueddeutsche.de", "welt.de", "tagesschau.de",
              "bild.de", "focus.de", "n-tv.de", "taz.de")
SPAM_HOSTS = ("bit.ly", "dlvr.it", "ow.ly", "tinyurl.com")
HUMAN_CLIENTS = ("Twitter for iPhone", "Twitter for Android", "Twitter Web Client",
                 "Twitter for iPad", "TweetDeck")
THIRD_PARTY = ("Hootsuite", "Buffer", "Echofon", "Tweetbot for iOS")
SCHEDULER_CLIENTS = ("dlvr.it", "IFTTT", "twitterfeed", "Buffer")
REPEATER_CLIENTS = ("autopost", "massposter", "socialboost", "feedcast")
AMPLIFIER_CLIENTS = ("Twitter for Android", "Twitter Web Client", "retweetr", "RoundTeam")

# text and type mix by archetype: (original, retweet, quote, reply)
TYPE_MIX = {
    "human": (0.45, 0.30, 0.10, 0.15),
    "power": (0.25, 0.60, 0.10, 0.05),
    "scheduler": (0.92, 0.06, 0.02, 0.0),
    "repeater": (0.80, 0.05, 0.0, 0.15),
    "amplifier": (0.12, 0.76, 0.08, 0.04),
    "responder": (0.15, 0.15, 0.10, 0.60),
    "poster": (0.75, 0.10, 0.10, 0.05),
}
_TYPES = (TweetType.ORIGINAL, TweetType.RETWEET, TweetType.QUOTE, TweetType.REPLY)

_ONSETS = ("b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w", "z",
           "sch", "st", "br", "kr", "tr", "fl", "gr")
_VOWELS = ("a", "e", "i", "o", "u", "ei", "au", "ie")
_CODAS = ("", "", "n", "r", "s", "t", "ng", "ch", "l", "m")


class SynthError(ValueError):
    pass


def _pair(value) -> tuple[float, float]:
    lo, hi = (float(v) for v in value)
    if lo > hi:
        raise SynthError(f"range {value!r} is reversed")
    return lo, hi


@dataclass
class SynthConfig:
    n_humans: int = 800
    n_bots: int = 200
    span_days: float = 30.0
    seed: int = 42
    start: int = START
    bot_weights: dict = field(default_factory=lambda: {
        "scheduler": 0.25, "repeater": 0.25, "amplifier": 0.50})
    human_gap_hours: tuple = (6.0, 9.0)
    human_rate: tuple = (1.5, 10.0)
    vocab_size: int = 3000
    scheduler_interval_minutes: tuple = (30.0, 240.0)
    repeater_rate: tuple = (4.0, 16.0)
    amplifier_rate: tuple = (2.0, 40.0)
    troll_plant: list = field(default_factory=list)
    n_trolls: int = 0
    n_renamed: int = 0
    troll_absent: int = 0
    fdp_fraction: float = 0.0

    def __post_init__(self):
        if self.n_humans < 0 or self.n_bots < 0:
            raise SynthError("account counts must be >= 0")
        if not self.span_days > 0:
            raise SynthError("span_days must be > 0")
        unknown = set(self.bot_weights) - set(ARCHETYPES)
        if unknown:
            raise SynthError(f"unknown bot archetypes {sorted(unknown)}")
        weights = [float(self.bot_weights.get(a, 0.0)) for a in ARCHETYPES]
        if min(weights) < 0 or not math.isclose(sum(weights), 1.0, abs_tol=1e-9):
            raise SynthError("bot archetype weights must be >= 0 and sum to 1")
        self.human_gap_hours = _pair(self.human_gap_hours)
        if self.human_gap_hours[0] < 6.0 or self.human_gap_hours[1] >= 15.0:
            raise SynthError("human nightly gap must lie in [6h, 15h)")
        self.human_rate = _pair(self.human_rate)
        self.repeater_rate = _pair(self.repeater_rate)
        self.amplifier_rate = _pair(self.amplifier_rate)
        self.scheduler_interval_minutes = _pair(self.scheduler_interval_minutes)
        if self.scheduler_interval_minutes[1] >= 360:
            raise SynthError("scheduler interval must stay below 6 hours")
        if self.vocab_size < 50:
            raise SynthError("vocab_size must be at least 50")
        if self.troll_plant and self.n_trolls:
            raise SynthError("give either troll_plant or n_trolls, not both")
        n_trolls = len(self.troll_plant) or self.n_trolls
        if not 0 <= self.n_renamed <= n_trolls:
            raise SynthError("n_renamed must be between 0 and the number of trolls")
        if n_trolls > self.n_humans + self.n_bots:
            raise SynthError("more trolls than accounts")
        if not 0.0 <= self.fdp_fraction < 1.0:
            raise SynthError("fdp_fraction must be in [0, 1)")

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        if "bots" in d:
            d["bot_weights"] = d.pop("bots")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise SynthError(f"unknown synth settings {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out


def account_id(index: int) -> int:
    return 700_000_000 + 7919 * index


def scheduler_times(start: int, span: int, interval: int, phase: int = 0) -> np.ndarray:
    """Posting times every ``interval`` seconds from ``start + phase``.

    A whole-minute interval keeps the seconds field constant.
    """
    return np.arange(start + phase, start + span, interval, dtype=np.int64)


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _word(rng) -> str:
    u = rng.random(10).tolist()
    parts = [_ONSETS[int(u[i] * len(_ONSETS))] + _VOWELS[int(u[i + 1] * len(_VOWELS))]
             + _CODAS[int(u[i + 2] * len(_CODAS))] for i in range(0, 3 * int(1 + 3 * u[9]), 3)]
    return "".join(parts)


def _cdf(weights) -> list[float]:
    return list(itertools.accumulate(float(w) for w in weights))


def _draw(rng, cdf: list[float]) -> int:
    """Index drawn with probability proportional to the weights behind ``cdf``."""
    return bisect.bisect_right(cdf, rng.random() * cdf[-1])


class MarkovText:
    """First-order chain over a fixed pseudo-German vocabulary.

    Each word has a short list of successors picked with Zipf weights, which
    gives texts recurring phrases without making them templates.
    """

    SUCCESSORS = 12

    def __init__(self, vocab_size: int, seed: int = 2017):
        rng = _rng(seed, 99)
        banned = set(PARTY_TERMS) | {"fdp", "rt"}
        words: list[str] = []
        seen: set[str] = set()
        while len(words) < vocab_size:
            w = _word(rng)
            if w in seen or w in banned or "bot" in w or len(w) < 2:
                continue
            seen.add(w)
            words.append(w)
        self.words = words
        ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
        unigram = (1.0 / ranks) / np.sum(1.0 / ranks)
        self.unigram_cdf = _cdf(unigram)
        self.succ = rng.choice(vocab_size, size=(vocab_size, self.SUCCESSORS),
                               p=unigram).tolist()
        self.succ_cdf = _cdf(1.0 / np.arange(1, self.SUCCESSORS + 1))

    def word(self, rng) -> str:
        return self.words[_draw(rng, self.unigram_cdf)]

    def sentence(self, rng, n_words: int) -> list[str]:
        cur = _draw(rng, self.unigram_cdf)
        top = self.succ_cdf[-1]
        out = []
        for u in rng.random(n_words).tolist():
            out.append(self.words[cur])
            cur = self.succ[cur][bisect.bisect_right(self.succ_cdf, u * top)]
        return out


@dataclass
class _Account:
    index: int
    user_id: int
    label: str
    archetype: str
    profile: UserProfile
    clients: list[str]
    client_cdf: list[float]
    times: np.ndarray
    types: list[TweetType]
    rng: np.random.Generator
    popularity: float
    renamed_to: str | None = None
    templates: list = field(default_factory=list)
    template_share: float = 1.0
    swaps: int = 1
    hosts: tuple = NEWS_HOSTS
    lag_mean: float = 3.0 * HOUR
    url_p: float = 0.2
    tag_p: float = 0.55
    length: tuple = (5, 20)


@dataclass
class SynthCorpus:
    tweets: list[Tweet]
    labels: dict[int, str]
    truth: dict
    trolls: dict[int, list[str]]

    def write(self, out: str | Path) -> list[Path]:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        corpus = out / "corpus.jsonl"
        with open(corpus, "w", encoding="utf-8", newline="\n") as fh:
            for t in self.tweets:
                fh.write(serialize_tweet(t) + "\n")
        labels = out / "labels.csv"
        with open(labels, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["user_id", "label"])
            for uid in sorted(self.labels):
                w.writerow([uid, self.labels[uid]])
        truth = out / "truth.json"
        truth.write_text(json.dumps(self.truth, sort_keys=True, indent=1) + "\n",
                         encoding="utf-8")
        paths = [corpus, labels, truth]
        if self.trolls:
            trolls = out / "trolls.csv"
            with open(trolls, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["user_id", "screen_name"])
                for uid, names in self.trolls.items():
                    for name in names:
                        w.writerow([uid, name])
            paths.append(trolls)
        return paths


class _Generator:
    def __init__(self, config: SynthConfig):
        self.cfg = config
        self.text = MarkovText(config.vocab_size)
        self.span = int(round(config.span_days * DAY))
        self.end = config.start + self.span
        self.names: set[str] = set()

    # -- accounts ----------------------------------------------------------

    def _screen_name(self, rng, bot: bool) -> str:
        while True:
            base = _word(rng) + (_word(rng).capitalize() if rng.random() < 0.5 else "")
            if bot and rng.random() < 0.1:
                base += "_bot"
            elif not bot and rng.random() < 0.01:
                base = "abbott" + base
            if rng.random() < 0.4:
                base += str(int(rng.integers(1, 999)))
            name = base[:15]
            if "bot" in name.lower() and not bot and not name.startswith("abbott"):
                continue
            if name.lower() not in self.names:
                self.names.add(name.lower())
                return name

    def _profile(self, rng, uid, label):
        bot = label == "bot"
        name = self._screen_name(rng, bot)
        if bot:
            created = self.cfg.start - int(rng.uniform(5, 1500)) * DAY
            # bought followers or mass following
            big, small = rng.lognormal(7.0, 1.0), rng.lognormal(3.5, 1.0)
            followers, friends = (int(big), int(small)) if rng.random() < 0.5 else (
                int(small), int(big))
            flags = rng.random(4) < (0.12, 0.3, 0.0, 0.15)
        else:
            created = self.cfg.start - int(rng.uniform(60, 3200)) * DAY
            followers = int(rng.lognormal(5.0, 1.6))
            friends = int(rng.lognormal(5.3, 1.1))
            flags = rng.random(4) < (0.06, 0.25, 0.02, 0.3)
        display = " ".join(_word(rng).capitalize() for _ in range(2))
        return UserProfile(
            user_id=uid, screen_name=name, account_created_at=created, followers=followers,
            friends=friends, verified=bool(flags[2]), default_profile_image=bool(flags[0]),
            default_user_image=bool(flags[1]), geo_enabled=bool(flags[3]),
            display_name=display,
        )

    def _human_times(self, rng, rate_range):
        cfg = self.cfg
        rate = math.exp(rng.uniform(*np.log(rate_range)))
        bedtime = rng.uniform(22.0, 25.5) * HOUR
        days = int(math.ceil(self.span / DAY)) + 2
        nights = []
        for d in range(-1, days):
            s = cfg.start + d * DAY + bedtime + rng.uniform(-0.5, 0.5) * HOUR
            nights.append((s, s + rng.uniform(*cfg.human_gap_hours) * HOUR))
        awake_per_day = DAY - np.mean([e - s for s, e in nights])
        out = []
        for (_, wake), (sleep, _) in zip(nights, nights[1:]):
            lo, hi = max(wake, cfg.start), min(sleep, self.end)
            if hi <= lo:
                continue
            k = rng.poisson(rate * (hi - lo) / awake_per_day)
            # a tweet exactly at the night edge would leave a gap under 6h
            out.append(rng.uniform(lo + 1, hi - 1, size=k))
        ts = np.floor(np.concatenate(out)).astype(np.int64) if out else np.zeros(0, np.int64)
        return np.sort(ts)

    def _poisson_times(self, rng, rate_range):
        rate = math.exp(rng.uniform(*np.log(rate_range)))
        k = rng.poisson(rate * self.span / DAY)
        return np.sort(rng.integers(self.cfg.start, self.end, size=k))

    def _types(self, rng, kind, n):
        mix = np.asarray(TYPE_MIX[kind])
        if kind in ("human", "power"):
            p = rng.dirichlet(mix * 6.0 + 1e-3)
        elif kind in ("amplifier", "responder", "poster"):
            p = rng.dirichlet(mix * 12.0 + 1e-3)
        else:
            p = mix
        idx = rng.choice(4, size=n, p=p)
        return [_TYPES[i] for i in idx]

    def _account(self, index, label, archetype) -> _Account:
        cfg = self.cfg
        rng = _rng(cfg.seed, 1, index)
        uid = account_id(index)
        profile = self._profile(rng, uid, label)
        hosts = NEWS_HOSTS
        mix = archetype
        lag = 3.0 * HOUR
        templates = 0
        template_share, swaps = 1.0, 1
        if archetype == "human":
            persona = rng.random()
            rate = cfg.human_rate
            k = int(rng.integers(1, 3))
            clients = list(rng.choice(HUMAN_CLIENTS, size=k, replace=False))
            if rng.random() < 0.08:
                clients = [str(rng.choice(THIRD_PARTY))]
            if persona < 0.15:
                # power users: busy, retweet-heavy, quick, often via dashboards
                rate = (max(rate[0], 6.0), max(rate[1], 18.0))
                mix = "power"
                lag = 0.5 * HOUR
                clients.append(str(rng.choice(THIRD_PARTY)))
            elif persona < 0.25:
                # campaigners paste a few slogans among their own tweets
                templates = int(rng.integers(1, 4))
                template_share = rng.uniform(0.2, 0.5)
                swaps = 2
            elif rng.random() < 0.1:
                clients.append(str(rng.choice(THIRD_PARTY)))
            times = self._human_times(rng, rate)
            popularity = float(rng.pareto(1.1) + 0.05)
        elif archetype == "scheduler":
            interval = 60 * int(rng.uniform(*cfg.scheduler_interval_minutes))
            phase = int(rng.integers(0, interval))
            times = scheduler_times(cfg.start, self.span, interval, phase)
            clients = [str(rng.choice(SCHEDULER_CLIENTS))]
            hosts = tuple(rng.choice(SPAM_HOSTS + NEWS_HOSTS, size=2, replace=False))
            popularity = 0.05
        elif archetype == "repeater":
            # half keep office hours, which hides them from the sleep features
            if rng.random() < 0.5:
                times = self._human_times(rng, cfg.repeater_rate)
            else:
                times = self._poisson_times(rng, cfg.repeater_rate)
            clients = [str(rng.choice(REPEATER_CLIENTS))]
            if rng.random() < 0.3:
                clients.append(str(rng.choice(HUMAN_CLIENTS)))
            hosts = (str(rng.choice(SPAM_HOSTS)),)
            popularity = 0.05
            templates = int(rng.integers(1, 6))
            swaps = int(rng.integers(0, 3))
        else:
            times = self._poisson_times(rng, cfg.amplifier_rate)
            clients = list(rng.choice(AMPLIFIER_CLIENTS, size=int(rng.integers(1, 3)),
                                      replace=False))
            popularity = 0.05
            mix = ("amplifier", "responder", "poster")[int(rng.integers(3))]
            lag = 0.1 * HOUR if rng.random() < 0.5 else 10.0 * HOUR
        w = rng.random(len(clients)) + 0.2
        lo = int(rng.integers(3, 10))
        acc = _Account(index, uid, label, archetype, profile, [str(c) for c in clients],
                       _cdf(w), times, self._types(rng, mix, times.size), rng, popularity,
                       template_share=template_share, swaps=swaps, hosts=hosts, lag_mean=lag,
                       url_p=float(rng.beta(1.2, 4.0)), tag_p=float(rng.uniform(0.2, 0.9)),
                       length=(lo, lo + int(rng.integers(5, 20))))
        for _ in range(templates):
            words = self.text.sentence(rng, int(rng.integers(8, 16)))
            tags = [str(t) for t in rng.choice(TOPIC_TAGS[:10], size=2, replace=False)]
            url = (f"https://{hosts[0]}/{_word(rng)}{int(rng.integers(100, 999))}"
                   if label == "bot" and rng.random() < 0.7 else None)
            acc.templates.append((words, tags, url))
        return acc

    def accounts(self) -> list[_Account]:
        cfg = self.cfg
        n = cfg.n_humans + cfg.n_bots
        rng = _rng(cfg.seed, 0)
        is_bot = np.zeros(n, dtype=bool)
        is_bot[rng.permutation(n)[:cfg.n_bots]] = True
        # largest-remainder split of bots into archetypes, then shuffled
        w = np.array([cfg.bot_weights.get(a, 0.0) for a in ARCHETYPES]) * cfg.n_bots
        counts = np.floor(w).astype(int)
        for i in np.argsort(-(w - counts), kind="stable")[:cfg.n_bots - counts.sum()]:
            counts[i] += 1
        kinds = rng.permutation(np.repeat(np.arange(3), counts))
        out = []
        b = 0
        for i in range(n):
            if is_bot[i]:
                out.append(self._account(i, "bot", ARCHETYPES[kinds[b]]))
                b += 1
            else:
                out.append(self._account(i, "human", "human"))
        return out

    # -- content -----------------------------------------------------------

    def _party_words(self, rng, words):
        u, v = rng.random(2).tolist()
        pos = int(u * (len(words) + 1))
        return words[:pos] + [PARTY_TERMS[int(v * len(PARTY_TERMS))]] + words[pos:]

    _N_TAGS_CDF = _cdf((0.6, 0.3, 0.1))
    _TAG_CDF = _cdf(1.0 / np.arange(1, len(TOPIC_TAGS) + 1))

    def _hashtags(self, rng, tag_p):
        if rng.random() >= tag_p:
            return []
        k = 1 + _draw(rng, self._N_TAGS_CDF)
        tags: list[str] = []
        while len(tags) < k:
            tag = TOPIC_TAGS[_draw(rng, self._TAG_CDF)]
            if tag not in tags:
                tags.append(tag)
        return tags

    def _url(self, rng, acc):
        u = rng.random()
        return f"https://{acc.hosts[int(u * len(acc.hosts))]}/{_word(rng)}/{int(u * 10**9) % 10**6}"

    def _original(self, acc: _Account, t: int, counter: int):
        rng = acc.rng
        media = []
        if acc.archetype == "scheduler":
            words = self._party_words(rng, self.text.sentence(rng, int(rng.integers(6, 12))))
            tags = [str(x) for x in rng.choice(TOPIC_TAGS[:8], size=int(rng.integers(2, 4)),
                                               replace=False)]
            urls = [self._url(rng, acc)]
            text = " ".join(words) + " " + urls[0] + " " + " ".join("#" + x for x in tags)
            return text, tags, urls, media, []
        if acc.templates and rng.random() < acc.template_share:
            words, tags, url = acc.templates[int(rng.integers(len(acc.templates)))]
            words = list(words)
            for _ in range(int(rng.integers(0, acc.swaps + 1))):
                words[int(rng.integers(len(words)))] = self.text.word(rng)
            words = self._party_words(rng, words)
            text = " ".join(words) + " " + " ".join("#" + x for x in tags)
            if url is None:
                return text, list(tags), [], media, []
            if rng.random() < 0.3:
                media = [f"m{acc.user_id}{int(rng.integers(3))}"]
            return text + " " + url, list(tags), [url], media, []
        words = self._party_words(rng, self.text.sentence(rng, int(rng.integers(*acc.length))))
        tags = self._hashtags(rng, acc.tag_p)
        urls = [self._url(rng, acc)] if rng.random() < acc.url_p else []
        if rng.random() < 0.1:
            media = [f"m{t}{counter}"]
        parts = [" ".join(words)]
        # hashtags either inline or trailing
        if tags and rng.random() < 0.5:
            parts.append(" ".join("#" + x for x in tags))
        elif tags:
            parts.insert(0, " ".join("#" + x for x in tags))
        parts.extend(urls)
        return " ".join(parts), tags, urls, media, []

    def generate(self) -> SynthCorpus:
        cfg = self.cfg
        accounts = self.accounts()
        by_id = {a.user_id: a for a in accounts}
        trolls = self._plant_trolls(accounts)
        mid = cfg.start + self.span // 2

        events = sorted((int(t), a.index, j) for a in accounts for j, t in enumerate(a.times))
        tweets: list[Tweet] = []
        # earlier tweets that can be retweeted/quoted, and reply targets
        src_t: list[int] = []
        src_i: list[int] = []
        src_w: list[float] = []
        any_t: list[int] = []
        any_i: list[int] = []
        pending: dict[int, list[int]] = defaultdict(list)
        next_id = 900_000_000_000

        def profile_at(acc, t):
            if acc.renamed_to is not None and t >= mid:
                return dataclasses.replace(acc.profile, screen_name=acc.renamed_to)
            return acc.profile

        for t, ai, j in events:
            acc = accounts[ai]
            rng = acc.rng
            kind = acc.types[j]
            profile = profile_at(acc, t)
            client = acc.clients[_draw(rng, acc.client_cdf)]
            ref = None
            if kind in (TweetType.RETWEET, TweetType.QUOTE):
                lag = rng.exponential(acc.lag_mean)
                hi = bisect.bisect_right(src_t, t - lag)
                lo = max(0, hi - 30)
                cand = [k for k in range(lo, hi) if tweets[src_i[k]].author_id != acc.user_id]
                if cand:
                    ref = tweets[src_i[cand[_draw(rng, _cdf(src_w[k] for k in cand))]]]
            elif kind is TweetType.REPLY:
                mine = pending[acc.user_id]
                if mine and rng.random() < 0.6 and t - tweets[mine[-1]].created_at < 12 * HOUR:
                    ref = tweets[mine.pop()]
                else:
                    hi = bisect.bisect_right(any_t, t - rng.exponential(HOUR))
                    cand = [k for k in range(max(0, hi - 20), hi)
                            if tweets[any_i[k]].author_id != acc.user_id]
                    if cand:
                        ref = tweets[any_i[cand[int(rng.integers(len(cand)))]]]
            if ref is None:
                kind = TweetType.ORIGINAL

            if kind is TweetType.RETWEET:
                text = f"RT @{ref.author_screen_name}: {ref.text}"
                tags, urls, media = list(ref.hashtags), list(ref.urls), list(ref.media_ids)
                mentions = [ref.author_id] + [m for m in ref.mentions if m != ref.author_id]
            elif kind is TweetType.QUOTE:
                text, tags, urls, media, mentions = self._original(acc, t, next_id)
                if acc.archetype in ("scheduler", "repeater"):
                    text = " ".join(self._party_words(rng, self.text.sentence(rng, 6)))
                    tags, urls, media = [], [], []
            elif kind is TweetType.REPLY:
                words = self._party_words(rng, self.text.sentence(rng, int(rng.integers(4, 15))))
                text = f"@{ref.author_screen_name} " + " ".join(words)
                tags, urls, media, mentions = [], [], [], [ref.author_id]
            else:
                text, tags, urls, media, mentions = self._original(acc, t, next_id)
                if acc.label == "human" and rng.random() < 0.1:
                    other = accounts[int(rng.integers(len(accounts)))]
                    if other.user_id != acc.user_id:
                        text = f"{text} @{profile_at(other, t).screen_name}"
                        mentions = [other.user_id]

            tw = Tweet(
                tweet_id=next_id, author_id=acc.user_id, author_screen_name=profile.screen_name,
                created_at=t, text=text, tweet_type=kind, hashtags=tags, urls=urls,
                media_ids=media, mentions=mentions, client_source=client,
                referenced_tweet_id=ref.tweet_id if ref is not None else None,
                referenced_author_id=ref.author_id if ref is not None else None,
                lang="de", profile=profile,
            )
            next_id += 1
            tweets.append(tw)
            k = len(tweets) - 1
            if kind is not TweetType.RETWEET:
                any_t.append(t)
                any_i.append(k)
            if kind in (TweetType.ORIGINAL, TweetType.QUOTE):
                src_t.append(t)
                src_i.append(k)
                src_w.append(acc.popularity)
            if kind is TweetType.REPLY:
                pending[ref.author_id].append(k)

        tweets, fdp_ids = self._inject_fdp(tweets, by_id)
        tweets.sort(key=lambda x: (x.created_at, x.tweet_id))
        labels = {a.user_id: a.label for a in accounts}
        truth = self._bookkeeping(tweets, accounts, trolls, fdp_ids)
        return SynthCorpus(tweets, labels, truth, trolls)

    def _plant_trolls(self, accounts) -> dict[int, list[str]]:
        cfg = self.cfg
        if cfg.troll_plant:
            ids = [int(x) for x in cfg.troll_plant]
            known = {a.user_id for a in accounts}
            missing = [x for x in ids if x not in known]
            if missing:
                raise SynthError(f"troll_plant ids not generated: {missing[:5]}")
        elif cfg.n_trolls:
            rng = _rng(cfg.seed, 2)
            pick = rng.choice(len(accounts), size=cfg.n_trolls, replace=False)
            ids = [accounts[i].user_id for i in sorted(pick)]
        else:
            return {}
        by_id = {a.user_id: a for a in accounts}
        rng = _rng(cfg.seed, 3)
        out: dict[int, list[str]] = {}
        for n, uid in enumerate(ids):
            acc = by_id[uid]
            acc.popularity = max(acc.popularity, 1.0) * 5.0
            out[uid] = [acc.profile.screen_name]
            if n < cfg.n_renamed:
                acc.renamed_to = self._screen_name(rng, acc.label == "bot")
        for k in range(cfg.troll_absent):
            out[account_id(len(accounts) + 1000 + k)] = [f"gone{k:04d}"]
        return out

    def _inject_fdp(self, tweets, by_id):
        """Append the token ``fdp`` to an exact share of the tweets, padding the
        corpus with same-second originals so the share is exact."""
        cfg = self.cfg
        if cfg.fdp_fraction <= 0 or not tweets:
            return tweets, []
        q = Fraction(cfg.fdp_fraction).limit_denominator(1000)
        rng = _rng(cfg.seed, 4)
        pad = (-len(tweets)) % q.denominator
        humans = [t for t in tweets if by_id[t.author_id].label == "human"] or tweets
        next_id = max(t.tweet_id for t in tweets) + 1
        for _ in range(pad):
            base = humans[int(rng.integers(len(humans)))]
            words = self._party_words(rng, self.text.sentence(rng, 8))
            tweets.append(Tweet(
                tweet_id=next_id, author_id=base.author_id,
                author_screen_name=base.author_screen_name, created_at=base.created_at,
                text=" ".join(words), tweet_type=TweetType.ORIGINAL, hashtags=[], urls=[],
                media_ids=[], mentions=[], client_source=base.client_source,
                referenced_tweet_id=None, referenced_author_id=None, lang="de",
                profile=base.profile,
            ))
            next_id += 1
        n_fdp = len(tweets) * q.numerator // q.denominator
        chosen = set(rng.choice(len(tweets), size=n_fdp, replace=False).tolist())
        out = []
        for i, t in enumerate(tweets):
            if i in chosen:
                t = dataclasses.replace(t, text=t.text + " fdp")
            out.append(t)
        return out, sorted(tweets[i].tweet_id for i in chosen)

    def _bookkeeping(self, tweets, accounts, trolls, fdp_ids) -> dict:
        per_user = Counter(t.author_id for t in tweets)
        per_type = Counter(t.tweet_type.value for t in tweets)
        user_types: dict[int, Counter] = defaultdict(Counter)
        daily: dict[str, Counter] = defaultdict(Counter)
        tags, media, rt_users, qt_users = Counter(), Counter(), Counter(), Counter()
        for t in tweets:
            user_types[t.author_id][t.tweet_type.value] += 1
            daily[str((t.created_at - t.created_at % DAY))][t.tweet_type.value] += 1
            tags.update(t.hashtags)
            media.update(t.media_ids)
            if t.tweet_type is TweetType.RETWEET:
                rt_users[t.referenced_author_id] += 1
            elif t.tweet_type is TweetType.QUOTE:
                qt_users[t.referenced_author_id] += 1
        troll_ids = set(trolls)
        inter = Counter()
        for t in tweets:
            if t.referenced_author_id in troll_ids and t.tweet_type in (TweetType.RETWEET,
                                                                        TweetType.QUOTE):
                who = "trolls" if t.author_id in troll_ids else "others"
                inter[f"{t.tweet_type.value}s_by_{who}"] += 1
        return {
            "config": self.cfg.to_dict(),
            "n_tweets": len(tweets),
            "accounts": {
                str(a.user_id): {"label": a.label, "archetype": a.archetype,
                                 "screen_name": a.renamed_to or a.profile.screen_name,
                                 "tweets": per_user.get(a.user_id, 0),
                                 "types": dict(sorted(user_types[a.user_id].items()))}
                for a in accounts
            },
            "type_counts": dict(sorted(per_type.items())),
            "daily_type_counts": {d: dict(sorted(c.items())) for d, c in sorted(daily.items())},
            "hashtag_counts": dict(sorted(tags.items())),
            "media_counts": dict(sorted(media.items())),
            "retweeted_users": {str(k): v for k, v in sorted(rt_users.items())},
            "quoted_users": {str(k): v for k, v in sorted(qt_users.items())},
            "trolls": {
                "planted": sorted(uid for uid in trolls
                                  if uid in {a.user_id for a in accounts}),
                "renamed": sorted(a.user_id for a in accounts if a.renamed_to is not None),
                "listed": len(trolls),
                "interactions": {k: inter.get(k, 0) for k in (
                    "retweets_by_trolls", "retweets_by_others",
                    "quotes_by_trolls", "quotes_by_others")},
            },
            "fdp_tweet_ids": fdp_ids,
        }


def generate(config: SynthConfig) -> SynthCorpus:
    """Build the corpus, labels and bookkeeping for ``config``; deterministic."""
    return _Generator(config).generate()
