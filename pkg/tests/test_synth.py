import csv
import json

import numpy as np
import pytest

from astroturf.ingest import CorpusConfig, Store, filter_terms, iter_records
from astroturf.synth import (
    SynthConfig,
    SynthError,
    account_id,
    generate,
    scheduler_times,
)

HOUR = 3600


def test_scheduler_example():
    t = scheduler_times(1_503_619_217, 2 * 86400, 30 * 60)
    assert t.size == 96
    assert len(set((t % 60).tolist())) == 1
    assert set(np.diff(t).tolist()) == {1800}


def test_same_seed_gives_identical_files(tmp_path):
    cfg = SynthConfig(n_humans=30, n_bots=10, span_days=5, seed=11, n_trolls=4, n_renamed=1,
                      fdp_fraction=0.2)
    a = generate(cfg).write(tmp_path / "a")
    b = generate(cfg).write(tmp_path / "b")
    assert [p.name for p in a] == [p.name for p in b]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    other = generate(SynthConfig(n_humans=30, n_bots=10, span_days=5, seed=12)).write(
        tmp_path / "c")
    assert other[0].read_bytes() != a[0].read_bytes()


def test_labels_cover_every_account(small_corpus, small_store):
    accounts = {int(u) for u in small_corpus.truth["accounts"]}
    assert set(small_corpus.labels) == accounts
    assert set(small_store.timelines) <= accounts
    assert set(small_corpus.labels.values()) == {"bot", "human"}
    assert sum(v == "bot" for v in small_corpus.labels.values()) == 20


def test_bookkeeping_counts(small_corpus, small_store):
    truth = small_corpus.truth
    assert truth["n_tweets"] == small_store.n_tweets == len(small_corpus.tweets)
    for uid, acc in truth["accounts"].items():
        tl = small_store.timelines.get(int(uid))
        assert acc["tweets"] == (len(tl.tweets) if tl else 0)
        if tl:
            kinds = {}
            for t in tl.tweets:
                kinds[t.tweet_type.value] = kinds.get(t.tweet_type.value, 0) + 1
            assert acc["types"] == kinds
            assert tl.profile.screen_name == acc["screen_name"]


def test_written_corpus_round_trips_through_ingest(tmp_path, small_corpus):
    paths = small_corpus.write(tmp_path)
    tweets = list(iter_records([paths[0]]))
    assert tweets == small_corpus.tweets
    assert len(list(filter_terms(tweets, CorpusConfig()))) == len(tweets)
    with open(paths[1], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert {int(r["user_id"]): r["label"] for r in rows} == small_corpus.labels
    assert json.loads(paths[2].read_text())["n_tweets"] == len(tweets)


def max_gap_in_windows(stamps, window=48 * HOUR):
    """Smallest, over all full windows starting at a tweet, of the largest
    tweet-free stretch inside that window."""
    ts = sorted(stamps)
    worst = None
    for i, start in enumerate(ts):
        end = start + window
        if end > ts[-1]:
            break
        inside = [start] + [t for t in ts[i:] if t <= end] + [end]
        gap = max(b - a for a, b in zip(inside, inside[1:]))
        worst = gap if worst is None else min(worst, gap)
    return worst


def test_humans_sleep_and_schedulers_do_not():
    corpus = generate(SynthConfig(n_humans=40, n_bots=40, span_days=6, seed=21,
                                  bot_weights={"scheduler": 1.0}))
    store = Store.from_tweets(corpus.tweets)
    checked = {"human": 0, "scheduler": 0}
    for uid, acc in corpus.truth["accounts"].items():
        tl = store.timelines.get(int(uid))
        if tl is None or len(tl.tweets) < 2:
            continue
        stamps = [t.created_at for t in tl.tweets]
        if acc["label"] == "human":
            gap = max_gap_in_windows(stamps)
            if gap is not None:
                assert gap >= 6 * HOUR, uid
                checked["human"] += 1
        else:
            assert acc["archetype"] == "scheduler"
            assert max(np.diff(sorted(stamps))) < 6 * HOUR
            assert len({s % 60 for s in stamps}) == 1
            checked["scheduler"] += 1
    assert checked["human"] >= 30 and checked["scheduler"] == 40


def test_planted_trolls_and_exclusion_share():
    corpus = generate(SynthConfig(n_humans=40, n_bots=10, span_days=4, seed=2,
                                  troll_plant=[account_id(i) for i in (0, 3, 7)], n_renamed=2, troll_absent=2,
                                  fdp_fraction=0.25))
    trolls = corpus.truth["trolls"]
    assert len(trolls["planted"]) == 3 and len(trolls["renamed"]) == 2
    assert trolls["listed"] == 5
    fdp = set(corpus.truth["fdp_tweet_ids"])
    assert len(fdp) * 4 == len(corpus.tweets)
    assert all(("fdp" in t.text.split()) == (t.tweet_id in fdp) for t in corpus.tweets)


def test_zero_accounts_give_empty_outputs(tmp_path):
    corpus = generate(SynthConfig(n_humans=0, n_bots=0))
    assert corpus.tweets == [] and corpus.labels == {}
    paths = corpus.write(tmp_path)
    assert paths[0].read_text() == ""


@pytest.mark.parametrize("kw", [
    {"n_humans": -1},
    {"bot_weights": {"scheduler": 0.5, "repeater": 0.2}},
    {"bot_weights": {"spammer": 1.0}},
    {"human_gap_hours": (5, 8)},
    {"human_gap_hours": (9, 6)},
    {"scheduler_interval_minutes": (30, 400)},
    {"n_trolls": 2, "n_renamed": 3},
    {"fdp_fraction": 1.0},
    {"span_days": 0},
])
def test_config_validation(kw):
    with pytest.raises(SynthError):
        SynthConfig(**kw)


def test_config_from_mapping():
    cfg = SynthConfig.from_dict({"n_humans": 5, "bots": {"scheduler": 0.5, "amplifier": 0.5},
                                 "human_gap_hours": [6, 7]})
    assert cfg.bot_weights == {"scheduler": 0.5, "amplifier": 0.5}
    assert cfg.human_gap_hours == (6.0, 7.0)
    assert SynthConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(SynthError):
        SynthConfig.from_dict({"n_humanz": 5})
