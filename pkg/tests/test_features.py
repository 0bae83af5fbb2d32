import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2

from astroturf.features import (
    COLUMN_NAMES,
    FEATURE_NAMES,
    CorpusStats,
    EmptyTimelineError,
    FeatureTable,
    chi_square_seconds,
    extract_features,
    extract_store,
    features_by_name,
    hamming,
    longest_breaks,
    similar_counts,
    simhash64,
    simhash_many,
    suggest_labels,
    zip_ratio,
)
from astroturf.features.extract import BOOLEAN_FEATURES, INTEGER_FEATURES
from astroturf.ingest import Store, Tweet, TweetType, UserProfile, UserTimeline

import oracles

HOUR = 3600


def assert_matches_oracle(timelines):
    ci = oracles.corpus_inputs(timelines)
    table = extract_store(Store(timelines))
    assert table.user_ids == sorted(timelines)
    for uid, row in zip(table.user_ids, table.X):
        got = features_by_name(row)
        want = oracles.naive_features(timelines[uid], ci)
        for name in FEATURE_NAMES:
            g = np.asarray(got[name])
            w = np.asarray(want[name], dtype=np.float64)
            if name in INTEGER_FEATURES:
                assert np.array_equal(g, w), (uid, name, g, w)
            else:
                np.testing.assert_allclose(g, w, rtol=0, atol=1e-9, err_msg=f"{uid} {name}")
    return table


@pytest.mark.parametrize("seed", range(5))
def test_features_match_naive_oracle(seed):
    table = assert_matches_oracle(oracles.random_corpus(seed))
    f = [features_by_name(r) for r in table.X]
    # the random corpora must exercise the interesting branches
    assert max(x["longest_conversation"] for x in f) >= 3
    assert any(x["duplicate_simhash_ratio"] > 0 for x in f)
    assert any(x["median_retweet"] > 0 for x in f)


def test_feature_layout():
    assert len(FEATURE_NAMES) == 44
    assert len(COLUMN_NAMES) == 59


def one_tweet_timeline(text="hello", urls=("https://example.org/a",)):
    p = UserProfile(1, "anna")
    t = Tweet(1, 1, "anna", 1_500_000_000, text, urls=list(urls), client_source="TweetDeck")
    return UserTimeline(p, [t])


def test_single_tweet_with_url():
    tl = one_tweet_timeline()
    f = features_by_name(extract_features(tl, tl.profile, CorpusStats.from_store({1: tl})))
    assert f["url_ratio"] == 1.0
    assert f["total_tweets"] == 1
    assert f["retweet_ratio"] == 0.0
    assert f["avg_longest_break"] == f["avg_second_longest_break"] == 48.0


def test_identical_texts_count_as_duplicates():
    p = UserProfile(1, "anna")
    tl = UserTimeline(p, [Tweet(i, 1, "anna", 1_500_000_000 + i * 60, "wahl heute wahl")
                          for i in range(2)])
    f = features_by_name(extract_features(tl, p, CorpusStats.from_store({1: tl})))
    assert f["avg_duplicate_simhash"] == 2.0
    assert f["duplicate_simhash_ratio"] == 1.0
    assert f["vocabulary_diversity"] < 1


def test_empty_timeline_rejected():
    tl = UserTimeline(UserProfile(1, "a"), [])
    with pytest.raises(EmptyTimelineError):
        extract_features(tl, tl.profile, CorpusStats.from_store({}))


def test_invariants_on_synthetic_corpus(small_store):
    table = extract_store(small_store)
    assert np.isfinite(table.X).all()
    for row in table.X:
        f = features_by_name(row)
        ratios = [k for k in FEATURE_NAMES if k.endswith("_ratio") and k != "zip_ratio"]
        assert all(0.0 <= f[k] <= 1.0 for k in ratios)
        assert math.isclose(f["orig_ratio"] + f["retweet_ratio"] + f["quote_ratio"]
                            + f["reply_ratio"], 1.0, abs_tol=1e-9)
        assert f["total_tweets"] >= 1 and f["avg_tweets_per_day"] > 0
        assert 0 < f["vocabulary_diversity"] <= 1 and f["zip_ratio"] > 0
        assert all(f[k] in (0.0, 1.0) for k in BOOLEAN_FEATURES)
        assert f["unique_url_ratio"] <= f["url_ratio"]
        assert f["unique_mentions_ratio"] <= f["mentions_ratio"]
        assert f["unique_hashtags_ratio"] <= f["hashtags_ratio"]
        assert f["unique_users_retweet_ratio"] <= f["retweet_ratio"]
        assert f["unique_users_quotes_ratio"] <= f["quote_ratio"]
        assert f["unique_users_reply_ratio"] <= f["reply_ratio"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_arrival_order_does_not_matter(seed, rnd):
    timelines = oracles.random_corpus(seed, n_users=6, max_tweets=25)
    stats = CorpusStats.from_store(timelines)
    for tl in timelines.values():
        shuffled = UserTimeline(tl.profile, rnd.sample(tl.tweets, len(tl.tweets)))
        a = extract_features(tl, tl.profile, stats)
        b = extract_features(shuffled, tl.profile, stats)
        assert np.array_equal(a, b)


def test_feature_table_csv_round_trip(tmp_path, small_store):
    table = extract_store(small_store, min_tweets=5)
    table.write_csv(tmp_path / "f.csv")
    back = FeatureTable.read_csv(tmp_path / "f.csv")
    assert back.user_ids == table.user_ids and back.screen_names == table.screen_names
    assert np.array_equal(back.X, table.X)


def test_min_tweets_filter(small_store):
    table = extract_store(small_store, min_tweets=10**6)
    assert len(table) == 0 and table.X.shape == (0, len(COLUMN_NAMES))


# -- simhash -------------------------------------------------------------------

def test_simhash_conventions():
    assert simhash64("") == 0
    assert simhash64("Wahl, heute!") == simhash64("wahl heute")
    assert hamming(simhash64("a b c"), simhash64("a b c")) == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.from_regex(r"[a-z0-9]{1,6}", fullmatch=True), max_size=30))
def test_simhash_matches_oracle(words):
    text = " ".join(words)
    assert simhash64(text) == oracles.simhash(oracles.tokens(text))


def test_one_token_change_flips_few_bits():
    # worst case over these 1000 draws is 10 bits
    rng = random.Random(0)
    vocab = [f"w{i}" for i in range(5000)]
    worst = 0
    for _ in range(1000):
        words = rng.sample(vocab, 50)
        other = list(words)
        other[rng.randrange(50)] = rng.choice(vocab)
        worst = max(worst, hamming(simhash64(" ".join(words)), simhash64(" ".join(other))))
    assert worst <= 12


def test_similar_counts_matches_pairwise_loop():
    rng = np.random.default_rng(4)
    base = rng.integers(0, 2**63, size=40, dtype=np.uint64)
    flips = np.uint64(1) << rng.integers(0, 64, size=40).astype(np.uint64)
    fps = np.concatenate([base, base ^ flips])
    got = similar_counts(fps, 3, chunk=7)
    want = [sum(1 for j in range(fps.size) if j != i and hamming(fps[i], fps[j]) <= 3)
            for i in range(fps.size)]
    assert got.tolist() == want
    assert np.array_equal(simhash_many(["a", "b"]), [simhash64("a"), simhash64("b")])


# -- timing ----------------------------------------------------------------------

def test_chi_square_closed_forms():
    assert chi_square_seconds([0] * 600) == pytest.approx(35_400.0, abs=1e-9)
    assert chi_square_seconds([s for s in range(60) for _ in range(10)]) == 0.0
    assert chi_square_seconds([]) == 0.0


def test_chi_square_uniform_seconds_rarely_reject():
    limit = chi2.ppf(0.99, 59)
    below = sum(
        chi_square_seconds(np.random.default_rng(seed).integers(0, 10**6, 6000)) < limit
        for seed in range(100)
    )
    assert below >= 95


def test_longest_breaks_examples():
    assert longest_breaks([0]) == (48.0, 48.0)
    assert longest_breaks([i * 6 * HOUR for i in range(40)])[0] == 6.0
    assert longest_breaks([5, 5, 5]) == (48.0, 48.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 10 * 86400), min_size=1, max_size=60))
def test_longest_breaks_match_oracle(stamps):
    got = longest_breaks(stamps)
    want = oracles.breaks(stamps)
    assert got == pytest.approx(want, abs=1e-9)
    assert got[1] <= got[0]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 10**9), max_size=200))
def test_chi_square_matches_oracle(stamps):
    if stamps:
        assert chi_square_seconds(stamps) == pytest.approx(oracles.chi_square(stamps), abs=1e-9)


# -- compression -------------------------------------------------------------------

def test_zip_ratio_goldens():
    line = "".join(chr(97 + i % 26) for i in range(100))
    assert zip_ratio([line] * 100) == pytest.approx(0.008317655213387464, abs=1e-15)
    assert zip_ratio([random.Random(1).randbytes(500).hex()]) == pytest.approx(0.553, abs=1e-15)
    assert zip_ratio(["a"]) > 1


# -- label suggestions ---------------------------------------------------------------

def suggest(tweets, client="Twitter for iPhone", stats_from=None):
    p = UserProfile(1, "acct")
    tl = UserTimeline(p, [Tweet(i, 1, "acct", ts, text, urls=urls, hashtags=tags,
                                client_source=client)
                          for i, (ts, text, urls, tags) in enumerate(tweets)])
    stats = CorpusStats.from_store(stats_from or {1: tl})
    return suggest_labels(extract_features(tl, p, stats), tl, stats)


def test_scheduled_duplicates_are_bots():
    tweets = [(1_500_000_000 + i * 1800, "jetzt wählen afd", [], []) for i in range(300)]
    s = suggest(tweets, client="dlvr.it")
    assert s.verdict == "bot" and s.fired_rules == ["R1", "R2"]


def test_sleeping_varied_account_is_human():
    rng = random.Random(2)
    day = 86400
    tweets = []
    for d in range(10):
        for k in range(5):
            words = " ".join(rng.choice(oracles.WORDS) + str(rng.randrange(10**6))
                             for _ in range(8))
            tweets.append((1_500_000_000 + d * day + 8 * HOUR + k * 2 * HOUR, words, [], []))
    s = suggest(tweets)
    assert s.verdict == "human" and s.fired_rules == ["H1"]


def test_trending_hashtags_with_url():
    day0 = 1_500_076_800  # midnight UTC
    tweets = [(day0 + i * 3 * HOUR, f"text {i} {i * 7}", ["https://x.org"], ["a", "b"])
              for i in range(4)]
    s = suggest(tweets)
    assert "R3" in s.fired_rules


def test_conflicting_rules_are_undecided():
    day0 = 1_500_076_800
    rng = random.Random(5)
    tweets = []
    for d in range(6):
        for k in range(4):
            words = " ".join(f"w{rng.randrange(10**6)}" for _ in range(8))
            tweets.append((day0 + d * 86400 + (9 + 3 * k) * HOUR, words,
                           ["https://x.org/" + str(d * 4 + k)], ["wahl", "btw17"]))
    s = suggest(tweets)
    assert s.fired_rules == ["R3", "H1"]
    assert s.verdict == "undecided"


def test_no_signal_is_undecided():
    s = suggest([(1_500_000_000 + i * 3 * HOUR, f"t{i}", [], []) for i in range(10)],
                client="dlvr.it")
    assert s.fired_rules == [] and s.verdict == "undecided"
