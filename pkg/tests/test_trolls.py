import pytest

from astroturf.ingest import Store, Tweet, TweetType, UserProfile
from astroturf.trolls import TrollList, TrollListError, load_troll_list, match_trolls


def roster(corpus):
    tl = TrollList()
    for uid, names in corpus.trolls.items():
        tl.entries[uid] = list(names)
    return tl


def test_matches_planted_trolls(small_corpus, small_store):
    truth = small_corpus.truth["trolls"]
    report = match_trolls(small_store, roster(small_corpus))
    assert sorted(report.matched_ids) == truth["planted"]
    assert sorted(a.user_id for a in report.matched_accounts if a.renamed) == truth["renamed"]
    assert report.list_size == truth["listed"]
    assert report.unmatched == truth["listed"] - len(truth["planted"])
    inter = report.interaction
    assert {"retweets_by_trolls": inter.retweets_by_trolls,
            "retweets_by_others": inter.retweets_by_others,
            "quotes_by_trolls": inter.quotes_by_trolls,
            "quotes_by_others": inter.quotes_by_others} == truth["interactions"]
    assert sum(report.activity_series.values()) == report.tweets_total


def test_match_is_by_id_not_name():
    p = UserProfile(1, "new_name", account_created_at=1_400_000_000)
    store = Store.from_tweets([
        Tweet(10, 1, "new_name", 1_500_000_000, "x", profile=p),
        Tweet(11, 2, "old_name", 1_500_000_100, "RT", tweet_type=TweetType.RETWEET,
              referenced_tweet_id=10, referenced_author_id=1),
    ])
    report = match_trolls(store, TrollList({1: ["old_name"], 3: ["old_name"]}))
    [acc] = report.matched_accounts
    assert acc.user_id == 1 and acc.renamed
    assert report.unmatched == 1
    assert report.creation_histogram == {"2014-05": 1}
    assert report.interaction.retweets_by_others == 1


def test_roster_aliases_and_merging(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("userid,Handle,extra\n5,a,\n5,b,\n,c,\n6,d,\n", encoding="utf-8")
    tl = load_troll_list(p)
    assert tl.entries == {5: ["a", "b"], 6: ["d"]}


def test_roster_without_id_column(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("name,screen_name\nx,y\n", encoding="utf-8")
    with pytest.raises(TrollListError):
        load_troll_list(p)
