"""Generate a small labeled corpus, drop the off-topic party's tweets, and look
at what is left: tweet types per day, top hashtags, and the planted trolls.

    python demos/corpus_walkthrough.py
"""
from astroturf.analytics import top_hashtag_pairs, top_hashtags, tweet_type_timeseries
from astroturf.ingest import CorpusConfig, Store, apply_exclusion, format_timestamp
from astroturf.synth import SynthConfig, generate
from astroturf.trolls import TrollList, match_trolls

corpus = generate(SynthConfig(n_humans=300, n_bots=60, span_days=7, seed=11,
                              n_trolls=12, n_renamed=2, fdp_fraction=0.15))
kept, stats = apply_exclusion(corpus.tweets, CorpusConfig())
print(f"{stats.parsed} tweets generated, {stats.excluded} excluded "
      f"({stats.excluded_fraction:.1%}), {len(kept)} kept")

store = Store.from_tweets(kept)
series = tweet_type_timeseries(store)
assert series.total() == store.n_tweets

print("\ntweets per day by type")
for kind, points in series.series.items():
    row = "  ".join(f"{c:5d}" for _, c in points)
    print(f"  {kind.value:>9}: {row}")
first_day = next(iter(series.series.values()))[0][0]
print(f"  (first bin starts {format_timestamp(first_day)})")

print("\ntop hashtags")
for tag, n in top_hashtags(store, k=5).entries:
    print(f"  #{tag:<20} {n}")
print("top co-occurring pairs")
for pair, n in top_hashtag_pairs(store, k=3).entries:
    print(f"  {pair:<28} {n}")

report = match_trolls(store, TrollList(dict(corpus.trolls)))
inter = report.interaction
print(f"\n{len(report.matched_accounts)} of {report.list_size} listed trolls are in the store, "
      f"{sum(a.renamed for a in report.matched_accounts)} under a new screen name")
print(f"their tweets were retweeted {inter.troll_tweets_retweeted} times "
      f"({inter.retweets_by_others} by non-trolls) and quoted "
      f"{inter.quotes_by_trolls + inter.quotes_by_others} times")
