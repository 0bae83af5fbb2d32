import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from astroturf.evaluation import (
    CVResult,
    EvalReport,
    EvaluationError,
    Extrapolation,
    MetricError,
    auc,
    bounded_auc,
    cross_validate,
    evaluate_external,
    evaluate_specs,
    expand_grid,
    extrapolate,
    f1_score,
    fold_assignments,
    grid_search,
    predict_labels,
    roc_and_auc,
    roc_curve,
    select_best,
)
from astroturf.features import extract_store
from astroturf.models import ModelSpec, train

# -- metrics ------------------------------------------------------------------------


def test_roc_examples():
    r = roc_and_auc([0.9, 0.8, 0.2, 0.1], ["bot", "bot", "human", "human"])
    assert r.auc == 1.0 and r.bounded_auc == 1.0
    assert auc([0.3] * 6, [1, 0, 1, 0, 0, 1]) == 0.5


def test_ties_move_as_one_step():
    fpr, tpr, thr = roc_curve([0.5, 0.5, 0.5, 0.1], [1, 0, 1, 0])
    assert fpr.tolist() == [0.0, 0.5, 1.0]
    assert tpr.tolist() == [0.0, 1.0, 1.0]
    assert thr[0] == np.inf and thr[1:].tolist() == [0.5, 0.1]


def test_single_class_rejected():
    with pytest.raises(MetricError):
        roc_and_auc([0.1, 0.2], [1, 1])
    with pytest.raises(MetricError):
        roc_and_auc([0.1], [1, 0])


score_sets = st.integers(2, 60).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.5, 0.9, 1.0]) | st.floats(0, 1),
             min_size=n, max_size=n),
    st.lists(st.booleans(), min_size=n, max_size=n),
)).filter(lambda sl: 0 < sum(sl[1]) < len(sl[1]))


@settings(max_examples=300, deadline=None)
@given(score_sets)
def test_trapezoid_auc_equals_rank_statistic(sl):
    scores, labels = sl
    assert auc(scores, labels) == pytest.approx(oracles.mann_whitney_auc(scores, labels),
                                                abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(score_sets)
def test_bounded_auc_matches_reference(sl):
    from sklearn.metrics import roc_auc_score

    scores, labels = sl
    r = roc_and_auc(scores, labels)
    assert 0.0 <= r.bounded_auc <= 1.0
    assert r.bounded_auc == pytest.approx(roc_auc_score(labels, scores, max_fpr=0.1), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(score_sets)
def test_strictly_monotone_transforms_keep_roc(sl):
    scores, labels = sl
    a = roc_and_auc(scores, labels)
    # rank mapping is exactly order-preserving even for subnormal inputs
    distinct = np.unique(scores)
    b = roc_and_auc(np.searchsorted(distinct, scores) * 3.5 - 10.0, labels)
    assert np.array_equal(a.fpr, b.fpr) and np.array_equal(a.tpr, b.tpr)
    assert a.auc == b.auc and a.bounded_auc == b.bounded_auc


@settings(max_examples=200, deadline=None)
@given(score_sets)
def test_bounded_auc_is_one_only_without_early_false_positives(sl):
    scores, labels = sl
    r = roc_and_auc(scores, labels)
    # perfect iff every positive is ranked before the first negative
    clean = bool(np.any((r.fpr == 0) & (r.tpr == 1)))
    assert (r.bounded_auc == pytest.approx(1.0, abs=1e-12)) == clean


def test_bounded_auc_perfect_and_chance():
    assert bounded_auc(np.array([0, 0, 1.0]), np.array([0, 1.0, 1])) == 1.0
    assert bounded_auc(np.array([0, 1.0]), np.array([0, 1.0])) == pytest.approx(0.5)


def test_f1_conventions():
    assert f1_score([True, False], [True, False]) == 1.0
    assert f1_score([False, False], [True, False]) == 0.0
    assert f1_score(predict_labels([0.5, 0.49]), ["bot", "bot"]) == pytest.approx(2 / 3)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_f1_matches_confusion_formula(pairs):
    pred, labels = zip(*pairs)
    assert f1_score(pred, labels) == oracles.f1_from_counts(pred, labels)


# -- folds -----------------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.integers(0, 200), st.integers(0, 2**32 - 1))
def test_folds_partition_and_stratify(k, extra, seed):
    rng = np.random.default_rng(seed)
    n_pos = k + rng.integers(0, 30)
    y = np.array([1] * n_pos + [0] * (k + extra))
    rng.shuffle(y)
    folds = fold_assignments(y, k, 3, seed)
    for row in folds:
        assert set(row.tolist()) <= set(range(k))
        sizes = np.bincount(row, minlength=k)
        assert sizes.sum() == y.size and sizes.max() - sizes.min() <= 1
        for c in (0, 1):
            per = np.bincount(row[y == c], minlength=k)
            expected = (y == c).sum() / k
            assert (np.abs(per - expected) < 1).all()


def test_repeats_use_fresh_shuffles():
    y = np.arange(100) % 2
    f = fold_assignments(y, 10, 3, 0)
    assert not np.array_equal(f[0], f[1])
    assert np.array_equal(f, fold_assignments(y, 10, 3, 0))


# -- cross-validation ---------------------------------------------------------------------

def data(n=120, sep=1.0, seed=0):
    rng = np.random.default_rng(seed)
    y = (np.arange(n) % 3 == 0).astype(int)
    X = rng.normal(size=(n, 4)) + sep * y[:, None]
    return X, y


def test_cross_validate_is_deterministic():
    X, y = data()
    spec = ModelSpec("gb", {"n_estimators": 20})
    a = cross_validate(spec, X, y, k=5, repeats=3, seed=9)
    b = cross_validate(spec, X, y, k=5, repeats=3, seed=9)
    for m in ("f1", "auc", "bounded_auc", "oof_scores"):
        assert np.array_equal(getattr(a, m), getattr(b, m))
    assert a.auc.shape == (3, 5)


def test_separable_data_scores_perfectly():
    X, y = data(sep=20.0)
    r = cross_validate(ModelSpec("lr"), X, y, k=5, repeats=2, seed=1)
    assert r.mean("auc") == 1.0 and r.mean("f1") == 1.0 and r.mean("bounded_auc") == 1.0


def test_shuffled_labels_give_chance_auc():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(200, 6))
    y = rng.permutation(np.arange(200) % 2)
    r = cross_validate(ModelSpec("gb", {"n_estimators": 50}), X, y, k=10, repeats=20, seed=2)
    assert abs(r.mean("auc") - 0.5) <= 0.05


def test_threads_do_not_change_results():
    X, y = data()
    specs = expand_grid("rf", {"n_estimators": [5, 10], "max_depth": [None, 3]})
    one = evaluate_specs(specs, X, y, k=4, repeats=2, seed=5, n_jobs=1)
    three = evaluate_specs(specs, X, y, k=4, repeats=2, seed=5, n_jobs=3)
    for a, b in zip(one, three):
        assert np.array_equal(a.oof_scores, b.oof_scores) and np.array_equal(a.auc, b.auc)


def test_staged_grid_equals_separate_runs():
    X, y = data(sep=0.6)
    specs = expand_grid("gb", {"n_estimators": [10, 30], "max_depth": [2]})
    staged = evaluate_specs(specs, X, y, k=4, repeats=2, seed=3)
    for spec, res in zip(specs, staged):
        alone = cross_validate(spec, X, y, k=4, repeats=2, seed=3)
        assert np.allclose(alone.oof_scores, res.oof_scores, rtol=0, atol=1e-12)
        assert np.allclose(alone.auc, res.auc, rtol=0, atol=1e-12)


def test_fold_count_limits():
    X, y = data(30)
    with pytest.raises(EvaluationError):
        cross_validate(ModelSpec("lr"), X, y, k=11, repeats=1)
    with pytest.raises(EvaluationError):
        cross_validate(ModelSpec("lr"), X, np.zeros(30), k=2, repeats=1)


# -- grid search -----------------------------------------------------------------------------

def fake(spec, aucs):
    a = np.asarray(aucs, dtype=float).reshape(1, -1)
    return CVResult(spec, a, a, a, np.zeros((1, 2)), np.array([0, 1]))


def test_grid_of_one_point():
    X, y = data()
    g = grid_search("knn", {"k": [7]}, X, y, k=3, repeats=1)
    assert g.best.hyperparameters["k"] == 7


def test_dominant_point_wins():
    weak, strong = ModelSpec("lr", {"l2": 1.0}), ModelSpec("lr", {"l2": 0.1})
    assert select_best([fake(weak, [0.7, 0.8]), fake(strong, [0.75, 0.85])]).spec == strong


def test_ties_prefer_simpler_then_order():
    small, big = ModelSpec("gb", {"n_estimators": 100}), ModelSpec("gb", {"n_estimators": 300})
    assert select_best([fake(big, [0.9]), fake(small, [0.9])]).spec == small
    strong, weak = ModelSpec("lr", {"l2": 1.0}), ModelSpec("lr", {"l2": 0.01})
    assert select_best([fake(weak, [0.9]), fake(strong, [0.9])]).spec == strong
    a, b = ModelSpec("gb", {"max_depth": 2}), ModelSpec("gb", {"max_depth": 3})
    assert select_best([fake(b, [0.9]), fake(a, [0.9])]).spec == b


def test_grid_choice_matches_exhaustive_recomputation(small_store, small_corpus):
    table = extract_store(small_store, 5)
    y = np.array([small_corpus.labels[u] for u in table.user_ids])
    grid = {"n_estimators": [10, 30], "max_depth": [2, 3]}
    g = grid_search("gb", grid, table.X, y, k=5, repeats=2, seed=4)
    specs = expand_grid("gb", grid)
    means = [cross_validate(s, table.X, y, 5, 2, 4).mean("auc") for s in specs]
    top = [s for s, m in zip(specs, means) if m == max(means)]
    assert g.best_result.mean("auc") == max(means)
    assert g.best.hyperparameters == min(
        top, key=lambda s: s.hyperparameters["n_estimators"]).hyperparameters


def test_expand_grid_order_and_validation():
    specs = expand_grid("gb", {"max_depth": [2, 3], "learning_rate": [0.05, 0.1]})
    assert [(s.hyperparameters["max_depth"], s.hyperparameters["learning_rate"])
            for s in specs] == [(2, 0.05), (2, 0.1), (3, 0.05), (3, 0.1)]
    assert len(expand_grid("gb", {})) == 1  # the family defaults
    X, y = data()
    with pytest.raises(EvaluationError):
        grid_search("gb", {}, X, y, k=3, repeats=1)
    with pytest.raises(EvaluationError):
        grid_search("gb", {"max_depth": []}, X, y, k=3, repeats=1)


# -- extrapolation ------------------------------------------------------------------------------

def test_merge_arithmetic_full_scale_counts():
    ex = Extrapolation({}, predicted_bots=2414, predicted_humans=20157,
                       labeled_bots=505, labeled_humans=873)
    assert (ex.humans, ex.bots) == (21030, 2919)
    assert round(100 * ex.humans / ex.total, 2) == 87.81
    assert round(100 * ex.bot_fraction, 2) == 12.19


def test_extrapolation_on_store(small_store, small_corpus):
    table = extract_store(small_store)
    y = np.array([small_corpus.labels[u] for u in table.user_ids])
    model = train(ModelSpec("lr"), table.X, y)
    labeled = {u: small_corpus.labels[u] for u in table.user_ids[:10]}
    ex = extrapolate(model, small_store, min_tweets=20, labeled=labeled)
    active = [u for u, tl in small_store.timelines.items() if len(tl.tweets) >= 20]
    assert set(ex.scores) == set(active) - set(labeled)
    assert ex.total == len(active)
    assert ex.labeled_bots + ex.labeled_humans == len(set(labeled) & set(active))
    assert extrapolate(model, small_store, min_tweets=10**6).total == 0


# -- reports ------------------------------------------------------------------------------------

def test_external_scores_report(tmp_path):
    labels = {1: "bot", 2: "human", 3: "bot", 4: "human", 5: "human"}
    scores = {1: 0.9, 2: 0.2, 3: 0.4, 4: 0.6, 99: 0.5}
    rep = evaluate_external(scores, labels)
    assert (rep.n_scored, rep.n_missing) == (4, 1)
    assert rep.roc.auc == 0.75 and rep.f1 == 0.5
    rep.write(tmp_path)
    assert {p.name for p in tmp_path.iterdir()} >= {"metrics.csv", "roc.csv", "roc.svg",
                                                    "roc_bounded.svg"}


def test_eval_report_files(tmp_path):
    X, y = data()
    results = evaluate_specs(expand_grid("lr", {"l2": [0.1, 1.0]}), X, y, k=4, repeats=2)
    best = select_best(results)
    EvalReport(results, best).write(tmp_path)
    with open(tmp_path / "metrics.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["best"]) for r in rows].count(1) == 1
    assert all(0 <= float(r["auc_mean"]) <= 1 for r in rows)
    with open(tmp_path / "cells.csv", newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 8
    svg = (tmp_path / "roc.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg
