import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astroturf.evaluation import roc_and_auc
from astroturf.models import (
    DecisionTree,
    Family,
    ModelError,
    ModelSpec,
    Standardizer,
    load_model,
    predict_score,
    save_model,
    train,
)


def blobs(n=200, d=5, sep=1.5, seed=0):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.normal(size=(n, d)) + sep * y[:, None] * np.linspace(1, 0.2, d)
    return X, y


ALL = [("gb", {"n_estimators": 20}), ("rf", {"n_estimators": 15}), ("ada", {"n_estimators": 20}),
       ("lr", {}), ("knn", {"k": 5}), ("svc", {"epochs": 10})]


def test_separable_toy_set_logistic_regression():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, size=(20, 2))
    X[:10, 0] += 3
    y = np.array(["bot"] * 10 + ["human"] * 10)
    m = train(ModelSpec("lr", {"l2": 1e-4}), X, y)
    assert ((m.score(X) >= 0.5) == (y == "bot")).all()


def test_logistic_regression_matches_reference_solver():
    from sklearn.linear_model import LogisticRegression as Reference

    X, y = blobs(300, 4, sep=1.0)
    l2 = 0.05
    ours = train(ModelSpec("lr", {"l2": l2}), X, y)
    Z = ours.standardizer.transform(X)
    ref = Reference(C=1 / (l2 * len(y)), tol=1e-12, max_iter=10_000).fit(Z, y)
    assert np.allclose(ours.estimator.coef_, ref.coef_[0], atol=1e-6)
    assert ours.estimator.intercept_ == pytest.approx(ref.intercept_[0], abs=1e-6)
    assert ours.estimator.grad_norm_ < 1e-6


def test_knn_matches_reference():
    from sklearn.neighbors import KNeighborsClassifier as Reference

    X, y = blobs(150, 3, sep=0.8, seed=3)
    Q = np.random.default_rng(9).normal(size=(40, 3))
    ours = train(ModelSpec("knn", {"k": 7}), X, y)
    Z = ours.standardizer.transform(X)
    ref = Reference(n_neighbors=7).fit(Z, y)
    assert np.allclose(ours.score(Q), ref.predict_proba(ours.standardizer.transform(Q))[:, 1])


def test_knn_fraction_definition():
    X = np.array([[0.0], [0.1], [0.2], [5.0], [5.1]])
    y = np.array([1, 1, 0, 0, 0])
    m = train(ModelSpec("knn", {"k": 3}), X, y)
    assert predict_score(m, np.array([0.05])) == pytest.approx(2 / 3)


@pytest.mark.parametrize("lr", [0.05, 0.1, 0.2])
@pytest.mark.parametrize("seed", range(3))
def test_boosting_loss_never_increases(lr, seed):
    X, y = blobs(150, 6, sep=0.5, seed=seed)
    y = y.copy()
    y[np.random.default_rng(seed).random(y.size) < 0.15] ^= 1  # label noise
    m = train(ModelSpec("gb", {"n_estimators": 80, "learning_rate": lr, "max_depth": 3}), X, y)
    loss = np.array(m.estimator.train_loss_)
    assert loss.size == 81
    assert (np.diff(loss) <= 0).all()


def test_single_tree_forest_equals_cart():
    X, y = blobs(120, 4, sep=0.7, seed=5)
    spec = ModelSpec("rf", {"n_estimators": 1, "bootstrap": False, "max_features": "all"})
    forest = train(spec, X, y)
    cart = DecisionTree().fit(forest.standardizer.transform(X), y)
    P = np.random.default_rng(6).normal(size=(50, 4)) * 2
    assert np.array_equal(forest.score(P), cart.predict_proba(forest.standardizer.transform(P)))


def test_forest_is_prefix_of_larger_forest():
    X, y = blobs(100, 4, seed=2)
    big = train(ModelSpec("rf", {"n_estimators": 30}, seed=4), X, y)
    small = train(ModelSpec("rf", {"n_estimators": 10}, seed=4), X, y)
    assert np.array_equal(big.truncated(10).score(X), small.score(X))


def test_adaboost_stump_errors_below_half():
    X, y = blobs(200, 5, sep=0.6, seed=8)
    m = train(ModelSpec("ada", {"n_estimators": 50}), X, y)
    errors = m.estimator.errors_
    assert errors and all(e < 0.5 for e in errors)
    assert all(t.n_nodes <= 3 for t in m.estimator.stumps_)


@pytest.mark.parametrize("family,params", ALL)
def test_deterministic_and_bounded(family, params):
    X, y = blobs(120, 4, seed=11)
    a = train(ModelSpec(family, params, seed=3), X, y)
    b = train(ModelSpec(family, params, seed=3), X, y)
    Q = np.random.default_rng(0).normal(size=(60, 4)) * 10
    sa, sb = a.score(Q), b.score(Q)
    assert np.array_equal(sa, sb)
    assert ((sa >= 0) & (sa <= 1)).all()
    # a point deep inside the bot cluster scores as a bot
    deep = X[y == 1].mean(axis=0) + 3 * (X[y == 1].mean(axis=0) - X[y == 0].mean(axis=0))
    assert predict_score(a, deep) > 0.5


@pytest.mark.parametrize("family,params", ALL)
def test_save_load_round_trip(tmp_path, family, params):
    X, y = blobs(80, 3, seed=12)
    m = train(ModelSpec(family, params, seed=1), X, y)
    save_model(m, tmp_path / "m.bin")
    back = load_model(tmp_path / "m.bin")
    assert back.spec == m.spec
    assert np.array_equal(back.score(X), m.score(X))


def test_load_rejects_foreign_file(tmp_path):
    p = tmp_path / "x.bin"
    p.write_text('{"format": "other"}')
    with pytest.raises(ModelError):
        load_model(p)


def test_standardizer_uses_training_rows_only():
    X, y = blobs(100, 3, seed=13)
    a = train(ModelSpec("lr"), X[:60], y[:60])
    X2 = X.copy()
    X2[60:] = 1e6
    b = train(ModelSpec("lr"), X2[:60], y[:60])
    assert np.array_equal(a.score(X), b.score(X))
    s = Standardizer().fit(np.array([[1.0, np.nan], [3.0, 2.0], [5.0, 4.0]]))
    assert np.allclose(s.transform(np.array([[3.0, np.nan]])), [[0.0, 0.0]])


def test_svc_margin_rescaling_keeps_roc():
    X, y = blobs(200, 5, sep=0.6, seed=14)
    m = train(ModelSpec("svc", {"l2": 0.1, "epochs": 20}, seed=2), X, y)
    margin = m.estimator.margin(m.standardizer.transform(X))
    a = roc_and_auc(margin, y)
    b = roc_and_auc(3.7 * margin + 12.0, y)
    c = roc_and_auc(m.score(X), y)
    assert np.array_equal(a.fpr, b.fpr) and np.array_equal(a.tpr, b.tpr)
    assert a.auc == b.auc == c.auc


@pytest.mark.parametrize("family,params", [
    ("gb", {"n_estimators": 0}), ("gb", {"learning_rate": 0}), ("knn", {"k": 4}),
    ("knn", {"k": 0}), ("lr", {"l2": -1}), ("rf", {"max_depth": 0}), ("gb", {"depth": 2}),
    ("svc", {"epochs": 1.5}),
])
def test_bad_hyperparameters(family, params):
    with pytest.raises(ModelError):
        ModelSpec(family, params)


def test_training_preconditions():
    X, y = blobs(10, 2)
    with pytest.raises(ModelError):
        train(ModelSpec("lr"), X, np.ones(10))
    with pytest.raises(ModelError):
        train(ModelSpec("lr"), X[:1], y[:1])
    bad = X.copy()
    bad[0, 0] = np.inf
    with pytest.raises(ModelError):
        train(ModelSpec("lr"), bad, y)
    with pytest.raises(ModelError):
        train(ModelSpec("lr"), X, np.array(["bot", "maybe"] * 5))
    m = train(ModelSpec("lr"), X, y)
    with pytest.raises(ModelError):
        m.score(np.zeros((2, 3)))


def test_family_aliases():
    assert Family.parse("gb") is Family.GRADIENT_BOOSTING
    assert Family.parse("KNeighbors") is Family.KNEIGHBORS
    with pytest.raises(ValueError):
        Family.parse("svm-rbf")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL))
def test_scores_stay_in_unit_interval(seed, fam):
    X, y = blobs(40, 3, sep=0.3, seed=seed)
    m = train(ModelSpec(*fam, seed=seed), X, y)
    Q = np.random.default_rng(seed).normal(size=(20, 3)) * 100
    s = m.score(Q)
    assert ((s >= 0) & (s <= 1)).all()
