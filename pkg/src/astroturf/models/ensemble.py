"""Tree ensembles: gradient boosting, random forest, and SAMME AdaBoost."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import expit

from .tree import Binner, Tree, build_tree


def log_loss(y: np.ndarray, margin: np.ndarray) -> np.ndarray:
    """Per-sample logistic loss for labels in {0, 1} and raw margins."""
    return np.logaddexp(0.0, margin) - y * margin


class GradientBoosting:
    """Logistic-loss gradient boosting with depth-limited regression trees.

    Each round fits a tree to the residuals ``y - p`` and sets every leaf to a
    shrunken Newton step. If a leaf's step would raise that leaf's loss it is
    halved until it does not, so the training loss never increases.
    """

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3,
                 min_samples_leaf=1, max_bins=255):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_bins = max_bins

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        n = y.size
        binner = Binner(self.max_bins).fit(X)
        Xb = binner.transform(X)
        XbT = np.ascontiguousarray(Xb.T)
        prior = np.clip(y.mean(), 1e-12, 1 - 1e-12)
        self.init_ = float(math.log(prior / (1 - prior)))
        F = np.full(n, self.init_)
        loss = log_loss(y, F)
        self.trees_: list[Tree] = []
        self.train_loss_ = [float(loss.mean())]
        for _ in range(self.n_estimators):
            p = expit(F)
            resid = y - p
            tree, leaf = build_tree(Xb, binner, resid, criterion="mse",
                                    max_depth=self.max_depth,
                                    min_samples_leaf=self.min_samples_leaf, XbT=XbT)
            m = tree.n_nodes
            g = np.bincount(leaf, weights=resid, minlength=m)
            h = np.bincount(leaf, weights=p * (1 - p), minlength=m)
            step = self.learning_rate * np.divide(g, h, out=np.zeros(m), where=h > 1e-12)
            base = np.bincount(leaf, weights=loss, minlength=m)
            for _ in range(60):
                F_new = F + step[leaf]
                new_loss = log_loss(y, F_new)
                worse = np.bincount(leaf, weights=new_loss, minlength=m) > base
                if not worse.any():
                    break
                step[worse] *= 0.5
            else:
                step[worse] = 0.0
                F_new = F + step[leaf]
                new_loss = log_loss(y, F_new)
            tree.value = step
            F, loss = F_new, new_loss
            self.trees_.append(tree)
            self.train_loss_.append(float(loss.mean()))
        return self

    def staged_margin(self, X):
        """Margins after each boosting round, shape (n_estimators, n)."""
        F = np.full(X.shape[0], self.init_)
        out = np.empty((len(self.trees_), X.shape[0]))
        for i, tree in enumerate(self.trees_):
            F = F + tree.predict(X)
            out[i] = F
        return out

    def margin(self, X, n_trees: int | None = None):
        F = np.full(X.shape[0], self.init_)
        for tree in self.trees_[:n_trees]:
            F = F + tree.predict(X)
        return F

    def score(self, X):
        return expit(self.margin(X))

    def truncated(self, n_trees: int) -> "GradientBoosting":
        """The model after ``n_trees`` rounds; equal to fitting that many."""
        out = GradientBoosting(n_trees, self.learning_rate, self.max_depth,
                               self.min_samples_leaf, self.max_bins)
        out.init_ = self.init_
        out.trees_ = self.trees_[:n_trees]
        out.train_loss_ = self.train_loss_[:n_trees + 1]
        return out

    def to_dict(self):
        return {"init": self.init_, "trees": [t.to_dict() for t in self.trees_],
                "train_loss": self.train_loss_}

    def load_dict(self, d):
        self.init_ = d["init"]
        self.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        self.train_loss_ = d.get("train_loss", [])
        return self


class RandomForest:
    """Bagged Gini trees with per-node feature subsampling.

    Bootstrap draws become integer sample weights, which is equivalent to
    growing on the resampled rows. Each tree's randomness comes from its own
    child seed, so a forest is a prefix of any larger forest with the same
    seed.
    """

    def __init__(self, n_estimators=100, max_depth=None, max_features="sqrt",
                 bootstrap=True, min_samples_leaf=1, max_bins=255, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.min_samples_leaf = min_samples_leaf
        self.max_bins = max_bins
        self.seed = seed

    def _n_features(self, d):
        mf = self.max_features
        if mf in (None, "all"):
            return d
        if mf == "sqrt":
            return max(1, int(math.sqrt(d)))
        if isinstance(mf, float):
            return max(1, int(mf * d))
        return min(int(mf), d)

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        binner = Binner(self.max_bins).fit(X)
        Xb = binner.transform(X)
        k = self._n_features(d)
        self.trees_ = []
        for i in range(self.n_estimators):
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(i,)))
            if self.bootstrap:
                counts = np.bincount(rng.integers(0, n, n), minlength=n)
                rows = np.flatnonzero(counts)
                tree, _ = build_tree(Xb[rows], binner, y[rows], counts[rows].astype(np.float64),
                                     criterion="gini", max_depth=self.max_depth,
                                     min_samples_leaf=self.min_samples_leaf,
                                     max_features=k, rng=rng)
            else:
                tree, _ = build_tree(Xb, binner, y, criterion="gini", max_depth=self.max_depth,
                                     min_samples_leaf=self.min_samples_leaf,
                                     max_features=k, rng=rng)
            self.trees_.append(tree)
        return self

    def score(self, X, n_trees: int | None = None):
        trees = self.trees_[:n_trees]
        return sum(t.predict(X) for t in trees) / len(trees)

    def truncated(self, n_trees: int) -> "RandomForest":
        out = RandomForest(n_trees, self.max_depth, self.max_features, self.bootstrap,
                           self.min_samples_leaf, self.max_bins, self.seed)
        out.trees_ = self.trees_[:n_trees]
        return out

    def to_dict(self):
        return {"trees": [t.to_dict() for t in self.trees_]}

    def load_dict(self, d):
        self.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        return self


class AdaBoost:
    """Two-class SAMME with depth-1 stumps.

    Boosting halts when a stump's weighted error reaches 0.5. A perfect stump
    is kept with weight 1 and ends boosting.
    """

    def __init__(self, n_estimators=100, learning_rate=1.0, max_bins=255):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_bins = max_bins

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        n = y.size
        sign = 2 * y - 1
        binner = Binner(self.max_bins).fit(X)
        Xb = binner.transform(X)
        w = np.full(n, 1.0 / n)
        self.stumps_: list[Tree] = []
        self.alphas_: list[float] = []
        self.errors_: list[float] = []
        for _ in range(self.n_estimators):
            tree, leaf = build_tree(Xb, binner, y, w, criterion="gini", max_depth=1)
            tree.value = np.where(tree.value >= 0.5, 1.0, -1.0)
            pred = tree.value[leaf]
            miss = pred != sign
            err = float(w[miss].sum() / w.sum())
            if err >= 0.5:
                break
            self.errors_.append(err)
            if err <= 0.0:
                self.stumps_.append(tree)
                self.alphas_.append(1.0)
                break
            alpha = self.learning_rate * math.log((1 - err) / err)
            self.stumps_.append(tree)
            self.alphas_.append(alpha)
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        if not self.stumps_:
            raise ValueError("AdaBoost could not fit a stump better than chance")
        return self

    def margin(self, X, n_stumps: int | None = None):
        out = np.zeros(X.shape[0])
        for tree, a in zip(self.stumps_[:n_stumps], self.alphas_[:n_stumps]):
            out += a * tree.predict(X)
        return out

    def score(self, X):
        return expit(self.margin(X))

    def truncated(self, n_stumps: int) -> "AdaBoost":
        out = AdaBoost(n_stumps, self.learning_rate, self.max_bins)
        out.stumps_ = self.stumps_[:n_stumps]
        out.alphas_ = self.alphas_[:n_stumps]
        out.errors_ = self.errors_[:n_stumps]
        return out

    def to_dict(self):
        return {"stumps": [t.to_dict() for t in self.stumps_], "alphas": self.alphas_,
                "errors": self.errors_}

    def load_dict(self, d):
        self.stumps_ = [Tree.from_dict(t) for t in d["stumps"]]
        self.alphas_ = list(d["alphas"])
        self.errors_ = list(d.get("errors", []))
        return self
