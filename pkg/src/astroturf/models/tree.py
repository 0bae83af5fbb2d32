"""Histogram-based binary decision trees.

Features are discretized once per fit into at most ``max_bins`` ordered bins.
When a feature has no more distinct values than bins, every distinct value
gets its own bin and thresholds sit at midpoints, so the learner performs the
same exhaustive search as classic CART.

Both criteria used by the ensembles work on per-sample weights ``w`` and
weighted targets ``w * y``:

* ``"gini"`` for binary targets ``y`` in {0, 1}
* ``"mse"`` for real-valued targets (gradient boosting residuals)
"""
from __future__ import annotations

import numpy as np
from numba import njit

LEAF = -1


class Binner:
    """Per-feature bin edges; ``x <= edges[b]`` falls into bin ``<= b``."""

    def __init__(self, max_bins: int = 255):
        if not 2 <= max_bins <= 256:
            raise ValueError("max_bins must be in [2, 256]")
        self.max_bins = max_bins
        self.edges: list[np.ndarray] = []

    def fit(self, X: np.ndarray) -> "Binner":
        self.edges = []
        for j in range(X.shape[1]):
            values = np.unique(X[:, j])
            if values.size <= self.max_bins:
                edges = (values[:-1] + values[1:]) / 2.0
            else:
                qs = np.linspace(0.0, 1.0, self.max_bins + 1)[1:-1]
                edges = np.unique(np.quantile(X[:, j], qs, method="lower"))
                # a quantile equal to the maximum would create an empty bin
                edges = edges[edges < values[-1]]
            self.edges.append(edges.astype(np.float64))
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape, dtype=np.uint8)
        for j, edges in enumerate(self.edges):
            out[:, j] = np.searchsorted(edges, X[:, j], side="left")
        return out

    @property
    def n_bins(self) -> np.ndarray:
        return np.array([e.size + 1 for e in self.edges], dtype=np.int64)


class Tree:
    """Array-backed fitted tree.

    Internal node ``i`` sends a row left when ``X[row, feature[i]] <=
    threshold[i]``. Leaves carry ``feature == LEAF`` and their prediction in
    ``value``.
    """

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Return the leaf index reached by every row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])


@njit(cache=True)
def _splitmix(state):
    state = (state + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = state
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True)
def _child_score(S, W, mse):
    if W <= 0.0:
        return 0.0
    if mse:
        return S * S / W
    return (S * S + (W - S) * (W - S)) / W


@njit(cache=True)
def _grow(XbT, n_bins, s, w, unit, mse, max_depth, min_split, min_leaf, max_features, seed):
    d, n = XbT.shape
    nb = 1
    for j in range(d):
        if n_bins[j] > nb:
            nb = n_bins[j]
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int64)
    split_bin = np.zeros(cap, np.int64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    leaf_of_row = np.zeros(n, np.int64)

    idx = np.arange(n)
    buf = np.empty(n, np.int64)
    hw = np.zeros((d, nb))
    hs = np.zeros((d, nb))
    hc = np.zeros((d, nb), np.int64)
    feats = np.arange(d)
    perm = np.arange(d)
    state = np.uint64(seed)

    stack_node = np.empty(cap, np.int64)
    stack_lo = np.empty(cap, np.int64)
    stack_hi = np.empty(cap, np.int64)
    stack_depth = np.empty(cap, np.int64)
    top = 0
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    stack_depth[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        lo = stack_lo[top]
        hi = stack_hi[top]
        depth = stack_depth[top]
        count = hi - lo
        for i in range(lo, hi):
            leaf_of_row[idx[i]] = node
        if max_depth >= 0 and depth >= max_depth:
            continue
        if count < min_split or count < 2 * min_leaf:
            continue
        W = 0.0
        S = 0.0
        for i in range(lo, hi):
            W += w[idx[i]]
            S += s[idx[i]]
        if not mse and (S <= 0.0 or S >= W):
            continue

        # candidate features: first max_features of a partial shuffle, sorted
        k = d
        if max_features > 0 and max_features < d:
            for j in range(d):
                perm[j] = j
            for j in range(max_features):
                state, r = _splitmix(state)
                t = j + np.int64(r % np.uint64(d - j))
                tmp = perm[j]
                perm[j] = perm[t]
                perm[t] = tmp
            k = max_features
            feats[:k] = np.sort(perm[:k])
        else:
            for j in range(d):
                feats[j] = j

        for a in range(k):
            f = feats[a]
            hwf = hw[f]
            hsf = hs[f]
            hcf = hc[f]
            xf = XbT[f]
            for b in range(n_bins[f]):
                hwf[b] = 0.0
                hsf[b] = 0.0
                hcf[b] = 0
            if unit:
                for i in range(lo, hi):
                    r = idx[i]
                    b = xf[r]
                    hsf[b] += s[r]
                    hcf[b] += 1
                for b in range(n_bins[f]):
                    hwf[b] = hcf[b]
            else:
                for i in range(lo, hi):
                    r = idx[i]
                    b = xf[r]
                    hwf[b] += w[r]
                    hsf[b] += s[r]
                    hcf[b] += 1

        parent = _child_score(S, W, mse)
        best_gain = -np.inf
        best_f = -1
        best_b = -1
        for a in range(k):
            f = feats[a]
            cw = 0.0
            cs = 0.0
            cc = 0
            for b in range(n_bins[f] - 1):
                cw += hw[f, b]
                cs += hs[f, b]
                cc += hc[f, b]
                if cc < min_leaf or count - cc < min_leaf:
                    continue
                if cw <= 0.0 or W - cw <= 0.0:
                    continue
                g = _child_score(cs, cw, mse) + _child_score(S - cs, W - cw, mse)
                if g > best_gain:
                    best_gain = g
                    best_f = f
                    best_b = b
        if best_f < 0:
            continue
        if not best_gain > parent + 1e-12 * max(abs(parent), 1.0):
            continue

        # stable partition of idx[lo:hi]
        nl = 0
        for i in range(lo, hi):
            if XbT[best_f, idx[i]] <= best_b:
                nl += 1
        li = lo
        ri = lo + nl
        for i in range(lo, hi):
            r = idx[i]
            if XbT[best_f, r] <= best_b:
                buf[li] = r
                li += 1
            else:
                buf[ri] = r
                ri += 1
        for i in range(lo, hi):
            idx[i] = buf[i]

        feature[node] = best_f
        split_bin[node] = best_b
        left[node] = n_nodes
        right[node] = n_nodes + 1
        n_nodes += 2
        # right pushed first so the left subtree is grown first
        stack_node[top] = right[node]
        stack_lo[top] = lo + nl
        stack_hi[top] = hi
        stack_depth[top] = depth + 1
        top += 1
        stack_node[top] = left[node]
        stack_lo[top] = lo
        stack_hi[top] = lo + nl
        stack_depth[top] = depth + 1
        top += 1

    return (
        feature[:n_nodes],
        split_bin[:n_nodes],
        left[:n_nodes],
        right[:n_nodes],
        leaf_of_row,
    )


def build_tree(
    Xb: np.ndarray,
    binner: Binner,
    y: np.ndarray,
    w: np.ndarray | None = None,
    *,
    criterion: str = "gini",
    max_depth: int | None = None,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
    XbT: np.ndarray | None = None,
) -> tuple[Tree, np.ndarray]:
    """Grow a tree depth-first on pre-binned data.

    Leaves predict the weighted mean of ``y`` (the bot probability under
    ``"gini"``). Returns the tree and the leaf index of every training row so
    callers can install their own leaf values. ``max_features`` draws that
    many candidate features per node from a stream seeded by ``rng``.
    Callers growing many trees on the same rows can pass the feature-major
    copy ``XbT`` of ``Xb`` to skip the per-call transpose.
    """
    if criterion not in ("gini", "mse"):
        raise ValueError(f"unknown criterion {criterion!r}")
    n, d = Xb.shape
    y = np.asarray(y, dtype=np.float64)
    unit = w is None
    w = np.ones(n) if w is None else np.asarray(w, dtype=np.float64)
    s = w * y
    subsample = max_features is not None and max_features < d
    if subsample and rng is None:
        raise ValueError("max_features requires rng")
    seed = int(rng.integers(0, 2**63)) if subsample else 0
    if XbT is None:
        XbT = np.ascontiguousarray(Xb.T, dtype=np.uint8)
    feature, split_bin, left, right, leaf_of_row = _grow(
        XbT,
        binner.n_bins,
        s,
        w,
        unit,
        criterion == "mse",
        -1 if max_depth is None else int(max_depth),
        int(min_samples_split),
        int(min_samples_leaf),
        int(max_features) if subsample else 0,
        seed,
    )
    threshold = np.zeros(feature.size)
    for node in np.flatnonzero(feature != LEAF):
        threshold[node] = binner.edges[feature[node]][split_bin[node]]
    W_leaf = np.bincount(leaf_of_row, weights=w, minlength=feature.size)
    S_leaf = np.bincount(leaf_of_row, weights=s, minlength=feature.size)
    value = np.divide(S_leaf, W_leaf, out=np.zeros(feature.size), where=W_leaf > 0)
    return Tree(feature, threshold, left, right, value), leaf_of_row


class DecisionTree:
    """Plain CART classifier with Gini splits; predicts the bot probability."""

    def __init__(self, max_depth=None, min_samples_leaf=1, max_bins=255):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.max_bins = max_bins

    def fit(self, X, y, sample_weight=None):
        X = np.asarray(X, dtype=np.float64)
        self.binner_ = Binner(self.max_bins).fit(X)
        self.tree_, _ = build_tree(
            self.binner_.transform(X),
            self.binner_,
            y,
            sample_weight,
            criterion="gini",
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
        )
        return self

    def predict_proba(self, X):
        return self.tree_.predict(np.asarray(X, dtype=np.float64))
