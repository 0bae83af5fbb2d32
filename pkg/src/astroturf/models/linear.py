"""Linear classifiers: L2 logistic regression and a hinge-loss linear SVM."""
from __future__ import annotations

import numpy as np
from numba import njit
from scipy.special import expit

from .ensemble import log_loss


class LogisticRegression:
    """Minimizes ``mean(log_loss) + l2/2 * ||w||^2`` (intercept unpenalized)
    with damped Newton steps until the gradient norm drops below ``tol``."""

    def __init__(self, l2=1.0, tol=1e-6, max_iter=100):
        if l2 <= 0:
            raise ValueError("l2 must be positive")
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter

    def _objective(self, A, y, theta):
        reg = np.ones_like(theta)
        reg[-1] = 0.0
        return log_loss(y, A @ theta).mean() + 0.5 * self.l2 * (reg * theta ** 2).sum()

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        A = np.hstack([X, np.ones((n, 1))])
        reg = np.ones(d + 1)
        reg[-1] = 0.0
        theta = np.zeros(d + 1)
        obj = self._objective(A, y, theta)
        self.n_iter_ = 0
        for it in range(self.max_iter):
            p = expit(A @ theta)
            grad = A.T @ (p - y) / n + self.l2 * reg * theta
            self.grad_norm_ = float(np.linalg.norm(grad))
            if self.grad_norm_ < self.tol:
                break
            H = (A * (p * (1 - p))[:, None]).T @ A / n + self.l2 * np.diag(reg)
            H[-1, -1] += 1e-12
            step = np.linalg.solve(H, grad)
            t = 1.0
            while t > 1e-10:
                cand = theta - t * step
                cand_obj = self._objective(A, y, cand)
                if cand_obj <= obj:
                    break
                t *= 0.5
            theta, obj = cand, cand_obj
            self.n_iter_ = it + 1
        else:
            p = expit(A @ theta)
            self.grad_norm_ = float(np.linalg.norm(A.T @ (p - y) / n + self.l2 * reg * theta))
        self.coef_ = theta[:-1]
        self.intercept_ = float(theta[-1])
        return self

    def margin(self, X):
        return X @ self.coef_ + self.intercept_

    def score(self, X):
        return expit(self.margin(X))

    def to_dict(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def load_dict(self, d):
        self.coef_ = np.asarray(d["coef"], dtype=np.float64)
        self.intercept_ = float(d["intercept"])
        return self


@njit(cache=True)
def _pegasos(A, sign, l2, order):
    n, d = A.shape
    epochs = order.shape[0]
    w = np.zeros(d)
    avg = np.zeros(d)
    radius = 1.0 / np.sqrt(l2)
    t = 0
    for e in range(epochs):
        for j in range(n):
            i = order[e, j]
            t += 1
            eta = 1.0 / (l2 * t)
            m = 0.0
            for k in range(d):
                m += w[k] * A[i, k]
            scale = 1.0 - eta * l2
            for k in range(d):
                w[k] *= scale
            if sign[i] * m < 1.0:
                for k in range(d):
                    w[k] += eta * sign[i] * A[i, k]
            norm = 0.0
            for k in range(d):
                norm += w[k] * w[k]
            norm = np.sqrt(norm)
            if norm > radius:
                for k in range(d):
                    w[k] *= radius / norm
            if e == epochs - 1:
                for k in range(d):
                    avg[k] += w[k]
    return avg / n


class LinearSVC:
    """Hinge loss with L2 penalty, trained by Pegasos stochastic subgradient
    steps for a fixed number of epochs. The intercept is an extra constant
    feature, and the returned weights average the final epoch's iterates."""

    def __init__(self, l2=0.01, epochs=50, seed=0):
        if l2 <= 0:
            raise ValueError("l2 must be positive")
        self.l2 = l2
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        n = y.size
        A = np.ascontiguousarray(np.hstack([X, np.ones((n, 1))]))
        rng = np.random.default_rng(self.seed)
        order = np.stack([rng.permutation(n) for _ in range(self.epochs)]).astype(np.int64)
        theta = _pegasos(A, 2 * y - 1, float(self.l2), order)
        self.coef_ = theta[:-1]
        self.intercept_ = float(theta[-1])
        return self

    def margin(self, X):
        return X @ self.coef_ + self.intercept_

    def score(self, X):
        return expit(self.margin(X))

    def to_dict(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def load_dict(self, d):
        self.coef_ = np.asarray(d["coef"], dtype=np.float64)
        self.intercept_ = float(d["intercept"])
        return self
