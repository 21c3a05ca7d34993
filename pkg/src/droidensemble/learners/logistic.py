"""Simple logistic regression fitted by LogitBoost with one-feature regressors.

Each boosting round fits, for every feature, the weighted least-squares
function ``a + b * bit`` to the working responses and adds the best one
(half-step, two-class LogitBoost). The number of rounds is picked by
internal cross-validation on misclassification count.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import NoConvergence
from .base import TrainedModel, check_trainable, logistic

DEFAULT_MAX_ITER = 200
DEFAULT_CV_FOLDS = 5
MIN_WEIGHT = 1e-10
Z_MAX = 3.0
_TIE = 1e-12


def _rounds(X, y, n_iter, X_eval=None):
    """Run ``n_iter`` boosting rounds.

    Returns ``(intercept, weights, eval_errors)``; the model is the linear
    score ``intercept + X @ weights`` fed to the logistic function.
    ``eval_errors[t]`` is the misclassification count on ``X_eval`` (labels
    taken from the caller) after round t+1, or None.
    """
    n, d = X.shape
    Xf = X.astype(float)
    yf = y.astype(float)
    F = np.zeros(n)
    intercept = 0.0
    weights = np.zeros(d)
    if X_eval is not None:
        Xe = X_eval[0].astype(float)
        ye = X_eval[1].astype(bool)
        Fe = np.zeros(Xe.shape[0])
        errors = np.zeros(n_iter, dtype=np.int64)
    else:
        errors = None
    for t in range(n_iter):
        p = logistic(2.0 * F)
        w = np.maximum(p * (1.0 - p), MIN_WEIGHT)
        z = np.clip((yf - p) / w, -Z_MAX, Z_MAX)
        wz = w * z
        W = w.sum()
        Wz = wz.sum()
        W1 = np.einsum("ij,i->j", Xf, w)
        S1 = np.einsum("ij,i->j", Xf, wz)
        W0 = W - W1
        S0 = Wz - S1
        with np.errstate(divide="ignore", invalid="ignore"):
            fit = np.where(W1 > MIN_WEIGHT, S1 * S1 / W1, 0.0) + np.where(W0 > MIN_WEIGHT, S0 * S0 / W0, 0.0)
        # constant features reduce to the intercept-only fit
        const = (W1 <= MIN_WEIGHT) | (W0 <= MIN_WEIGHT)
        fit[const] = Wz * Wz / W
        if d:
            best = fit.max()
            j = int(np.flatnonzero(fit >= best - _TIE * max(1.0, abs(best)))[0])
        if d and not const[j]:
            m1 = S1[j] / W1[j]
            m0 = S0[j] / W0[j]
        else:
            m0 = m1 = Wz / W
        if not (np.isfinite(m0) and np.isfinite(m1)):
            raise NoConvergence("non-finite regression coefficients at round %d" % (t + 1))
        intercept += 0.5 * m0
        F += 0.5 * m0
        if d and m1 != m0:
            weights[j] += 0.5 * (m1 - m0)
            F += 0.5 * (m1 - m0) * Xf[:, j]
        if errors is not None:
            Fe += 0.5 * m0
            if d and m1 != m0:
                Fe += 0.5 * (m1 - m0) * Xe[:, j]
            errors[t] = int(((Fe > 0) != ye).sum())
    return 2.0 * intercept, 2.0 * weights, errors


def grouped_folds(X, y, k, seed):
    """Fold index per row; identical (row, label) pairs always share a fold.

    Groups are dealt round-robin per class after a seeded shuffle, so a
    matrix duplicated k times gets the same partition with k-fold counts.
    """
    keys = np.concatenate([X, y[:, None]], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    rng = np.random.default_rng(seed)
    group_fold = np.empty(len(uniq), dtype=np.int64)
    counter = 0
    for label in (1, 0):
        members = np.flatnonzero(uniq[:, -1] == label)
        members = members[rng.permutation(len(members))]
        for g in members:
            group_fold[g] = counter % k
            counter += 1
    return group_fold[inverse]


def choose_iterations(X, y, max_iter=DEFAULT_MAX_ITER, folds=DEFAULT_CV_FOLDS, seed=0):
    n_groups = len(np.unique(np.concatenate([X, y[:, None]], axis=1), axis=0))
    k = min(folds, n_groups)
    assign = grouped_folds(X, y, k, seed)
    total = np.zeros(max_iter, dtype=np.int64)
    for f in range(k):
        test = assign == f
        train = ~test
        if not train.any() or not test.any():
            continue
        _, _, err = _rounds(X[train], y[train], max_iter, (X[test], y[test]))
        total += err
    return int(np.argmin(total)) + 1


@dataclass(frozen=True)
class SimpleLogisticModel:
    intercept: float
    weights: tuple  # dense per-feature coefficients; unboosted features are 0.0
    iterations_used: int

    @property
    def nonzero(self):
        return {j: w for j, w in enumerate(self.weights) if w != 0.0}

    def predict_sus(self, X):
        w = np.asarray(self.weights, dtype=float)
        return logistic(self.intercept + np.einsum("ij,j->i", X.astype(float), w))

    def summary(self):
        return "nonzero weights: %d (iterations: %d)" % (len(self.nonzero), self.iterations_used)

    def to_dict(self):
        return {"intercept": self.intercept, "iterations_used": self.iterations_used,
                "n_features": len(self.weights),
                "weights": {str(j): w for j, w in self.nonzero.items()}}

    @classmethod
    def from_dict(cls, d):
        n = int(d["n_features"])
        w = [0.0] * n
        for j, v in d["weights"].items():
            w[int(j)] = float(v)
        return cls(float(d["intercept"]), tuple(w), int(d["iterations_used"]))


def fit_simple_logistic(X, y, max_iter=DEFAULT_MAX_ITER, folds=DEFAULT_CV_FOLDS, seed=0):
    n_iter = choose_iterations(X, y, max_iter, folds, seed)
    intercept, weights, _ = _rounds(X, y, n_iter)
    return SimpleLogisticModel(float(intercept), tuple(float(v) for v in weights), n_iter)


def train_simple_logistic(m, seed=0, max_iter=DEFAULT_MAX_ITER, folds=DEFAULT_CV_FOLDS):
    check_trainable(m)
    model = fit_simple_logistic(m.X, m.y, max_iter, folds, seed)
    return TrainedModel("sl", model, m.catalog.version, len(m.catalog))
