"""Ripple-down rules: a default class refined by nested exception rules.

At each node the instances the current default gets wrong are attacked by
greedily grown conjunctions predicting the opposite class. A candidate
rule is scored by its weighted error on the node's open instances,
``(errors introduced + errors left uncorrected) / open``, and is kept only
if it beats leaving the node alone. Each kept exception becomes a child
node with its own default and exceptions, down to ``max_depth``.
"""
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from .base import TrainedModel, check_trainable, laplace

DEFAULT_MAX_DEPTH = 10


@dataclass(frozen=True)
class RippleNode:
    default: int  # 1 = suspicious, 0 = benign
    n_sus: int    # instances at this node not claimed by any exception
    n_ben: int
    exceptions: tuple = ()  # ((literals, RippleNode), ...)

    def to_dict(self):
        return {"default": self.default, "counts": [self.n_sus, self.n_ben],
                "except": [{"if": [list(l) for l in lits], "then": child.to_dict()}
                           for lits, child in self.exceptions]}

    @classmethod
    def from_dict(cls, d, depth=0):
        if depth > 64:
            raise ValueError("exception tree too deep")
        default = int(d["default"])
        if default not in (0, 1):
            raise ValueError("default must be 0 or 1")
        n_sus, n_ben = (int(c) for c in d["counts"])
        exc = []
        for e in d["except"]:
            lits = tuple((int(j), int(b)) for j, b in e["if"])
            if not lits or any(b not in (0, 1) for _, b in lits):
                raise ValueError("bad exception literals")
            exc.append((lits, cls.from_dict(e["then"], depth + 1)))
        return cls(default, n_sus, n_ben, tuple(exc))

    def count_rules(self):
        return 1 + sum(child.count_rules() for _, child in self.exceptions)

    def depth(self):
        return 1 + max((child.depth() for _, child in self.exceptions), default=0)


def _match(X, literals):
    ok = np.ones(X.shape[0], dtype=bool)
    for j, b in literals:
        ok &= X[:, j] == b
    return ok


def best_exception(X, y, rows, target):
    """Greedy conjunction predicting ``target`` on ``rows``; None if nothing helps."""
    yt = (y == target).astype(np.uint8)
    n_target = int(yt[rows].sum())
    baseline = n_target  # no exception: every target instance stays wrong
    cov = rows
    lits = []
    used = set()
    history = []
    d = X.shape[1]
    while True:
        ones_t, ones_o = _kernels.feature_class_counts(X, yt, cov)
        cov_t = int(yt[cov].sum())
        cov_o = len(cov) - cov_t
        # covered target / other counts for literal (j, 1) and (j, 0)
        t1, o1 = ones_t, ones_o
        t0, o0 = cov_t - ones_t, cov_o - ones_o
        err1 = o1 + (n_target - t1)
        err0 = o0 + (n_target - t0)
        err = np.stack([err1, err0], axis=1).astype(float)  # column 0: bit 1, column 1: bit 0
        usable = np.stack([t1 > 0, t0 > 0], axis=1)
        if used:
            usable[sorted(used), :] = False
        err[~usable] = np.inf
        flat = int(np.argmin(err.reshape(-1)))
        if not np.isfinite(err.reshape(-1)[flat]):
            break
        j, col = divmod(flat, 2)
        b = 1 if col == 0 else 0
        lits.append((j, b))
        used.add(j)
        cov = cov[X[cov, j] == b]
        n_cov_t = int(yt[cov].sum())
        history.append((len(cov) - n_cov_t + (n_target - n_cov_t), len(lits)))
        if n_cov_t == len(cov) or len(used) == d:
            break
    if not history:
        return None
    best_err, length = min(history)
    if best_err >= baseline:
        return None
    return tuple(lits[:length])


def _grow(X, y, rows, default, depth, max_depth):
    exceptions = []
    open_ = rows
    target = 1 - default
    while depth < max_depth and len(open_) and np.any(y[open_] == target):
        lits = best_exception(X, y, open_, target)
        if lits is None:
            break
        hit = _match(X[open_], lits)
        child = _grow(X, y, open_[hit], target, depth + 1, max_depth)
        exceptions.append((lits, child))
        open_ = open_[~hit]
    n_sus = int(y[open_].sum())
    return RippleNode(default, n_sus, len(open_) - n_sus, tuple(exceptions))


def _route(node, X, rows, out):
    open_ = rows
    for lits, child in node.exceptions:
        hit = _match(X[open_], lits)
        _route(child, X, open_[hit], out)
        open_ = open_[~hit]
    out[open_] = laplace(node.n_sus, node.n_ben)


@dataclass(frozen=True)
class RippleDownModel:
    root: RippleNode
    max_depth: int = DEFAULT_MAX_DEPTH

    @property
    def default_class(self):
        return "suspicious" if self.root.default else "benign"

    def predict_sus(self, X):
        out = np.empty(X.shape[0])
        _route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def summary(self):
        return "rules: %d" % self.root.count_rules()

    def to_dict(self):
        return {"max_depth": self.max_depth, "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(RippleNode.from_dict(d["root"]), int(d["max_depth"]))


def fit_ridor(X, y, max_depth=DEFAULT_MAX_DEPTH):
    n_sus = int(y.sum())
    default = 1 if n_sus > len(y) - n_sus else 0
    rows = np.arange(X.shape[0], dtype=np.int64)
    return RippleDownModel(_grow(X, y, rows, default, 0, max_depth), max_depth)


def train_ridor(m, seed=0, max_depth=DEFAULT_MAX_DEPTH):
    check_trainable(m)
    return TrainedModel("ridor", fit_ridor(m.X, m.y, max_depth), m.catalog.version, len(m.catalog))
