"""C4.5-style decision tree over binary features.

Splits maximise gain ratio among candidates whose information gain is at
least the average gain; both branches must hold ``min_leaf`` instances.
Pruning is bottom-up subtree replacement using the pessimistic (upper
confidence bound) error estimate with confidence factor ``cf``.
"""
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .. import _kernels
from .base import TrainedModel, check_trainable, entropy, laplace

DEFAULT_CF = 0.25
DEFAULT_MIN_LEAF = 2
_TIE = 1e-12


@dataclass(frozen=True)
class Node:
    n_sus: int
    n_ben: int
    feature: int = -1  # -1 marks a leaf
    zero: "Node" = None
    one: "Node" = None

    @property
    def is_leaf(self):
        return self.feature < 0

    @property
    def n(self):
        return self.n_sus + self.n_ben

    def leaf(self):
        return Node(self.n_sus, self.n_ben)

    def to_dict(self):
        if self.is_leaf:
            return {"counts": [self.n_sus, self.n_ben]}
        return {"counts": [self.n_sus, self.n_ben], "feature": self.feature,
                "zero": self.zero.to_dict(), "one": self.one.to_dict()}

    @classmethod
    def from_dict(cls, d):
        n_sus, n_ben = (int(c) for c in d["counts"])
        if n_sus < 0 or n_ben < 0:
            raise ValueError("negative leaf count")
        if "feature" not in d:
            return cls(n_sus, n_ben)
        return cls(n_sus, n_ben, int(d["feature"]), cls.from_dict(d["zero"]), cls.from_dict(d["one"]))


def add_errors(n, e, cf=DEFAULT_CF):
    """Extra errors predicted by the upper ``cf`` confidence limit on ``e`` errors in ``n``."""
    if n <= 0:
        return 0.0
    if e < 1:
        base = n * (1.0 - cf ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (add_errors(n, 1, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1.0 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
    return r * n - e


def estimated_errors(n_sus, n_ben, cf=DEFAULT_CF):
    n = n_sus + n_ben
    e = min(n_sus, n_ben)
    return e + add_errors(n, e, cf)


def choose_split(X, y, rows, n_sus, n_ben, min_leaf):
    """Index of the best gain-ratio split for ``rows``, or -1 if none is usable."""
    n = n_sus + n_ben
    ones_sus, ones_ben = _kernels.feature_class_counts(X, y, rows)
    n1 = ones_sus + ones_ben
    n0 = n - n1
    valid = (n1 >= min_leaf) & (n0 >= min_leaf)
    if not valid.any():
        return -1
    info = float(entropy(n_sus, n_ben))
    cond = (n1 * entropy(ones_sus, ones_ben) + n0 * entropy(n_sus - ones_sus, n_ben - ones_ben)) / n
    gain = info - cond
    valid &= gain > 1e-10
    if not valid.any():
        return -1
    avg = gain[valid].mean()
    cand = valid & (gain >= avg - 1e-3)
    split_info = entropy(n1, n0)
    ratio = np.where(cand, gain / np.where(split_info > 0, split_info, 1.0), -np.inf)
    best = ratio.max()
    return int(np.flatnonzero(ratio >= best - _TIE)[0])


def grow(X, y, rows, min_leaf=DEFAULT_MIN_LEAF):
    n_sus = int(y[rows].sum())
    n_ben = len(rows) - n_sus
    if n_sus == 0 or n_ben == 0 or len(rows) < 2 * min_leaf:
        return Node(n_sus, n_ben)
    j = choose_split(X, y, rows, n_sus, n_ben, min_leaf)
    if j < 0:
        return Node(n_sus, n_ben)
    bit = X[rows, j].astype(bool)
    return Node(n_sus, n_ben, j,
                grow(X, y, rows[~bit], min_leaf),
                grow(X, y, rows[bit], min_leaf))


def prune(node, cf=DEFAULT_CF):
    """Return ``(pruned_node, estimated_errors)``."""
    leaf_est = estimated_errors(node.n_sus, node.n_ben, cf)
    if node.is_leaf:
        return node, leaf_est
    zero, ez = prune(node.zero, cf)
    one, eo = prune(node.one, cf)
    if leaf_est <= ez + eo + 0.1:
        return node.leaf(), leaf_est
    return Node(node.n_sus, node.n_ben, node.feature, zero, one), ez + eo


def route(node, X, rows, out):
    """Write the deciding leaf's Laplace P(suspicious) into ``out[rows]``."""
    if node.is_leaf:
        out[rows] = laplace(node.n_sus, node.n_ben)
        return
    bit = X[rows, node.feature].astype(bool)
    route(node.zero, X, rows[~bit], out)
    route(node.one, X, rows[bit], out)


def _leaves(node):
    if node.is_leaf:
        yield node
    else:
        yield from _leaves(node.zero)
        yield from _leaves(node.one)


@dataclass(frozen=True)
class DecisionTreeModel:
    root: Node
    cf: float = DEFAULT_CF
    min_leaf: int = DEFAULT_MIN_LEAF

    def leaves(self):
        return list(_leaves(self.root))

    def predict_sus(self, X):
        out = np.empty(X.shape[0])
        route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def summary(self):
        return "leaves: %d" % len(self.leaves())

    def to_dict(self):
        return {"cf": self.cf, "min_leaf": self.min_leaf, "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(Node.from_dict(d["root"]), float(d["cf"]), int(d["min_leaf"]))


def fit_tree(X, y, cf=DEFAULT_CF, min_leaf=DEFAULT_MIN_LEAF, pruned=True):
    root = grow(X, y, np.arange(X.shape[0], dtype=np.int64), min_leaf)
    if pruned:
        root, _ = prune(root, cf)
    return DecisionTreeModel(root, cf, min_leaf)


def train_decision_tree(m, seed=0, cf=DEFAULT_CF, min_leaf=DEFAULT_MIN_LEAF):
    check_trainable(m)
    return TrainedModel("dt", fit_tree(m.X, m.y, cf, min_leaf), m.catalog.version, len(m.catalog))
