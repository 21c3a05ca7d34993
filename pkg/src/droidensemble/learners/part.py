"""PART: decision list built from partial C4.5 trees (separate and conquer)."""
from dataclasses import dataclass

import numpy as np

from .base import TrainedModel, check_trainable, entropy, laplace
from .tree import DEFAULT_CF, DEFAULT_MIN_LEAF, choose_split, estimated_errors


@dataclass(frozen=True)
class Rule:
    literals: tuple  # ((feature, required_bit), ...)
    n_sus: int
    n_ben: int

    def matches(self, X):
        ok = np.ones(X.shape[0], dtype=bool)
        for j, b in self.literals:
            ok &= X[:, j] == b
        return ok

    def to_dict(self):
        return {"if": [list(lit) for lit in self.literals], "counts": [self.n_sus, self.n_ben]}

    @classmethod
    def from_dict(cls, d):
        lits = tuple((int(j), int(b)) for j, b in d["if"])
        if any(b not in (0, 1) for _, b in lits):
            raise ValueError("literal bit must be 0 or 1")
        n_sus, n_ben = (int(c) for c in d["counts"])
        if n_sus < 0 or n_ben < 0:
            raise ValueError("negative rule count")
        return cls(lits, n_sus, n_ben)


class _Partial:
    """Node of a partial tree; ``children[b]`` stays None if never expanded."""

    __slots__ = ("n_sus", "n_ben", "feature", "children")

    def __init__(self, n_sus, n_ben, feature=-1, children=None):
        self.n_sus = n_sus
        self.n_ben = n_ben
        self.feature = feature
        self.children = children

    @property
    def is_leaf(self):
        return self.feature < 0


def _expand(X, y, rows, min_leaf, cf):
    n_sus = int(y[rows].sum())
    n_ben = len(rows) - n_sus
    if n_sus == 0 or n_ben == 0 or len(rows) < 2 * min_leaf:
        return _Partial(n_sus, n_ben)
    j = choose_split(X, y, rows, n_sus, n_ben, min_leaf)
    if j < 0:
        return _Partial(n_sus, n_ben)
    bit = X[rows, j].astype(bool)
    subsets = {0: rows[~bit], 1: rows[bit]}
    ent = {b: float(entropy(int(y[r].sum()), len(r) - int(y[r].sum()))) for b, r in subsets.items()}
    node = _Partial(n_sus, n_ben, j, [None, None])
    for b in sorted(subsets, key=lambda b: (ent[b], b)):
        child = _expand(X, y, subsets[b], min_leaf, cf)
        node.children[b] = child
        if not child.is_leaf:
            break
    kids = node.children
    if all(c is not None and c.is_leaf for c in kids):
        subtree = sum(estimated_errors(c.n_sus, c.n_ben, cf) for c in kids)
        if estimated_errors(n_sus, n_ben, cf) <= subtree + 0.1:
            return _Partial(n_sus, n_ben)
    return node


def _best_leaf(node, path=()):
    """(coverage, literals, leaf) of the expanded leaf covering most instances."""
    if node.is_leaf:
        return node.n_sus + node.n_ben, path, node
    best = None
    for b in (0, 1):
        child = node.children[b]
        if child is None:
            continue
        cand = _best_leaf(child, path + ((node.feature, b),))
        if cand is not None and (best is None or cand[0] > best[0]):
            best = cand
    return best


@dataclass(frozen=True)
class RuleListModel:
    rules: tuple
    default_sus: int
    default_ben: int

    def predict_sus(self, X):
        out = np.full(X.shape[0], laplace(self.default_sus, self.default_ben))
        open_ = np.ones(X.shape[0], dtype=bool)
        for r in self.rules:
            hit = open_ & r.matches(X)
            out[hit] = laplace(r.n_sus, r.n_ben)
            open_ &= ~hit
        return out

    def covering_rule(self, bits):
        """Index of the first matching rule, or ``len(rules)`` for the default."""
        x = np.asarray(bits, dtype=np.uint8).reshape(1, -1)
        for k, r in enumerate(self.rules):
            if r.matches(x)[0]:
                return k
        return len(self.rules)

    def summary(self):
        return "rules: %d" % (len(self.rules) + 1)

    def to_dict(self):
        return {"rules": [r.to_dict() for r in self.rules],
                "default": [self.default_sus, self.default_ben]}

    @classmethod
    def from_dict(cls, d):
        n_sus, n_ben = (int(c) for c in d["default"])
        return cls(tuple(Rule.from_dict(r) for r in d["rules"]), n_sus, n_ben)


def fit_part(X, y, cf=DEFAULT_CF, min_leaf=DEFAULT_MIN_LEAF):
    remaining = np.arange(X.shape[0], dtype=np.int64)
    rules = []
    default = None
    while len(remaining):
        root = _expand(X, y, remaining, min_leaf, cf)
        _, literals, leaf = _best_leaf(root)
        if not literals:
            default = (leaf.n_sus, leaf.n_ben)
            break
        rule = Rule(literals, leaf.n_sus, leaf.n_ben)
        rules.append(rule)
        remaining = remaining[~rule.matches(X[remaining])]
    if default is None:
        n_sus = int(y.sum())
        default = (n_sus, len(y) - n_sus)
    return RuleListModel(tuple(rules), *default)


def train_part(m, seed=0, cf=DEFAULT_CF, min_leaf=DEFAULT_MIN_LEAF):
    check_trainable(m)
    return TrainedModel("part", fit_part(m.X, m.y, cf, min_leaf), m.catalog.version, len(m.catalog))
