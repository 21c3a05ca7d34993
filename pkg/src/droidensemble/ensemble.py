"""Untrained fusion of base-classifier posteriors.

Four schemes: average, product and maximum of the per-class
probabilities, and majority vote over per-classifier argmax decisions.
Every exact tie resolves to benign.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

from .learners.base import ALGORITHMS, Posterior

SCHEMES = ("avg", "prod", "max", "vote")
SCHEME_NAMES = {"avg": "AvgProb", "prod": "ProdProb", "max": "MaxProb", "vote": "MVote"}
COMMITTEE = ALGORITHMS  # nb, sl, dt, ridor, part


@dataclass(frozen=True)
class PosteriorSet:
    posteriors: tuple

    def __post_init__(self):
        if len(self.posteriors) != len(COMMITTEE):
            raise ValueError("expected %d posteriors, got %d" % (len(COMMITTEE), len(self.posteriors)))
        for p in self.posteriors:
            if not isinstance(p, Posterior):
                raise TypeError("PosteriorSet holds Posterior values, got %r" % (p,))

    def __iter__(self):
        return iter(self.posteriors)

    def __len__(self):
        return len(self.posteriors)


@dataclass(frozen=True)
class EnsembleVerdict:
    decision: str
    score_sus: float
    scheme: str
    per_classifier: tuple


def _decide(sus, ben):
    return "suspicious" if sus > ben else "benign"


def _exact_sum(values):
    return sum((Fraction(v) for v in values), Fraction(0))


def _exact_prod(values):
    out = Fraction(1)
    for v in values:
        out *= Fraction(v)
    return out


def _avg(ps):
    s = math.fsum(p.p_sus for p in ps)
    b = math.fsum(p.p_ben for p in ps)
    if s == b:
        # correctly rounded sums can collide when the exact sums differ
        decision = _decide(_exact_sum(p.p_sus for p in ps), _exact_sum(p.p_ben for p in ps))
    else:
        decision = _decide(s, b)
    return decision, s / len(ps)


def _prod(ps):
    sus = [p.p_sus for p in ps]
    ben = [p.p_ben for p in ps]
    if 0.0 in sus or 0.0 in ben:
        s, b = _exact_prod(sus), _exact_prod(ben)
        if s == 0 and b == 0:
            return "benign", 0.5
        return _decide(s, b), float(s / (s + b))
    ls = math.fsum(math.log(v) for v in sus)
    lb = math.fsum(math.log(v) for v in ben)
    diff = ls - lb
    score = 1.0 / (1.0 + math.exp(-diff)) if diff >= 0 else math.exp(diff) / (1.0 + math.exp(diff))
    if abs(diff) < 1e-9:
        # log rounding can hide or invent a difference this small
        return _decide(_exact_prod(sus), _exact_prod(ben)), score
    return _decide(ls, lb), score


def _max(ps):
    s = max(p.p_sus for p in ps)
    b = max(p.p_ben for p in ps)
    return _decide(s, b), s / (s + b)


def _vote(ps):
    sus_votes = sum(1 for p in ps if p.p_sus > p.p_ben)
    return _decide(sus_votes, len(ps) - sus_votes), sus_votes / len(ps)


_RULES = {"avg": _avg, "prod": _prod, "max": _max, "vote": _vote}


def combine(ps, scheme):
    """Fuse a committee of posteriors into one verdict.

    ``ps`` is a :class:`PosteriorSet` or any non-empty sequence of
    :class:`Posterior`. ``score_sus`` is a ranking score in [0, 1] that
    exceeds 0.5 exactly when the decision is suspicious (ties aside).
    """
    if scheme not in _RULES:
        raise ValueError("unknown scheme %r; expected one of %s" % (scheme, SCHEMES))
    ps = tuple(ps)
    if not ps:
        raise ValueError("cannot combine an empty committee")
    decision, score = _RULES[scheme](ps)
    return EnsembleVerdict(decision, score, scheme, ps)
