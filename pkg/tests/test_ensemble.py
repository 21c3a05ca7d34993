import itertools

import numpy as np
import pytest

from droidensemble.ensemble import SCHEMES, PosteriorSet, combine
from droidensemble.learners import Posterior

import helpers


def ps(*p_sus):
    return PosteriorSet(tuple(Posterior.from_sus(p) for p in p_sus))


def test_avg_example():
    v = combine(ps(0.9, 0.8, 0.7, 0.6, 0.5), "avg")
    assert v.decision == "suspicious" and v.score_sus == pytest.approx(0.7)


def test_vote_example():
    v = combine(ps(0.9, 0.8, 0.2, 0.1, 0.3), "vote")
    assert v.decision == "benign" and v.score_sus == pytest.approx(0.4)


def test_max_example():
    v = combine(ps(0.95, 0.2, 0.2, 0.2, 0.2), "max")
    assert v.decision == "suspicious"
    assert v.score_sus == pytest.approx(0.95 / (0.95 + 0.8))


def test_prod_example():
    v = combine(ps(0.9, 0.9, 0.9, 0.9, 0.1), "prod")
    s, b = 0.9 ** 4 * 0.1, 0.1 ** 4 * 0.9
    assert v.decision == "suspicious" and v.score_sus == pytest.approx(s / (s + b))


def test_prod_both_zero_scores_half():
    v = combine(ps(1.0, 0.0, 0.5, 0.5, 0.5), "prod")
    assert v.decision == "benign" and v.score_sus == 0.5


def test_prod_underflow_safe():
    # 5 factors of 1e-80 would underflow to 0 in plain products for 64 learners; log space keeps order
    v = combine([Posterior.from_sus(1e-80)] * 3 + [Posterior.from_sus(1 - 1e-12)] * 2, "prod")
    assert v.decision == "benign" and 0.0 <= v.score_sus < 0.5


@pytest.mark.parametrize("scheme", SCHEMES)
def test_unanimous_suspicious(scheme):
    assert combine(ps(1, 1, 1, 1, 1), scheme).decision == "suspicious"


@pytest.mark.parametrize("scheme", SCHEMES)
def test_all_half_is_benign(scheme):
    assert combine(ps(0.5, 0.5, 0.5, 0.5, 0.5), scheme).decision == "benign"


def test_posterior_set_needs_five():
    with pytest.raises(ValueError):
        PosteriorSet((Posterior.from_sus(0.3),))


def test_single_member_committee():
    for scheme in SCHEMES:
        assert combine([Posterior.from_sus(0.7)], scheme).decision == "suspicious"


def random_sets(n, seed):
    rng = np.random.default_rng(seed)
    grid = np.array([0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0])
    for i in range(n):
        if i % 3 == 0:  # coarse grid values force exact ties
            yield list(rng.choice(grid, size=5))
        else:
            yield list(rng.random(5))


def test_oracle_agreement_sample():
    for p in random_sets(2000, 1):
        for scheme in SCHEMES:
            assert combine(ps(*p), scheme).decision == helpers.literal_combine(p, scheme), (p, scheme)


def test_permutation_invariance_sample():
    rng = np.random.default_rng(2)
    for p in random_sets(300, 3):
        perms = list(itertools.permutations(p))
        for scheme in SCHEMES:
            base = combine(ps(*p), scheme)
            for q in (perms[i] for i in rng.choice(len(perms), 5)):
                other = combine(ps(*q), scheme)
                assert other.decision == base.decision and other.score_sus == base.score_sus


def test_avg_equals_mean_threshold():
    # dyadic values keep 1 - p exact, so the identity holds without rounding slack
    rng = np.random.default_rng(4)
    for _ in range(1000):
        p = list(rng.integers(0, 1025, size=5) / 1024)
        assert (combine(ps(*p), "avg").decision == "suspicious") == (sum(p) > 2.5)


def test_max_follows_most_confident():
    rng = np.random.default_rng(5)
    for _ in range(500):
        p = list(rng.random(5))
        conf = [abs(x - 0.5) for x in p]
        top = int(np.argmax(conf))
        if sorted(conf)[-1] == sorted(conf)[-2] or p[top] == 0.5:
            continue
        want = "suspicious" if p[top] > 0.5 else "benign"
        assert combine(ps(*p), "max").decision == want


def test_vote_never_ties_without_classifier_ties():
    for p in random_sets(500, 6):
        if 0.5 in p:
            continue
        v = combine(ps(*p), "vote")
        assert v.score_sus != 0.5
        assert (v.decision == "suspicious") == (v.score_sus >= 0.6)
