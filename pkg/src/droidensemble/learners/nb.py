"""Bernoulli naive Bayes with add-one smoothed conditionals."""
from dataclasses import dataclass

import numpy as np

from .base import TrainedModel, check_trainable, logistic


@dataclass(frozen=True)
class NaiveBayesModel:
    n_sus: int
    n_ben: int
    ones_sus: tuple  # per-feature count of bit=1 among suspicious samples
    ones_ben: tuple

    @property
    def prior_sus(self):
        return self.n_sus / (self.n_sus + self.n_ben)

    @property
    def prior_ben(self):
        return self.n_ben / (self.n_sus + self.n_ben)

    @property
    def cond_sus(self):
        """P(bit=1 | suspicious) per feature."""
        return (np.asarray(self.ones_sus, dtype=float) + 1.0) / (self.n_sus + 2.0)

    @property
    def cond_ben(self):
        return (np.asarray(self.ones_ben, dtype=float) + 1.0) / (self.n_ben + 2.0)

    def predict_sus(self, X):
        ts, tb = self.cond_sus, self.cond_ben
        # log-odds of suspicious vs benign, accumulated per feature
        on = np.log(ts) - np.log(tb)
        off = np.log1p(-ts) - np.log1p(-tb)
        base = np.log(self.prior_sus) - np.log(self.prior_ben) + off.sum()
        score = base + np.einsum("ij,j->i", X.astype(float), on - off)
        return logistic(score)

    def summary(self):
        return "features: %d" % len(self.ones_sus)

    def to_dict(self):
        return {
            "n_sus": self.n_sus,
            "n_ben": self.n_ben,
            "ones_sus": list(self.ones_sus),
            "ones_ben": list(self.ones_ben),
            "prior_sus": self.prior_sus,
            "cond_sus": self.cond_sus.tolist(),
            "cond_ben": self.cond_ben.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        ones_sus = tuple(int(v) for v in d["ones_sus"])
        ones_ben = tuple(int(v) for v in d["ones_ben"])
        if len(ones_sus) != len(ones_ben):
            raise ValueError("count tables differ in length")
        return cls(int(d["n_sus"]), int(d["n_ben"]), ones_sus, ones_ben)


def fit_naive_bayes(X, y):
    lab = y.astype(bool)
    ones_sus = X[lab].sum(axis=0, dtype=np.int64)
    ones_ben = X[~lab].sum(axis=0, dtype=np.int64)
    return NaiveBayesModel(int(lab.sum()), int((~lab).sum()),
                           tuple(int(v) for v in ones_sus), tuple(int(v) for v in ones_ben))


def train_naive_bayes(m, seed=0):
    check_trainable(m)
    return TrainedModel("nb", fit_naive_bayes(m.X, m.y), m.catalog.version, len(m.catalog))
