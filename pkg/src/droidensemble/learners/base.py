"""Posterior type, the tagged model container, prediction and persistence."""
import json
from dataclasses import dataclass

import numpy as np

from ..errors import CorruptModel, DimensionMismatch, SchemaMismatch, SingleClassData

SCHEMA_VERSION = 1
ALGORITHMS = ("nb", "sl", "dt", "ridor", "part")  # committee order


@dataclass(frozen=True)
class Posterior:
    p_sus: float
    p_ben: float

    def __post_init__(self):
        if not (self.p_sus >= 0.0 and self.p_ben >= 0.0):
            raise ValueError("probabilities must be non-negative: %r" % (self,))
        if abs(self.p_sus + self.p_ben - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1: %r" % (self,))

    @classmethod
    def from_sus(cls, p_sus):
        p_sus = float(p_sus)
        return cls(p_sus, 1.0 - p_sus)

    @property
    def label(self):
        """Argmax class; an exact tie goes to benign."""
        return "suspicious" if self.p_sus > self.p_ben else "benign"


def laplace(n_sus, n_ben):
    """P(suspicious) from class counts with add-one smoothing."""
    return (n_sus + 1.0) / (n_sus + n_ben + 2.0)


def check_trainable(m):
    n_sus, n_ben = m.class_counts()
    if n_sus == 0 or n_ben == 0:
        raise SingleClassData("training data has %d suspicious and %d benign samples" % (n_sus, n_ben))


@dataclass(frozen=True)
class TrainedModel:
    algorithm: str
    payload: object
    catalog_version: str
    n_features: int

    def __post_init__(self):
        from . import REGISTRY
        if self.algorithm not in REGISTRY:
            raise SchemaMismatch("unknown algorithm %r" % self.algorithm)
        if not isinstance(self.payload, REGISTRY[self.algorithm]):
            raise TypeError("payload %s does not match tag %r" % (type(self.payload).__name__, self.algorithm))

    def summary(self):
        return self.payload.summary()


def predict_proba(model, X):
    """P(suspicious) for each row of a (n, d) 0/1 array."""
    X = np.asarray(X, dtype=np.uint8)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.n_features:
        raise DimensionMismatch("model expects %d features, got %d" % (model.n_features, X.shape[1]))
    return model.payload.predict_sus(X)


def predict(model, v):
    """Two-class posterior for one feature vector (``FeatureVector`` or bit sequence)."""
    bits = getattr(v, "bits", v)
    p = float(predict_proba(model, np.asarray(bits, dtype=np.uint8).reshape(1, -1))[0])
    return Posterior.from_sus(p)


def dump_model(model):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "algorithm": model.algorithm,
        "catalog_version": model.catalog_version,
        "n_features": model.n_features,
        "payload": model.payload.to_dict(),
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def parse_model(text):
    from . import REGISTRY
    try:
        doc = json.loads(text)
    except (ValueError, RecursionError) as exc:
        raise CorruptModel("model file is not valid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise CorruptModel("model document must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch("unsupported schema_version %r" % doc.get("schema_version"))
    algo = doc.get("algorithm")
    if algo not in REGISTRY:
        raise SchemaMismatch("unknown algorithm %r" % algo)
    try:
        payload = REGISTRY[algo].from_dict(doc["payload"])
        return TrainedModel(algo, payload, str(doc["catalog_version"]), int(doc["n_features"]))
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise CorruptModel("bad %s payload: %s" % (algo, exc)) from None


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_model(model))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def logistic(s):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, 1.0 / (1.0 + np.exp(-np.abs(s))), np.exp(-np.abs(s)) / (1.0 + np.exp(-np.abs(s))))


def entropy(a, b):
    """Binary entropy in bits of counts ``a``, ``b`` (arrays allowed)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        pa = np.where(n > 0, a / n, 0.0)
        pb = np.where(n > 0, b / n, 0.0)
        ha = np.where(pa > 0, -pa * np.log2(np.where(pa > 0, pa, 1.0)), 0.0)
        hb = np.where(pb > 0, -pb * np.log2(np.where(pb > 0, pb, 1.0)), 0.0)
    return ha + hb
