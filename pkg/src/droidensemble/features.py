"""Feature catalog, vectorisation and the labelled sample matrix."""
import csv
import hashlib
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (BadKeyword, BadLabel, BadValue, CatalogError, DuplicateKeyword,
                     DuplicateSample, EmptyCatalog, SchemaMismatch, UnknownCategory)

CATEGORIES = {"api": "api", "cmd": "command", "perm": "permission"}
_SHORT = {v: k for k, v in CATEGORIES.items()}

SUSPICIOUS = "suspicious"
BENIGN = "benign"
LABELS = (SUSPICIOUS, BENIGN)


@dataclass(frozen=True)
class Feature:
    keyword: str
    category: str  # "api" | "command" | "permission"

    def __str__(self):
        return "%s:%s" % (_SHORT[self.category], self.keyword)


class FeatureCatalog:
    """Ordered, duplicate-free keyword list; the order is the vector column layout."""

    def __init__(self, features):
        features = tuple(features)
        if not features:
            raise EmptyCatalog("catalog has no features")
        seen = set()
        for f in features:
            if f.category not in _SHORT:
                raise UnknownCategory("unknown category %r" % f.category)
            _check_keyword(f.keyword)
            if f.keyword in seen:
                raise DuplicateKeyword("duplicate keyword %r" % f.keyword)
            seen.add(f.keyword)
        self.features = features
        text = "\n".join(str(f) for f in features).encode("utf-8")
        self.version = hashlib.sha256(text).hexdigest()[:16]

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def __eq__(self, other):
        return isinstance(other, FeatureCatalog) and self.features == other.features

    def __hash__(self):
        return hash(self.features)

    def __repr__(self):
        return "FeatureCatalog(%d features, version=%s)" % (len(self), self.version)

    @property
    def keywords(self):
        return [f.keyword for f in self.features]

    def count(self, category):
        return sum(1 for f in self.features if f.category == category)

    def to_text(self):
        return "".join(str(f) + "\n" for f in self.features)


def _check_keyword(keyword):
    if not keyword or keyword != keyword.strip():
        raise BadKeyword("empty or padded keyword %r" % keyword)
    if any(c in keyword for c in ",\n\r\"") :
        raise BadKeyword("keyword %r contains a forbidden character" % keyword)


def parse_catalog(text):
    features = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cat, sep, keyword = line.partition(":")
        if not sep:
            raise CatalogError("line %d: expected <category>:<keyword>, got %r" % (lineno, raw))
        cat = cat.strip()
        if cat not in CATEGORIES:
            raise UnknownCategory("line %d: unknown category %r" % (lineno, cat))
        features.append(Feature(keyword.strip(), CATEGORIES[cat]))
    return FeatureCatalog(features)


def load_catalog(path=None):
    """Load a catalog file; ``None`` loads the shipped default catalog."""
    if path is None:
        text = resources.files("droidensemble").joinpath("data/default_catalog.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_catalog(text)


def default_catalog():
    return load_catalog(None)


@dataclass(frozen=True)
class FeatureVector:
    bits: tuple
    sample_id: str = ""

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class LabelledSample:
    vector: FeatureVector
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise BadLabel("label must be one of %s, got %r" % (LABELS, self.label))


def vectorize(evidence, catalog, sample_id=""):
    """Binary presence vector for ``evidence`` under ``catalog``.

    Permission features need an exact match in the declared permissions;
    api and command features match as case-sensitive substrings of any DEX
    or raw string.
    """
    # keywords never contain a newline, so no match can straddle two strings
    haystack = "\n".join(sorted(evidence.dex_strings | evidence.raw_strings))
    perms = evidence.manifest_permissions
    bits = []
    for f in catalog.features:
        if f.category == "permission":
            bits.append(1 if f.keyword in perms else 0)
        else:
            bits.append(1 if f.keyword in haystack else 0)
    return FeatureVector(tuple(bits), sample_id)


class SampleMatrix:
    """Labelled binary matrix; rows are samples, columns follow ``catalog``.

    Stored as a uint8 array ``X`` (n, d) and a uint8 array ``y`` with
    1 = suspicious, 0 = benign.
    """

    def __init__(self, catalog, ids, X, y):
        X = np.ascontiguousarray(X, dtype=np.uint8)
        y = np.ascontiguousarray(y, dtype=np.uint8)
        ids = tuple(str(i) for i in ids)
        if X.ndim != 2 or X.shape != (len(ids), len(catalog)):
            raise SchemaMismatch("matrix shape %s does not match %d ids x %d features"
                                 % (X.shape, len(ids), len(catalog)))
        if y.shape != (len(ids),):
            raise SchemaMismatch("label vector has shape %s" % (y.shape,))
        if X.size and X.max() > 1:
            raise BadValue("feature cells must be 0 or 1")
        if y.size and y.max() > 1:
            raise BadLabel("labels must be 0 (benign) or 1 (suspicious)")
        if len(set(ids)) != len(ids):
            raise DuplicateSample("sample ids must be unique")
        X.setflags(write=False)
        y.setflags(write=False)
        self.catalog = catalog
        self.ids = ids
        self.X = X
        self.y = y

    @classmethod
    def from_samples(cls, catalog, samples):
        samples = list(samples)
        ids = [s.vector.sample_id for s in samples]
        X = np.array([s.vector.bits for s in samples], dtype=np.uint8).reshape(len(samples), len(catalog))
        y = np.array([s.label == SUSPICIOUS for s in samples], dtype=np.uint8)
        return cls(catalog, ids, X, y)

    def __len__(self):
        return len(self.ids)

    def __eq__(self, other):
        return (isinstance(other, SampleMatrix) and self.catalog == other.catalog
                and self.ids == other.ids and np.array_equal(self.X, other.X)
                and np.array_equal(self.y, other.y))

    def __repr__(self):
        return "SampleMatrix(%d samples x %d features, %d suspicious)" % (
            len(self), len(self.catalog), int(self.y.sum()))

    @property
    def samples(self):
        return [LabelledSample(FeatureVector(tuple(int(b) for b in row), sid),
                               SUSPICIOUS if lab else BENIGN)
                for sid, row, lab in zip(self.ids, self.X, self.y)]

    def class_counts(self):
        n_sus = int(self.y.sum())
        return n_sus, len(self) - n_sus

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        return SampleMatrix(self.catalog, [self.ids[i] for i in rows], self.X[rows], self.y[rows])


def write_matrix(m, path):
    """Write ``m`` as CSV: ``sample_id,<cat>:<keyword>...,label``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(matrix_to_csv(m))


def matrix_to_csv(m):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_id"] + [str(f) for f in m.catalog] + ["label"])
    for sid, row, lab in zip(m.ids, m.X.tolist(), m.y.tolist()):
        w.writerow([sid] + row + [SUSPICIOUS if lab else BENIGN])
    return buf.getvalue()


def read_matrix(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return matrix_from_csv(fh.read())


def matrix_from_csv(text):
    rows = csv.reader(io.StringIO(text))
    try:
        header = next(rows)
    except StopIteration:
        raise SchemaMismatch("empty matrix file") from None
    if len(header) < 3 or header[0] != "sample_id" or header[-1] != "label":
        raise SchemaMismatch("header must be sample_id,<features...>,label")
    try:
        catalog = parse_catalog("\n".join(header[1:-1]))
    except CatalogError as exc:
        raise SchemaMismatch("bad feature header: %s" % exc) from None
    d = len(catalog)
    if d != len(header) - 2:
        raise SchemaMismatch("header contains blank or comment feature cells")
    ids, bits, labels = [], [], []
    for lineno, row in enumerate(rows, 2):
        if not row:
            continue
        if len(row) != d + 2:
            raise SchemaMismatch("line %d: expected %d cells, got %d" % (lineno, d + 2, len(row)))
        cells = row[1:-1]
        for c in cells:
            if c not in ("0", "1"):
                raise BadValue("line %d: cell %r is not 0/1" % (lineno, c))
        if row[-1] not in LABELS:
            raise BadLabel("line %d: label %r" % (lineno, row[-1]))
        ids.append(row[0])
        bits.append([c == "1" for c in cells])
        labels.append(row[-1] == SUSPICIOUS)
    X = np.array(bits, dtype=np.uint8).reshape(len(ids), d)
    return SampleMatrix(catalog, ids, X, np.array(labels, dtype=np.uint8))
