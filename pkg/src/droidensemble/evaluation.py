"""Stratified k-fold cross-validation, the seven detection metrics and ROC/AUC."""
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ensemble import SCHEME_NAMES, SCHEMES, combine
from .errors import EmptyClass, TooFewSamples
from .learners import ALGORITHMS, Posterior, predict_proba, train

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
COLUMNS = ("TPR", "TNR", "FPR", "FNR", "ACC", "ERR", "AUC")
ALGO_NAMES = {"nb": "NB", "sl": "SL", "dt": "DT", "ridor": "RIDOR", "part": "PART"}
DISPLAY_NAMES = {**ALGO_NAMES, **SCHEME_NAMES}


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: tuple
    seed: int

    def test_rows(self, f):
        return np.flatnonzero(np.asarray(self.assignments) == f)

    def train_rows(self, f):
        return np.flatnonzero(np.asarray(self.assignments) != f)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn,
                               self.fp + other.fp, self.fn + other.fn)

    @classmethod
    def from_decisions(cls, y_true, y_pred):
        y_true = np.asarray(y_true, dtype=bool)
        y_pred = np.asarray(y_pred, dtype=bool)
        return cls(int((y_true & y_pred).sum()), int((~y_true & ~y_pred).sum()),
                   int((~y_true & y_pred).sum()), int((y_true & ~y_pred).sum()))


@dataclass(frozen=True)
class MetricsReport:
    tpr: float
    tnr: float
    fpr: float
    fnr: float
    acc: float
    err: float
    auc: float
    counts: ConfusionCounts
    roc: tuple = ()  # (threshold, fpr, tpr) triples
    per_fold: tuple = ()
    pooled: "MetricsReport" = field(default=None)

    @property
    def roc_points(self):
        return [(f, t) for _, f, t in self.roc]

    def row(self):
        return (self.tpr, self.tnr, self.fpr, self.fnr, self.acc, self.err, self.auc)


def make_folds(m, k=10, seed=42):
    """Stratified assignment of samples to ``k`` disjoint folds.

    Each class is shuffled with a seeded generator and dealt round-robin;
    the dealing position carries over between classes so fold sizes differ
    by at most one both overall and within each class. Needs ``k`` samples
    overall; :func:`cross_validate` further needs ``k`` per class.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    y = np.asarray(m.y)
    if len(y) < k:
        raise TooFewSamples("need at least %d samples for %d folds, have %d" % (k, k, len(y)))
    rng = np.random.default_rng(seed)
    assign = np.empty(len(y), dtype=np.int64)
    pos = 0
    for label in (1, 0):
        members = np.flatnonzero(y == label)
        members = members[rng.permutation(len(members))]
        assign[members] = (pos + np.arange(len(members))) % k
        pos = (pos + len(members)) % k
    return FoldPlan(k, tuple(int(a) for a in assign), seed)


def _labels(values):
    out = []
    for v in values:
        if isinstance(v, str):
            if v not in ("suspicious", "benign"):
                raise ValueError("unknown label %r" % v)
            out.append(v == "suspicious")
        else:
            out.append(bool(v))
    return np.array(out, dtype=bool)


def auc_rank(scores, positive):
    """Mann-Whitney AUC from mid-ranks (tied scores count one half)."""
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(positive, dtype=bool)
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EmptyClass("AUC needs both classes")
    _, inverse, counts = np.unique(s, return_inverse=True, return_counts=True)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    midrank = starts + (counts + 1) / 2.0
    rank_sum = midrank[np.asarray(inverse).reshape(-1)][pos].sum()
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_curve(scores, positive):
    """ROC vertices for thresholds +inf, every distinct score (descending), -inf.

    A sample counts as predicted positive when its score is >= the threshold.
    Returns ``[(threshold, fpr, tpr), ...]``.
    """
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(positive, dtype=bool)
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EmptyClass("ROC needs both classes")
    uniq = np.unique(s)[::-1]
    points = [(float("inf"), 0.0, 0.0)]
    for t in uniq:
        sel = s >= t
        points.append((float(t), int((sel & ~pos).sum()) / n_neg, int((sel & pos).sum()) / n_pos))
    points.append((float("-inf"), 1.0, 1.0))
    return points


def auc_trapezoid(scores, positive):
    """Trapezoidal area under the ROC built by :func:`roc_curve`, in exact counts."""
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(positive, dtype=bool)
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EmptyClass("AUC needs both classes")
    area2 = 0  # twice the area, in units of (1/n_pos) * (1/n_neg)
    prev_fp = prev_tp = 0
    for t in np.unique(s)[::-1]:
        sel = s >= t
        fp = int((sel & ~pos).sum())
        tp = int((sel & pos).sum())
        area2 += (fp - prev_fp) * (tp + prev_tp)
        prev_fp, prev_tp = fp, tp
    return area2 / (2.0 * n_pos * n_neg)


def compute_metrics(counts, scores):
    """The seven metrics for one confusion table plus its ranking scores.

    ``scores`` is a sequence of ``(score_sus, true_label)`` pairs; labels
    may be ``"suspicious"``/``"benign"`` or truthy for suspicious.
    ACC is the mean of TPR and TNR, which is what
    (TPR + TNR) / (TPR + TNR + FPR + FNR) reduces to.
    """
    c = counts
    if c.tp + c.fn < 1 or c.tn + c.fp < 1:
        raise EmptyClass("both classes must be present (tp+fn=%d, tn+fp=%d)" % (c.tp + c.fn, c.tn + c.fp))
    tpr = c.tp / (c.tp + c.fn)
    tnr = c.tn / (c.tn + c.fp)
    fpr = c.fp / (c.fp + c.tn)
    fnr = c.fn / (c.fn + c.tp)
    acc = (tpr + tnr) / 2.0
    scores = list(scores)
    if scores:
        s = [float(v) for v, _ in scores]
        lab = _labels(lab for _, lab in scores)
        auc = auc_rank(s, lab)
        roc = tuple(roc_curve(s, lab))
    else:
        auc = float("nan")
        roc = ()
    return MetricsReport(tpr, tnr, fpr, fnr, acc, 1.0 - acc, auc, c, roc)


def _mean_report(folds, pooled):
    rows = np.array([f.row() for f in folds])
    mean = rows.mean(axis=0)
    return MetricsReport(*(float(v) for v in mean), counts=pooled.counts, roc=pooled.roc,
                         per_fold=tuple(folds), pooled=pooled)


def _fold_outputs(m, plan, f, algos, schemes, seed):
    """Scores and decisions for every configuration on test fold ``f``."""
    test = plan.test_rows(f)
    train_rows = plan.train_rows(f)
    assert not np.intersect1d(test, train_rows).size, "test rows leaked into training split"
    train_m = m.subset(train_rows)
    X_test = m.X[test]
    probs = {}
    for a in algos:
        model = train(a, train_m, seed=seed)
        probs[a] = predict_proba(model, X_test)
    out = {}
    for a in algos:
        p = probs[a]
        out[a] = (p.tolist(), (p > 1.0 - p).tolist())
    committee = [a for a in ALGORITHMS if a in algos]
    for scheme in schemes:
        scores, decisions = [], []
        for i in range(len(test)):
            ps = [Posterior.from_sus(probs[a][i]) for a in committee]
            v = combine(ps, scheme)
            scores.append(v.score_sus)
            decisions.append(v.decision == "suspicious")
        out[scheme] = (scores, decisions)
    return test.tolist(), out


def _run_fold(args):
    return _fold_outputs(*args)


def cross_validate(m, algos=ALGORITHMS, schemes=SCHEMES, k=10, seed=42, workers=1):
    """Evaluate base learners and combination schemes by stratified k-fold CV.

    Returns an ordered dict ``config -> MetricsReport`` (base learners in
    committee order, then schemes). Headline metrics are unweighted means
    of the per-fold metrics; ``report.pooled`` holds metrics from the
    summed confusion counts and pooled scores. Results do not depend on
    ``workers``.
    """
    algos = [a for a in ALGORITHMS if a in set(algos)]
    schemes = [s for s in SCHEMES if s in set(schemes)]
    if schemes and not algos:
        raise ValueError("combination schemes need at least one base learner")
    n_sus, n_ben = m.class_counts()
    if n_sus < k or n_ben < k:
        # every test fold must hold both classes for its per-fold metrics
        raise TooFewSamples("need at least %d samples per class, have %d suspicious / %d benign"
                            % (k, n_sus, n_ben))
    plan = make_folds(m, k, seed)
    jobs = [(m, plan, f, algos, schemes, seed) for f in range(k)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_fold, jobs))
    else:
        results = [_run_fold(j) for j in jobs]

    y = np.asarray(m.y, dtype=bool)
    reports = {}
    for config in algos + schemes:
        folds = []
        pooled_counts = ConfusionCounts(0, 0, 0, 0)
        pooled_scores = []
        for test, out in results:
            scores, decisions = out[config]
            truth = y[test]
            c = ConfusionCounts.from_decisions(truth, decisions)
            pairs = list(zip(scores, truth.tolist()))
            folds.append(compute_metrics(c, pairs))
            pooled_counts = pooled_counts + c
            pooled_scores.extend(pairs)
        pooled = compute_metrics(pooled_counts, pooled_scores)
        reports[config] = _mean_report(folds, pooled)
    return reports


# --- report files ------------------------------------------------------------

def _metrics_doc(r):
    return {"TPR": r.tpr, "TNR": r.tnr, "FPR": r.fpr, "FNR": r.fnr,
            "ACC": r.acc, "ERR": r.err, "AUC": r.auc}


def _counts_doc(c):
    return {"tp": c.tp, "tn": c.tn, "fp": c.fp, "fn": c.fn}


def _float(v):
    if v == float("inf"):
        return "inf"
    if v == float("-inf"):
        return "-inf"
    return v


def report_to_dict(reports, meta=None):
    configs = []
    for key, r in reports.items():
        doc = {
            "key": key,
            "name": DISPLAY_NAMES.get(key, key),
            "kind": "scheme" if key in SCHEME_NAMES else "base",
            "metrics": _metrics_doc(r),
            "counts": _counts_doc(r.counts),
            "roc": [[_float(t), f, p] for t, f, p in r.roc],
            "per_fold": [{"metrics": _metrics_doc(f), "counts": _counts_doc(f.counts)} for f in r.per_fold],
        }
        if r.pooled is not None:
            doc["pooled"] = {"metrics": _metrics_doc(r.pooled), "counts": _counts_doc(r.pooled.counts)}
        configs.append(doc)
    return {"schema_version": REPORT_SCHEMA_VERSION, "columns": list(COLUMNS),
            "meta": dict(meta or {}), "configurations": configs}


def _report_from_doc(doc, roc=(), per_fold=(), pooled=None):
    m = doc["metrics"]
    c = ConfusionCounts(**doc["counts"])
    return MetricsReport(m["TPR"], m["TNR"], m["FPR"], m["FNR"], m["ACC"], m["ERR"], m["AUC"],
                         c, tuple(roc), tuple(per_fold), pooled)


def report_from_dict(doc):
    if doc.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValueError("unsupported report schema_version %r" % doc.get("schema_version"))
    out = {}
    for cfg in doc["configurations"]:
        roc = [(float(t), f, p) for t, f, p in cfg.get("roc", [])]
        folds = [_report_from_doc(f) for f in cfg.get("per_fold", [])]
        pooled = _report_from_doc(cfg["pooled"]) if "pooled" in cfg else None
        out[cfg["key"]] = _report_from_doc(cfg, roc, folds, pooled)
    return out


def roc_dir_for(path):
    p = Path(path)
    return p.with_name(p.stem + "_roc")


def write_report(reports, path, meta=None):
    """Write the JSON report plus one ``threshold,fpr,tpr`` CSV per configuration.

    ROC files go to ``<report stem>_roc/<config>.csv`` beside the report.
    """
    doc = report_to_dict(reports, meta)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1, allow_nan=True)  # insertion order keeps the column order
        fh.write("\n")
    roc_dir = roc_dir_for(path)
    if reports:
        os.makedirs(roc_dir, exist_ok=True)
    for key, r in reports.items():
        with open(roc_dir / ("%s.csv" % key), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("threshold,fpr,tpr\n")
            for t, f, p in r.roc:
                fh.write("%r,%r,%r\n" % (t, f, p))


def read_report(path):
    with open(path, encoding="utf-8") as fh:
        return report_from_dict(json.load(fh))


def format_tables(reports, decimals=3):
    """Render base learners and combination schemes as two fixed-width tables."""
    lines = []
    groups = [("Individual classifiers", [k for k in reports if k not in SCHEME_NAMES]),
              ("Combination schemes", [k for k in reports if k in SCHEME_NAMES])]
    for title, keys in groups:
        if not keys:
            continue
        lines.append(title)
        lines.append("%-10s" % "" + "".join("%8s" % c for c in COLUMNS))
        for k in keys:
            row = reports[k].row()
            lines.append("%-10s" % DISPLAY_NAMES.get(k, k) + "".join("%8.*f" % (decimals, v) for v in row))
        lines.append("")
    return "\n".join(lines)

