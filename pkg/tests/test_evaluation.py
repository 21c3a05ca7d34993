import json

import numpy as np
import pytest

from droidensemble import evaluation, synth
from droidensemble.errors import EmptyClass, TooFewSamples
from droidensemble.evaluation import (COLUMNS, ConfusionCounts, auc_rank, auc_trapezoid, compute_metrics,
                                      cross_validate, format_tables, make_folds, read_report, report_from_dict,
                                      report_to_dict, roc_curve, write_report)
from droidensemble.features import SampleMatrix

import helpers


def counts_for(tpr, tnr, n=1000):
    tp, tn = round(tpr * n), round(tnr * n)
    return ConfusionCounts(tp, tn, n - tn, n - tp)


def labelled(n_sus, n_ben, d=3, seed=0):
    rng = np.random.default_rng(seed)
    n = n_sus + n_ben
    y = np.array([1] * n_sus + [0] * n_ben, dtype=np.uint8)
    return SampleMatrix(synth.synthetic_catalog(d), ["s%05d" % i for i in range(n)],
                        rng.integers(0, 2, size=(n, d), dtype=np.uint8), y)


# --- folds -------------------------------------------------------------------------

def test_full_scale_fold_sizes():
    plan = make_folds(labelled(3000, 3863), k=10, seed=42)
    sizes = sorted((len(plan.test_rows(f)) for f in range(10)), reverse=True)
    assert sizes == [687] * 3 + [686] * 7


def test_ten_samples_ten_folds():
    plan = make_folds(labelled(5, 5), k=10, seed=1)
    assert [len(plan.test_rows(f)) for f in range(10)] == [1] * 10


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        make_folds(labelled(5, 4), k=10)
    with pytest.raises(TooFewSamples):
        cross_validate(labelled(5, 5), k=10)  # a test fold would hold one class only


@pytest.mark.parametrize("seed", range(8))
def test_fold_plan_properties(seed):
    rng = np.random.default_rng(seed)
    n_sus, n_ben = int(rng.integers(10, 60)), int(rng.integers(10, 60))
    k = int(rng.integers(2, 11))
    m = labelled(n_sus, n_ben, seed=seed)
    plan = make_folds(m, k, seed)
    tests = [set(plan.test_rows(f).tolist()) for f in range(k)]
    assert set().union(*tests) == set(range(len(m)))
    assert sum(len(t) for t in tests) == len(m)
    sizes = [len(t) for t in tests]
    assert max(sizes) - min(sizes) <= 1
    for label in (0, 1):
        per = [sum(1 for i in t if m.y[i] == label) for t in tests]
        assert max(per) - min(per) <= 1
    for f in range(k):
        assert not set(plan.train_rows(f).tolist()) & tests[f]
    assert make_folds(m, k, seed) == plan


# --- metrics -----------------------------------------------------------------------

@pytest.mark.parametrize("tpr,tnr,acc", [(0.821, 0.913, 0.867), (0.909, 0.954, 0.932)])
def test_published_rows(tpr, tnr, acc):
    r = compute_metrics(counts_for(tpr, tnr), [])
    assert r.acc == pytest.approx(acc, abs=0.0005 + 1e-12)
    assert r.err == pytest.approx(1 - acc, abs=0.0005 + 1e-12)


def test_perfect_classifier():
    scores = [(0.9, "suspicious")] * 10 + [(0.1, "benign")] * 10
    r = compute_metrics(ConfusionCounts(10, 10, 0, 0), scores)
    assert (r.tpr, r.tnr, r.acc, r.auc) == (1.0, 1.0, 1.0, 1.0)


def test_identical_scores_half_auc():
    scores = [(0.3, True)] * 4 + [(0.3, False)] * 6
    assert compute_metrics(ConfusionCounts(4, 0, 6, 0), scores).auc == 0.5


def test_empty_class():
    with pytest.raises(EmptyClass):
        compute_metrics(ConfusionCounts(3, 0, 0, 1), [])


def test_metric_identities():
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = ConfusionCounts(*(int(v) for v in rng.integers(0, 50, 4)))
        if c.tp + c.fn == 0 or c.tn + c.fp == 0:
            continue
        r = compute_metrics(c, [])
        assert abs(r.tpr + r.fnr - 1) <= 1e-12 and abs(r.tnr + r.fpr - 1) <= 1e-12
        assert abs(r.acc - (r.tpr + r.tnr) / 2) <= 1e-12 and abs(r.err - (1 - r.acc)) <= 1e-12


def test_auc_methods_agree_with_pairwise_oracle():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(2, 40))
        s = np.round(rng.random(n), 1)
        pos = rng.random(n) < 0.5
        pos[0], pos[1] = True, False
        want = helpers.mann_whitney(s.tolist(), pos.tolist())
        assert abs(auc_rank(s, pos) - want) <= 1e-12
        assert abs(auc_trapezoid(s, pos) - want) <= 1e-12


def test_roc_curve_shape():
    pts = roc_curve([0.9, 0.8, 0.8, 0.1], [True, False, True, False])
    assert pts[0] == (float("inf"), 0.0, 0.0) and pts[-1] == (float("-inf"), 1.0, 1.0)
    assert pts[1:-1] == [(0.9, 0.0, 0.5), (0.8, 0.5, 1.0), (0.1, 1.0, 1.0)]


# --- cross-validation --------------------------------------------------------------

def trivial_matrix():
    X = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=np.uint8)
    return SampleMatrix(synth.synthetic_catalog(2), ["a", "b", "c", "d"], X, np.array([1, 1, 0, 0], dtype=np.uint8))


def test_two_fold_trivial():
    reports = cross_validate(trivial_matrix(), algos=["nb", "dt"], schemes=["avg"], k=2, seed=0)
    assert list(reports) == ["nb", "dt", "avg"]
    for r in reports.values():
        assert len(r.per_fold) == 2
    assert reports["nb"].acc == 1.0 and reports["avg"].acc == 1.0


def test_rule_generated_corpus():
    m = synth.decision_list_corpus(seed=3, max_literals=1)[0]
    reports = cross_validate(m, k=10, seed=42)
    for algo in ("nb", "sl", "dt", "ridor", "part"):
        assert reports[algo].acc >= 0.9, algo
    assert reports["prod"].acc >= 0.95


def test_headline_is_fold_mean():
    m = synth.decision_list_corpus(seed=1)[0]
    r = cross_validate(m, algos=["dt"], schemes=[], k=5, seed=7)["dt"]
    assert r.acc == pytest.approx(np.mean([f.acc for f in r.per_fold]), abs=1e-15)
    assert r.pooled.counts == r.counts
    assert sum(f.counts.tp + f.counts.fn + f.counts.tn + f.counts.fp for f in r.per_fold) == len(m)


def test_no_training_on_test_rows(monkeypatch):
    m = synth.decision_list_corpus(seed=2)[0]
    seen = []
    real_train = evaluation.train

    def spy(algo, train_m, seed=0):
        seen.append(set(train_m.ids))
        return real_train(algo, train_m, seed=seed)

    monkeypatch.setattr(evaluation, "train", spy)
    cross_validate(m, algos=["nb"], schemes=[], k=5, seed=3)
    plan = make_folds(m, 5, 3)
    assert len(seen) == 5
    for f, ids in enumerate(seen):
        test_ids = {m.ids[i] for i in plan.test_rows(f)}
        assert not ids & test_ids and len(ids) + len(test_ids) == len(m)


def test_cross_validate_deterministic_and_worker_independent(tmp_path):
    m = synth.decision_list_corpus(seed=4)[0]
    a = cross_validate(m, k=4, seed=5)
    b = cross_validate(m, k=4, seed=5, workers=2)
    write_report(a, tmp_path / "a.json")
    write_report(b, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


# --- reports -----------------------------------------------------------------------

def test_report_layout_and_round_trip(tmp_path):
    m = synth.decision_list_corpus(seed=0)[0]
    reports = cross_validate(m, k=3, seed=1)
    path = tmp_path / "r.json"
    write_report(reports, path, {"k": 3})
    doc = json.loads(path.read_text())
    assert doc["columns"] == list(COLUMNS)
    assert len(doc["configurations"]) == 9
    assert all(list(c["metrics"]) == list(COLUMNS) for c in doc["configurations"])
    back = read_report(path)
    assert list(back) == list(reports)
    for key in reports:
        np.testing.assert_allclose(back[key].row(), reports[key].row(), atol=1e-9)
        assert back[key].counts == reports[key].counts
        assert len(back[key].roc) == len(reports[key].roc)
    roc_files = sorted(p.name for p in (tmp_path / "r_roc").iterdir())
    assert roc_files == sorted(k + ".csv" for k in reports)
    assert (tmp_path / "r_roc" / "prod.csv").read_text().splitlines()[0] == "threshold,fpr,tpr"


def test_empty_report(tmp_path):
    path = tmp_path / "e.json"
    write_report({}, path)
    doc = json.loads(path.read_text())
    assert doc["configurations"] == [] and doc["columns"] == list(COLUMNS)
    assert report_from_dict(report_to_dict({})) == {}


def test_tables_have_both_sections():
    m = synth.decision_list_corpus(seed=0)[0]
    text = format_tables(cross_validate(m, k=3, seed=1))
    assert text.index("NB") < text.index("AvgProb")
    header = [line for line in text.splitlines() if "TPR" in line][0].split()
    assert header == list(COLUMNS)
