import csv
import io
import json
import subprocess
import sys

import pytest

from droidensemble import synth
from droidensemble.cli import main
from droidensemble.features import read_matrix

FIXTURES = [
    ("evil.apk", synth.mini_apk(["getDeviceId", "DexClassLoader"], ["chmod", "/system/bin/sh"],
                                ["SEND_SMS", "INTERNET"]), "suspicious"),
    ("plain.apk", synth.mini_apk(["getCallState"], [], ["INTERNET"]), "benign"),
    ("sub/other.apk", synth.mini_apk([], ["jar"], ["CAMERA"]), "benign"),
]


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert main(["make-corpus", str(root / "apks"), "--labels", str(root / "labels.csv"), "--n", "80"]) == 0
    assert main(["extract", str(root / "apks"), "--labels", str(root / "labels.csv"),
                 "--out", str(root / "m.csv")]) == 0
    assert main(["train", str(root / "m.csv"), "--out-dir", str(root / "models")]) == 0
    return root


def write_fixtures(d):
    (d / "sub").mkdir(parents=True)
    rows = ["sample_id,label"]
    for name, data, label in FIXTURES:
        (d / name).write_bytes(data)
        rows.append("%s,%s" % (name, label))
    labels = d.parent / (d.name + "_labels.csv")
    labels.write_text("\n".join(rows) + "\n")
    return labels


def test_extract_three_fixtures(tmp_path):
    labels = write_fixtures(tmp_path / "apks")
    out = tmp_path / "m.csv"
    assert main(["extract", str(tmp_path / "apks"), "--labels", str(labels), "--out", str(out)]) == 0
    m = read_matrix(out)
    assert list(m.ids) == ["evil.apk", "plain.apk", "sub/other.apk"]
    assert m.y.tolist() == [1, 0, 0]


def test_extract_labels_by_sha256(tmp_path):
    import hashlib
    d = tmp_path / "apks"
    d.mkdir()
    data = FIXTURES[0][1]
    (d / "x.apk").write_bytes(data)
    (tmp_path / "l.csv").write_text("sample_id,label\n%s,suspicious\n" % hashlib.sha256(data).hexdigest())
    assert main(["extract", str(d), "--labels", str(tmp_path / "l.csv"), "--out", str(tmp_path / "m.csv")]) == 0
    assert read_matrix(tmp_path / "m.csv").y.tolist() == [1]


def test_extract_skips_bad_files(tmp_path, caplog):
    d = tmp_path / "apks"
    d.mkdir()
    (d / "good.apk").write_bytes(FIXTURES[1][1])
    (d / "bad.apk").write_text("not a zip")
    assert main(["extract", str(d), "--out", str(tmp_path / "m.csv")]) == 0
    assert list(read_matrix(tmp_path / "m.csv").ids) == ["good.apk"]
    assert "bad.apk" in caplog.text


def test_extract_empty_dir(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert main(["extract", str(tmp_path / "empty"), "--out", str(tmp_path / "m.csv")]) == 2
    assert "no packages parsed" in capsys.readouterr().err


def test_extract_missing_catalog(tmp_path):
    write_fixtures(tmp_path / "apks")
    assert main(["extract", str(tmp_path / "apks"), "--catalog", str(tmp_path / "nope.txt"),
                 "--out", str(tmp_path / "m.csv")]) == 1


def test_extract_workers_identical(tmp_path):
    labels = write_fixtures(tmp_path / "apks")
    for w in ("1", "3"):
        assert main(["extract", str(tmp_path / "apks"), "--labels", str(labels), "--workers", w,
                     "--out", str(tmp_path / ("m%s.csv" % w))]) == 0
    assert (tmp_path / "m1.csv").read_bytes() == (tmp_path / "m3.csv").read_bytes()


def test_train_part_summary(corpus, tmp_path, capsys):
    assert main(["train", str(corpus / "m.csv"), "--algo", "part", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("part: rules: ")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["catalog.txt", "part.model.json"]


def test_train_all_writes_five(corpus):
    names = sorted(p.name for p in (corpus / "models").iterdir() if p.name.endswith(".model.json"))
    assert names == sorted(a + ".model.json" for a in ("nb", "sl", "dt", "ridor", "part"))


def test_train_single_class(tmp_path):
    (tmp_path / "m.csv").write_text("sample_id,api:getDeviceId,label\na,1,benign\nb,0,benign\n")
    assert main(["train", str(tmp_path / "m.csv"), "--out-dir", str(tmp_path / "o")]) == 3


def test_train_bad_matrix(tmp_path):
    (tmp_path / "m.csv").write_text("sample_id,api:getDeviceId,label\na,7,benign\n")
    assert main(["train", str(tmp_path / "m.csv"), "--out-dir", str(tmp_path / "o")]) == 3


def classify(args, capsys):
    code = main(["classify"] + args)
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    return code, rows


def test_classify_planted_apk(corpus, tmp_path, capsys):
    apk = tmp_path / "evil.apk"
    apk.write_bytes(FIXTURES[0][1])
    code, rows = classify([str(corpus / "models"), str(apk)], capsys)
    assert code == 0 and len(rows) == 1
    r = rows[0]
    assert r["sample_id"] == "evil.apk" and r["verdict"] == "suspicious"
    assert list(r) == ["sample_id", "verdict", "score_sus", "p_nb", "p_sl", "p_dt", "p_ridor", "p_part"]


def test_classify_zero_vector_is_benign(corpus, tmp_path, capsys):
    apk = tmp_path / "blank.apk"
    apk.write_bytes(synth.mini_apk())
    for scheme in ("avg", "prod", "max", "vote"):
        code, rows = classify([str(corpus / "models"), str(apk), "--scheme", scheme], capsys)
        assert code == 0 and rows[0]["verdict"] == "benign"


def test_classify_matrix_input(corpus, capsys):
    code, rows = classify([str(corpus / "models"), str(corpus / "m.csv")], capsys)
    assert code == 0 and len(rows) == 80


def test_classify_version_mismatch(corpus, tmp_path, capsys):
    other = tmp_path / "cat.txt"
    other.write_text("api:getDeviceId\ncmd:chmod\nperm:SEND_SMS\n")
    apk = tmp_path / "a.apk"
    apk.write_bytes(FIXTURES[0][1])
    code, _ = classify([str(corpus / "models"), str(apk), "--catalog", str(other)], capsys)
    assert code == 4


def test_classify_no_models(tmp_path, capsys):
    (tmp_path / "models").mkdir()
    code, _ = classify([str(tmp_path / "models"), str(tmp_path)], capsys)
    assert code == 2


def test_evaluate_report(corpus, tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["evaluate", str(corpus / "m.csv"), "--folds", "5", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert out.index("NB") < out.index("ProdProb")
    doc = json.loads(report.read_text())
    assert [c["name"] for c in doc["configurations"]] == ["NB", "SL", "DT", "RIDOR", "PART",
                                                          "AvgProb", "ProdProb", "MaxProb", "MVote"]
    assert doc["meta"]["k"] == 5


def test_evaluate_one_fold_is_usage_error(corpus, tmp_path):
    assert main(["evaluate", str(corpus / "m.csv"), "--folds", "1", "--report", str(tmp_path / "r.json")]) == 1


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["train"])
    assert e.value.code == 1


def test_inputs_not_mutated(corpus, tmp_path):
    before = (corpus / "m.csv").read_bytes()
    main(["evaluate", str(corpus / "m.csv"), "--folds", "3", "--report", str(tmp_path / "r.json")])
    assert (corpus / "m.csv").read_bytes() == before


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "droidensemble.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
