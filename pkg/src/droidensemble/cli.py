"""Command-line front end: extract, train, classify, evaluate.

Exit codes: 0 success, 1 usage, 2 no input, 3 data error, 4 version mismatch.
Logs go to stderr; data goes to the named files or stdout.
"""
import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import SCHEMES, combine
from .errors import ApkError, CatalogError, DroidEnsembleError, LearnerError, MatrixError, SchemaMismatch
from .evaluation import cross_validate, format_tables, write_report
from .features import (LABELS, SampleMatrix, load_catalog, read_matrix, vectorize, write_matrix)
from .ingest import collect_evidence, open_package
from .learners import ALGORITHMS, Posterior, load_model, predict_proba, save_model, train

log = logging.getLogger("droidensemble")

EXIT_OK, EXIT_USAGE, EXIT_NO_INPUT, EXIT_DATA, EXIT_VERSION = 0, 1, 2, 3, 4
MODEL_SUFFIX = ".model.json"
CATALOG_NAME = "catalog.txt"


class UsageError(Exception):
    pass


class VersionMismatch(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _load_catalog_arg(path):
    if path is not None and not os.path.isfile(path):
        raise UsageError("catalog file not found: %s" % path)
    return load_catalog(path)


def _read_matrix_arg(path):
    if not os.path.isfile(path):
        raise UsageError("matrix file not found: %s" % path)
    return read_matrix(path)


# --- extract -------------------------------------------------------------------

def _extract_one(args):
    path, rel, min_len, catalog = args
    try:
        pkg = open_package(path)
        evidence = collect_evidence(pkg, min_len)
    except (ApkError, OSError) as exc:
        return rel, None, None, str(exc)
    vec = vectorize(evidence, catalog, rel)
    return rel, pkg.sha256, vec.bits, None


def _read_labels(path):
    if not os.path.isfile(path):
        raise UsageError("labels file not found: %s" % path)
    labels = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            sid, lab = row.get("sample_id"), row.get("label")
            if sid is None or lab is None:
                raise MatrixError("labels file needs sample_id,label columns")
            if lab not in LABELS:
                raise MatrixError("label %r for %s is not one of %s" % (lab, sid, LABELS))
            labels[sid] = lab
    return labels


def cmd_extract(ns):
    catalog = _load_catalog_arg(ns.catalog)
    if not os.path.isdir(ns.apk_dir):
        raise UsageError("not a directory: %s" % ns.apk_dir)
    if ns.min_len < 1:
        raise UsageError("--min-len must be >= 1")
    labels = _read_labels(ns.labels) if ns.labels else None
    if labels is None:
        log.warning("no labels file given; every sample labelled 'benign' as a placeholder")
    root = Path(ns.apk_dir)
    files = sorted(p for p in root.rglob("*") if p.is_file())
    jobs = [(str(p), p.relative_to(root).as_posix(), ns.min_len, catalog) for p in files]
    if ns.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=ns.workers) as ex:
            results = list(ex.map(_extract_one, jobs, chunksize=8))
    else:
        results = [_extract_one(j) for j in jobs]

    ids, rows, ys = [], [], []
    for rel, sha, bits, err in results:
        if err is not None:
            log.warning("skipping %s: %s", rel, err)
            continue
        if labels is None:
            label = "benign"
        else:
            label = labels.get(rel, labels.get(sha))
            if label is None:
                log.warning("skipping %s: no label in %s", rel, ns.labels)
                continue
        ids.append(rel)
        rows.append(bits)
        ys.append(label == "suspicious")
    if not ids:
        print("no packages parsed", file=sys.stderr)
        return EXIT_NO_INPUT
    m = SampleMatrix(catalog, ids, np.array(rows, dtype=np.uint8), np.array(ys, dtype=np.uint8))
    write_matrix(m, ns.out)
    log.info("wrote %d of %d packages to %s", len(ids), len(files), ns.out)
    return EXIT_OK


# --- train ---------------------------------------------------------------------

def cmd_train(ns):
    m = _read_matrix_arg(ns.matrix)
    algos = ALGORITHMS if ns.algo == "all" else (ns.algo,)
    os.makedirs(ns.out_dir, exist_ok=True)
    with open(os.path.join(ns.out_dir, CATALOG_NAME), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(m.catalog.to_text())
    for a in algos:
        model = train(a, m, seed=ns.seed)
        save_model(model, os.path.join(ns.out_dir, a + MODEL_SUFFIX))
        print("%s: %s" % (a, model.summary()))
    return EXIT_OK


# --- classify ------------------------------------------------------------------

def _load_models(model_dir):
    models = []
    for a in ALGORITHMS:
        path = os.path.join(model_dir, a + MODEL_SUFFIX)
        if os.path.isfile(path):
            models.append(load_model(path))
    return models


def _inputs_for_classify(ns, models):
    """Return ``(ids, X, catalog_version)`` for the classify input."""
    src = ns.input
    if os.path.isfile(src) and src.endswith(".csv"):
        m = read_matrix(src)
        return list(m.ids), m.X, m.catalog.version
    catalog_path = ns.catalog
    if catalog_path is None:
        candidate = os.path.join(ns.model_dir, CATALOG_NAME)
        catalog_path = candidate if os.path.isfile(candidate) else None
    catalog = _load_catalog_arg(catalog_path)
    if os.path.isdir(src):
        root = Path(src)
        files = [(str(p), p.relative_to(root).as_posix()) for p in sorted(root.rglob("*")) if p.is_file()]
    elif os.path.isfile(src):
        files = [(src, os.path.basename(src))]
    else:
        raise UsageError("input not found: %s" % src)
    ids, rows = [], []
    for path, rel in files:
        rel_, _, bits, err = _extract_one((path, rel, ns.min_len, catalog))
        if err is not None:
            log.warning("skipping %s: %s", rel, err)
            continue
        ids.append(rel_)
        rows.append(bits)
    X = np.array(rows, dtype=np.uint8).reshape(len(ids), len(catalog))
    return ids, X, catalog.version


def cmd_classify(ns):
    if not os.path.isdir(ns.model_dir):
        raise UsageError("model directory not found: %s" % ns.model_dir)
    models = _load_models(ns.model_dir)
    if not models:
        print("no models found in %s" % ns.model_dir, file=sys.stderr)
        return EXIT_NO_INPUT
    versions = {m.catalog_version for m in models}
    if len(versions) != 1:
        raise VersionMismatch("models were trained under different catalogs: %s" % sorted(versions))
    ids, X, version = _inputs_for_classify(ns, models)
    if version not in versions:
        raise VersionMismatch("input catalog version %s does not match model catalog version %s"
                              % (version, versions.pop()))
    if not ids:
        print("no packages parsed", file=sys.stderr)
        return EXIT_NO_INPUT
    probs = [predict_proba(m, X) for m in models]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["sample_id", "verdict", "score_sus"] + ["p_" + m.algorithm for m in models])
    for i, sid in enumerate(ids):
        ps = [Posterior.from_sus(p[i]) for p in probs]
        v = combine(ps, ns.scheme)
        w.writerow([sid, v.decision, repr(v.score_sus)] + [repr(p.p_sus) for p in ps])
    return EXIT_OK


# --- evaluate ------------------------------------------------------------------

def cmd_evaluate(ns):
    if ns.folds < 2:
        raise UsageError("--folds must be at least 2")
    m = _read_matrix_arg(ns.matrix)
    reports = cross_validate(m, ns.algos, ns.schemes, k=ns.folds, seed=ns.seed, workers=ns.workers)
    meta = {"k": ns.folds, "seed": ns.seed, "n_samples": len(m),
            "n_features": len(m.catalog), "catalog_version": m.catalog.version}
    write_report(reports, ns.report, meta)
    print(format_tables(reports))
    return EXIT_OK


# --- make-corpus ---------------------------------------------------------------

def cmd_make_corpus(ns):
    from .synth import apk_corpus
    os.makedirs(ns.out_dir, exist_ok=True)
    rows = []
    for name, data, label in apk_corpus(ns.n, ns.seed):
        with open(os.path.join(ns.out_dir, name), "wb") as fh:
            fh.write(data)
        rows.append((name, label))
    with open(ns.labels, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "label"])
        w.writerows(rows)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="droidensemble", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("extract", help="build a labelled feature matrix from a directory of APKs")
    e.add_argument("apk_dir")
    e.add_argument("--out", required=True, help="matrix CSV to write")
    e.add_argument("--catalog", help="feature catalog file (default: shipped catalog)")
    e.add_argument("--labels", help="CSV with sample_id,label (sample_id = relative path or sha256)")
    e.add_argument("--min-len", type=int, default=4, help="minimum printable run length")
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_extract)

    t = sub.add_parser("train", help="train base classifiers on a matrix")
    t.add_argument("matrix")
    t.add_argument("--algo", choices=ALGORITHMS + ("all",), default="all")
    t.add_argument("--out-dir", required=True)
    t.add_argument("--seed", type=int, default=42)
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("classify", help="classify APKs or matrix rows with trained models")
    c.add_argument("model_dir")
    c.add_argument("input", help="an APK, a directory of APKs, or a matrix .csv")
    c.add_argument("--scheme", choices=SCHEMES, default="prod")
    c.add_argument("--catalog", help="catalog for APK input (default: model_dir/catalog.txt)")
    c.add_argument("--min-len", type=int, default=4)
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("evaluate", help="stratified k-fold evaluation of learners and schemes")
    v.add_argument("matrix")
    v.add_argument("--report", required=True, help="JSON report path; ROC CSVs go beside it")
    v.add_argument("--folds", type=int, default=10)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--algos", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    v.add_argument("--schemes", nargs="*", choices=SCHEMES, default=list(SCHEMES))
    v.set_defaults(func=cmd_evaluate)

    g = sub.add_parser("make-corpus", help="write a synthetic mini-APK corpus and its labels")
    g.add_argument("out_dir")
    g.add_argument("--labels", required=True)
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_make_corpus)
    return p


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return ns.func(ns)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except VersionMismatch as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VERSION
    except (CatalogError, MatrixError, SchemaMismatch, LearnerError, DroidEnsembleError) as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        # downstream closed early (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
