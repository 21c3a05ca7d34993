"""Fixture builders and independent oracles shared by the unit and acceptance tests."""
import struct
import time
import zipfile
from fractions import Fraction
from itertools import product

import numpy as np

from droidensemble import synth
from droidensemble.errors import DroidEnsembleError
from droidensemble.ingest import collect_evidence, read_package
from droidensemble.ingest.axml import parse_manifest
from droidensemble.ingest.dex import dex_strings

DEX_PLANTED = ["getDeviceId", "Lfoo/Bar;", "chmod", "é\x00NUL", "\U0001F600", "<init>", ""]
PERM_PLANTED = ["android.permission.SEND_SMS", "android.permission.INTERNET",
                "android.permission.CAMERA", "com.vendor.permission.PUSH"]


def dex_fixtures():
    return [
        (DEX_PLANTED, synth.build_dex(DEX_PLANTED)),
        (["a"], synth.build_dex(["a"], version=b"039")),
        ([], synth.build_dex([])),
        (["x%03d" % i for i in range(200)], synth.build_dex(["x%03d" % i for i in range(200)])),
    ]


def axml_fixtures():
    return [
        (set(PERM_PLANTED), synth.build_axml(PERM_PLANTED)),
        (set(PERM_PLANTED[:2]), synth.build_axml(PERM_PLANTED[:2], utf8=True)),
        (set(), synth.build_axml([])),
        ({PERM_PLANTED[0]}, synth.build_axml([PERM_PLANTED[0]], extra_elements=("application", "activity"))),
    ]


def apk_fixtures():
    out = []
    for comp in (zipfile.ZIP_STORED, zipfile.ZIP_DEFLATED):
        out.append(synth.mini_apk(["getDeviceId"], ["chmod"], ["SEND_SMS", "INTERNET"],
                                  filler=synth.FILLER, compression=comp))
    return out


def chunk_offsets(axml, chunk_type):
    """Offsets of every top-level child chunk of the given type."""
    out = []
    pos = struct.unpack_from("<H", axml, 2)[0]
    while pos + 8 <= len(axml):
        t, _, size = struct.unpack_from("<HHI", axml, pos)
        if t == chunk_type:
            out.append(pos)
        if size < 8:
            break
        pos += size
    return out


def mutate(data, rng):
    buf = bytearray(data)
    i = int(rng.integers(len(buf)))
    buf[i] = (buf[i] + int(rng.integers(1, 256))) & 0xFF
    return bytes(buf)


def fuzz(n, seed=0):
    """Apply ``n`` seeded single-byte mutations across all fixtures.

    Returns ``(crashes, slowest_seconds, outcomes)`` where crashes lists
    ``(kind, exception repr)`` for anything other than a result or a
    library error.
    """
    rng = np.random.default_rng(seed)
    targets = ([("dex", d) for _, d in dex_fixtures()] + [("axml", a) for _, a in axml_fixtures()]
               + [("apk", a) for a in apk_fixtures()])
    crashes, slowest = [], 0.0
    outcomes = {"result": 0, "error": 0}
    for i in range(n):
        kind, data = targets[i % len(targets)]
        m = mutate(data, rng)
        t0 = time.perf_counter()
        try:
            if kind == "dex":
                dex_strings(m, "fuzz.dex", [])
            elif kind == "axml":
                parse_manifest(m)
            else:
                collect_evidence(read_package(m, "fuzz.apk"))
            outcomes["result"] += 1
        except DroidEnsembleError:
            outcomes["error"] += 1
        except Exception as exc:  # anything else is a crash
            crashes.append((kind, repr(exc)))
        slowest = max(slowest, time.perf_counter() - t0)
    return crashes, slowest, outcomes


# --- naive Bayes oracle ------------------------------------------------------------

def nb_oracle(X, y, v):
    """P(suspicious | v) from the textbook Bernoulli formula in exact rationals."""
    X = [list(map(int, r)) for r in X]
    y = [int(t) for t in y]
    n = len(y)
    joint = {}
    for c in (1, 0):
        rows = [r for r, t in zip(X, y) if t == c]
        p = Fraction(len(rows), n)
        for j, bit in enumerate(v):
            ones = sum(r[j] for r in rows)
            p1 = Fraction(ones + 1, len(rows) + 2)
            p *= p1 if bit else 1 - p1
        joint[c] = p
    return joint[1] / (joint[1] + joint[0])


def nb_oracle_all(X, y):
    """The same posterior for every vector of ``all_vectors(d)``, by integer cross-multiplication.

    With n_c class members and o_cj ones, the class-c joint is
    n_c/n * prod_j a_cj/(n_c+2) where a_cj = o_cj+1 or n_c-o_cj+1. Scaling both
    joints by n * (n_0+2)^d * (n_1+2)^d leaves integers, and int/int division
    rounds correctly, so the result is the exactly rounded posterior.
    """
    X = [list(map(int, r)) for r in X]
    y = [int(t) for t in y]
    d = len(X[0]) if X else 0
    stats = {}
    for c in (1, 0):
        rows = [r for r, t in zip(X, y) if t == c]
        stats[c] = (len(rows), [sum(r[j] for r in rows) for j in range(d)])
    (n1, o1), (n0, o0) = stats[1], stats[0]
    out = []
    for v in product((0, 1), repeat=d):
        a1 = n1 * (n0 + 2) ** d
        a0 = n0 * (n1 + 2) ** d
        for j, bit in enumerate(v):
            a1 *= (o1[j] + 1) if bit else (n1 - o1[j] + 1)
            a0 *= (o0[j] + 1) if bit else (n0 - o0[j] + 1)
        out.append(a1 / (a1 + a0))
    return out


def all_vectors(d):
    return np.array(list(product((0, 1), repeat=d)), dtype=np.uint8).reshape(2 ** d, d)


def tiny_datasets(max_features=3, max_samples=6):
    """Every binary labelled dataset with both classes present, up to the given size.

    Row order does not affect the NB estimate, so datasets are enumerated as
    multisets of (row, label) pairs.
    """
    for d in range(0, max_features + 1):
        cells = [(bits, lab) for bits in product((0, 1), repeat=d) for lab in (1, 0)]
        for n in range(2, max_samples + 1):
            yield from _multisets(cells, n, d)


def _multisets(cells, n, d, start=0, acc=()):
    if n == 0:
        labels = [lab for _, lab in acc]
        if 0 < sum(labels) < len(labels):
            X = np.array([bits for bits, _ in acc], dtype=np.uint8).reshape(len(acc), d)
            yield X, np.array(labels, dtype=np.uint8)
        return
    for i in range(start, len(cells)):
        yield from _multisets(cells, n - 1, d, i, acc + (cells[i],))


# --- combiner oracle ---------------------------------------------------------------

def literal_combine(p_sus, scheme):
    """Each fusion rule written out directly in exact rationals, exact tie -> benign."""
    p_ben = [Fraction(1.0 - p) for p in p_sus]
    p_sus = [Fraction(p) for p in p_sus]
    if scheme == "avg":
        s, b = sum(p_sus) / len(p_sus), sum(p_ben) / len(p_ben)
    elif scheme == "prod":
        s = b = Fraction(1)
        for ps, pb in zip(p_sus, p_ben):
            s *= ps
            b *= pb
    elif scheme == "max":
        s, b = max(p_sus), max(p_ben)
    else:
        votes = sum(1 for ps, pb in zip(p_sus, p_ben) if ps > pb)
        s, b = votes, len(p_sus) - votes
    return "suspicious" if s > b else "benign"


def mann_whitney(scores, positive):
    pos = [s for s, p in zip(scores, positive) if p]
    neg = [s for s, p in zip(scores, positive) if not p]
    total = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in pos for b in neg)
    return total / (len(pos) * len(neg))
