"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the comparison does not depend on
which one the package picked at import time.
"""
import argparse
import timeit

import numpy as np

from droidensemble import synth
from droidensemble._kernels import _pure

try:
    from droidensemble._kernels import _fast
except ImportError:
    _fast = None


def workloads():
    rng = np.random.default_rng(0)
    strings = ["Lcom/example/C%05d;" % i for i in range(20000)] + ["getDeviceId", "été", "中文"]
    dex = synth.build_dex(strings)
    ids_off = int.from_bytes(dex[0x3C:0x40], "little")
    blob = bytes(rng.integers(0, 256, size=2_000_000, dtype=np.uint8))
    utf = synth.encode_mutf8("Landroid/telephony/TelephonyManager;->getDeviceIdé" * 200)
    X = rng.integers(0, 2, size=(6863, 179), dtype=np.uint8)
    y = rng.integers(0, 2, size=6863, dtype=np.uint8)
    rows = np.arange(0, 6863, 2, dtype=np.int64)
    return {
        "read_string_table (20k strings)": lambda k: k.read_string_table(dex, ids_off, len(strings)),
        "printable_runs (2 MB random)": lambda k: k.printable_runs(blob, 4),
        "decode_mutf8 (10 kB)": lambda k: k.decode_mutf8(utf),
        "feature_class_counts (6863x179)": lambda k: k.feature_class_counts(X, y, rows),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _fast is None:
        print("compiled kernels not built; run `python setup.py build_ext --inplace` first")
    print("%-34s %12s %12s %9s" % ("kernel", "python ms", "cython ms", "speedup"))
    for name, fn in workloads().items():
        t_py = min(timeit.repeat(lambda: fn(_pure), number=1, repeat=args.repeat)) * 1e3
        if _fast is None:
            print("%-34s %12.2f %12s %9s" % (name, t_py, "-", "-"))
            continue
        assert _equal(fn(_pure), fn(_fast)), name
        t_cy = min(timeit.repeat(lambda: fn(_fast), number=1, repeat=args.repeat)) * 1e3
        print("%-34s %12.2f %12.2f %8.1fx" % (name, t_py, t_cy, t_py / t_cy))


def _equal(a, b):
    if isinstance(a, tuple) and a and isinstance(a[0], np.ndarray):
        return all(np.array_equal(u, v) for u, v in zip(a, b))
    return a == b


if __name__ == "__main__":
    main()
