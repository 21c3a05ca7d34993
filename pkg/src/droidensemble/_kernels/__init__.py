"""Hot inner loops with a compiled core and a pure-Python fallback.

The compiled ``_fast`` extension is used when it was built and
``DROIDENSEMBLE_PURE`` is not set; otherwise ``_pure`` is used. Both expose
the same four functions with identical results.
"""
import os

from . import _pure

try:
    if os.environ.get("DROIDENSEMBLE_PURE"):
        raise ImportError("pure backend forced by environment")
    from . import _fast as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pure
    BACKEND = "python"

decode_mutf8 = _impl.decode_mutf8
read_string_table = _impl.read_string_table
printable_runs = _impl.printable_runs
feature_class_counts = _impl.feature_class_counts

__all__ = [
    "BACKEND",
    "decode_mutf8",
    "read_string_table",
    "printable_runs",
    "feature_class_counts",
]
