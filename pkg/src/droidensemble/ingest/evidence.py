"""Raw string harvesting and assembly of the per-package evidence bundle."""
import logging
from dataclasses import dataclass, field

from .. import _kernels
from ..errors import NoManifest
from .axml import manifest_permissions
from .dex import extract_dex_strings

log = logging.getLogger(__name__)

DEFAULT_MIN_LEN = 4


@dataclass(frozen=True)
class EvidenceBundle:
    dex_strings: frozenset = frozenset()
    manifest_permissions: frozenset = frozenset()
    raw_strings: frozenset = frozenset()
    fallback_used: bool = False
    issues: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for p in self.manifest_permissions:
            if p.startswith("android.permission."):
                raise ValueError("permission %r still carries its prefix" % p)


def harvest_raw_strings(pkg, min_len=DEFAULT_MIN_LEN):
    """Entry paths plus every maximal printable-ASCII run of at least ``min_len`` bytes."""
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    found = set(pkg.paths)
    for _, payload in pkg.entries:
        for run in _kernels.printable_runs(payload, min_len):
            found.add(run.decode("ascii"))
    return found


def collect_evidence(pkg, min_len=DEFAULT_MIN_LEN):
    """Run all three extractors over ``pkg`` and bundle the results.

    A missing or corrupt manifest does not abort the bundle; the problem is
    recorded in ``issues`` (and ``fallback_used`` set for the corrupt case).
    """
    issues = list(pkg.warnings)
    dex = extract_dex_strings(pkg, issues)
    try:
        perms, fallback = manifest_permissions(pkg, issues)
    except NoManifest as exc:
        log.warning("%s", exc)
        issues.append(str(exc))
        perms, fallback = set(), False
    raw = harvest_raw_strings(pkg, min_len)
    return EvidenceBundle(
        dex_strings=frozenset(dex),
        manifest_permissions=frozenset(perms),
        raw_strings=frozenset(raw),
        fallback_used=fallback,
        issues=tuple(issues),
    )
