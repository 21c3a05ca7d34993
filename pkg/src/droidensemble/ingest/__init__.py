"""APK parsing: container, DEX string tables, manifest permissions, raw strings."""
from .axml import extract_manifest_permissions, parse_manifest, strip_prefix
from .container import ApkPackage, open_package, read_package
from .dex import dex_strings, extract_dex_strings, is_dex
from .evidence import EvidenceBundle, collect_evidence, harvest_raw_strings

__all__ = [
    "ApkPackage",
    "EvidenceBundle",
    "collect_evidence",
    "dex_strings",
    "extract_dex_strings",
    "extract_manifest_permissions",
    "harvest_raw_strings",
    "is_dex",
    "open_package",
    "parse_manifest",
    "read_package",
    "strip_prefix",
]
