"""APK container access (APK files are ordinary ZIP archives)."""
import hashlib
import io
import logging
import zipfile
import zlib
from dataclasses import dataclass, field

from ..errors import EntryCorrupt, NotAnArchive

log = logging.getLogger(__name__)

SUPPORTED_METHODS = (zipfile.ZIP_STORED, zipfile.ZIP_DEFLATED)


@dataclass(frozen=True)
class ApkPackage:
    """Decompressed archive entries plus the digest of the original bytes."""

    entries: tuple  # of (path, payload) pairs, archive order, unique paths
    source_path: str
    sha256: str
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        paths = [p for p, _ in self.entries]
        if len(paths) != len(set(paths)):
            raise ValueError("entry paths must be unique")

    @property
    def paths(self):
        return [p for p, _ in self.entries]

    def get(self, path):
        for p, payload in self.entries:
            if p == path:
                return payload
        return None


def read_package(data, source_path="<memory>"):
    """Build an :class:`ApkPackage` from raw archive bytes."""
    digest = hashlib.sha256(data).hexdigest()
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
        infos = zf.infolist()
    except (zipfile.BadZipFile, zipfile.LargeZipFile, EOFError, OSError,
            ValueError, NotImplementedError, UnicodeDecodeError, IndexError) as exc:
        raise NotAnArchive("%s: %s" % (source_path, exc)) from None
    except Exception as exc:  # zipfile raises assorted errors on hostile input
        raise NotAnArchive("%s: %s: %s" % (source_path, type(exc).__name__, exc)) from None

    entries = []
    seen = set()
    warnings = []
    with zf:
        for info in infos:
            name = info.filename
            if info.is_dir():
                continue
            if name in seen:
                warnings.append("%s: duplicate entry %r ignored" % (source_path, name))
                continue
            try:
                payload = _read_entry(zf, info)
            except EntryCorrupt as exc:
                warnings.append(str(exc))
                continue
            seen.add(name)
            entries.append((name, payload))
    for w in warnings:
        log.warning(w)
    return ApkPackage(tuple(entries), str(source_path), digest, tuple(warnings))


def _read_entry(zf, info):
    if info.compress_type not in SUPPORTED_METHODS:
        raise EntryCorrupt("%s: unsupported compression method %d" % (info.filename, info.compress_type))
    try:
        return zf.read(info)
    except (zipfile.BadZipFile, zlib.error, EOFError, OSError, ValueError,
            RuntimeError, NotImplementedError, UnicodeDecodeError, IndexError) as exc:
        raise EntryCorrupt("%s: %s" % (info.filename, exc)) from None
    except Exception as exc:
        raise EntryCorrupt("%s: %s: %s" % (info.filename, type(exc).__name__, exc)) from None


def open_package(path):
    """Read and decompress every entry of the archive at ``path``.

    Raises :class:`NotAnArchive` when the file is not a readable ZIP.
    Entries that fail CRC or decompression are dropped and reported in
    ``ApkPackage.warnings``.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    return read_package(data, str(path))
