"""AndroidManifest.xml permission extraction (binary AXML or plain text).

Binary layout, all little endian::

    chunk header   u16 type, u16 header_size, u32 size
    0x0003         XML document; children are chunks
    0x0001         string pool: u32 count, u32 style_count, u32 flags,
                   u32 strings_start, u32 styles_start, u32 offsets[count]
    0x0180         resource id map, one u32 per leading pool string
    0x0102         start element: u32 line, u32 comment, then
                   u32 ns, u32 name, u16 attr_start, u16 attr_size,
                   u16 attr_count, u16 id, u16 class, u16 style;
                   attributes: u32 ns, u32 name, u32 raw_value,
                   u16 size, u8 res0, u8 data_type, u32 data
"""
import logging
import re
import struct
import xml.etree.ElementTree as ET

from ..errors import MalformedManifest, NoManifest

log = logging.getLogger(__name__)

MANIFEST_PATH = "AndroidManifest.xml"
ANDROID_NS = "http://schemas.android.com/apk/res/android"
PERMISSION_PREFIX = "android.permission."
PERMISSION_TOKEN = re.compile(r"android\.permission\.[A-Z_]+")
NAME_ATTR_RESID = 0x01010003

XML_TYPE = 0x0003
STRING_POOL_TYPE = 0x0001
RESOURCE_MAP_TYPE = 0x0180
START_ELEMENT_TYPE = 0x0102
UTF8_FLAG = 1 << 8
NO_INDEX = 0xFFFFFFFF
TYPE_STRING = 0x03

_CHUNK = struct.Struct("<HHI")
_POOL = struct.Struct("<IIIII")
_ELEMENT_EXT = struct.Struct("<IIHHH")
_ATTR = struct.Struct("<IIIHBBI")


def strip_prefix(name):
    if name.startswith(PERMISSION_PREFIX):
        return name[len(PERMISSION_PREFIX):]
    return name


def is_binary_xml(data):
    return len(data) >= 2 and data[0] == XML_TYPE and data[1] == 0x00


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pool = None
        self.resids = ()

    def fail(self, msg, *args):
        raise MalformedManifest(msg % args)

    def unpack(self, st, off, limit):
        if off < 0 or off + st.size > limit:
            self.fail("read of %d bytes at 0x%x exceeds 0x%x", st.size, off, limit)
        return st.unpack_from(self.data, off)

    def string(self, idx):
        if self.pool is None:
            self.fail("string reference before string pool")
        if idx >= len(self.pool):
            self.fail("string index %d out of range", idx)
        return self.pool[idx]

    def parse_pool(self, start, hsize, end):
        count, _styles, flags, strings_start, _styles_start = self.unpack(_POOL, start + 8, end)
        offs_at = start + hsize
        if offs_at + 4 * count > end:
            self.fail("string pool offsets overrun chunk")
        base = start + strings_start
        utf8 = bool(flags & UTF8_FLAG)
        data = self.data
        pool = []
        for k in range(count):
            (off,) = struct.unpack_from("<I", data, offs_at + 4 * k)
            pos = base + off
            if utf8:
                _, pos = self._len8(pos, end)
                nbytes, pos = self._len8(pos, end)
                if pos + nbytes > end:
                    self.fail("utf-8 string %d overruns pool", k)
                pool.append(data[pos:pos + nbytes].decode("utf-8", "replace"))
            else:
                nchars, pos = self._len16(pos, end)
                if pos + 2 * nchars > end:
                    self.fail("utf-16 string %d overruns pool", k)
                pool.append(data[pos:pos + 2 * nchars].decode("utf-16-le", "replace"))
        self.pool = pool

    def _len8(self, pos, end):
        if pos < 0 or pos >= end:
            self.fail("string length outside pool")
        n = self.data[pos]
        if n & 0x80:
            if pos + 1 >= end:
                self.fail("string length outside pool")
            return ((n & 0x7F) << 8) | self.data[pos + 1], pos + 2
        return n, pos + 1

    def _len16(self, pos, end):
        if pos < 0 or pos + 2 > end:
            self.fail("string length outside pool")
        (n,) = struct.unpack_from("<H", self.data, pos)
        if n & 0x8000:
            if pos + 4 > end:
                self.fail("string length outside pool")
            (lo,) = struct.unpack_from("<H", self.data, pos + 2)
            return ((n & 0x7FFF) << 16) | lo, pos + 4
        return n, pos + 2

    def element_permission(self, start, hsize, end):
        ns, name, attr_start, attr_size, attr_count = self.unpack(_ELEMENT_EXT, start + hsize, end)
        if self.string(name) != "uses-permission":
            return None
        if attr_size < _ATTR.size:
            self.fail("attribute size %d too small", attr_size)
        first = start + hsize + attr_start
        for k in range(attr_count):
            a_ns, a_name, raw, _size, _res0, dtype, value = self.unpack(_ATTR, first + k * attr_size, end)
            if not self._is_android_name(a_ns, a_name):
                continue
            if raw != NO_INDEX:
                return self.string(raw)
            if dtype == TYPE_STRING:
                return self.string(value)
            return None
        return None

    def _is_android_name(self, ns, name):
        if name < len(self.resids) and self.resids[name] == NAME_ATTR_RESID:
            return True
        return ns != NO_INDEX and self.string(ns) == ANDROID_NS and self.string(name) == "name"

    def permissions(self):
        data = self.data
        doc_type, doc_hsize, doc_size = self.unpack(_CHUNK, 0, len(data))
        if doc_type != XML_TYPE or doc_hsize < 8 or doc_size > len(data) or doc_size < doc_hsize:
            self.fail("bad document header")
        found = []
        pos = doc_hsize
        while pos + 8 <= doc_size:
            ctype, hsize, size = self.unpack(_CHUNK, pos, doc_size)
            if hsize < 8 or size < hsize or pos + size > doc_size:
                self.fail("chunk 0x%04x at 0x%x has bad sizes (%d/%d)", ctype, pos, hsize, size)
            end = pos + size
            if ctype == STRING_POOL_TYPE:
                self.parse_pool(pos, hsize, end)
            elif ctype == RESOURCE_MAP_TYPE:
                n = (size - hsize) // 4
                self.resids = struct.unpack_from("<%dI" % n, data, pos + hsize)
            elif ctype == START_ELEMENT_TYPE:
                perm = self.element_permission(pos, hsize, end)
                if perm is not None:
                    found.append(perm)
            pos = end
        if pos != doc_size:
            self.fail("trailing %d bytes after last chunk", doc_size - pos)
        return found


def _scan_tokens(strings):
    out = set()
    for s in strings:
        out.update(PERMISSION_TOKEN.findall(s))
    return out


def _scan_raw(data):
    texts = [data.decode("latin-1")]
    for shift in (0, 1):
        texts.append(data[shift:].decode("utf-16-le", "ignore"))
    return _scan_tokens(texts)


def parse_manifest(data):
    """Return ``(permissions, fallback_used)`` for one manifest payload.

    Permission names keep their full form here; see :func:`strip_prefix`.
    When the document structure cannot be walked, every
    ``android.permission.*`` token in the string pool (or, failing that, the
    raw bytes) is returned instead and ``fallback_used`` is True.
    """
    if is_binary_xml(data):
        reader = _Reader(data)
        try:
            return set(reader.permissions()), False
        except MalformedManifest as exc:
            log.warning("binary manifest unparseable, scanning strings: %s", exc)
            if reader.pool is not None:
                return _scan_tokens(reader.pool), True
            return _scan_raw(data), True
    try:
        root = ET.fromstring(data)
    except (ET.ParseError, ValueError, UnicodeError) as exc:
        log.warning("text manifest unparseable, scanning bytes: %s", exc)
        return _scan_raw(data), True
    key = "{%s}name" % ANDROID_NS
    found = set()
    for el in root.iter("uses-permission"):
        name = el.get(key)
        if name is not None:
            found.add(name)
    return found, False


def manifest_permissions(pkg, issues=None):
    """Return ``(bare permission names, fallback_used)`` for ``pkg``."""
    data = pkg.get(MANIFEST_PATH)
    if data is None:
        raise NoManifest("%s: no %s entry" % (pkg.source_path, MANIFEST_PATH))
    perms, fallback = parse_manifest(data)
    if fallback and issues is not None:
        issues.append(str(MalformedManifest("%s: manifest structure unparseable, token scan used" % pkg.source_path)))
    return {strip_prefix(p) for p in perms}, fallback


def extract_manifest_permissions(pkg, issues=None):
    """Bare names of every ``uses-permission`` declared in the manifest.

    Raises :class:`NoManifest` when the package has no manifest entry.
    """
    return manifest_permissions(pkg, issues)[0]
