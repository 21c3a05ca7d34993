"""Fixture builders: minimal DEX and binary-manifest payloads, APK archives,
and labelled corpora generated from known concepts.

The writers here are deliberately independent of the parsers in
:mod:`droidensemble.ingest` so that round trips are meaningful.
"""
import hashlib
import io
import struct
import zipfile
import zlib

import numpy as np

from .features import Feature, FeatureCatalog, SampleMatrix

ANDROID_NS = "http://schemas.android.com/apk/res/android"
FIXED_DATE = (1980, 1, 1, 0, 0, 0)


# --- DEX -----------------------------------------------------------------------

def encode_mutf8(text):
    out = bytearray()
    for unit in _utf16_units(text):
        if unit == 0:
            out += b"\xc0\x80"
        elif unit < 0x80:
            out.append(unit)
        elif unit < 0x800:
            out += bytes((0xC0 | (unit >> 6), 0x80 | (unit & 0x3F)))
        else:
            out += bytes((0xE0 | (unit >> 12), 0x80 | ((unit >> 6) & 0x3F), 0x80 | (unit & 0x3F)))
    return bytes(out)


def _utf16_units(text):
    raw = text.encode("utf-16-le", "surrogatepass")
    return struct.unpack("<%dH" % (len(raw) // 2), raw)


def _uleb128(value):
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def build_dex(strings, version=b"035"):
    """A header-valid DEX whose string table is exactly ``strings`` (deduplicated, sorted)."""
    items = sorted(set(strings), key=lambda s: _utf16_units(s))
    n = len(items)
    ids_off = 0x70
    data_off = ids_off + 4 * n
    blobs = [_uleb128(len(_utf16_units(s))) + encode_mutf8(s) + b"\x00" for s in items]
    offsets = []
    pos = data_off
    for b in blobs:
        offsets.append(pos)
        pos += len(b)
    map_off = (pos + 3) & ~3
    map_items = [(0x0000, 1, 0), (0x0001, n, ids_off)]
    if n:
        map_items.append((0x2002, n, data_off))
    map_items.append((0x1000, 1, map_off))
    map_blob = struct.pack("<I", len(map_items)) + b"".join(
        struct.pack("<HHII", t, 0, size, off) for t, size, off in map_items)
    file_size = map_off + len(map_blob)

    body = bytearray(file_size)
    body[ids_off:data_off] = b"".join(struct.pack("<I", o) for o in offsets)
    body[data_off:data_off + sum(map(len, blobs))] = b"".join(blobs)
    body[map_off:] = map_blob
    header = struct.pack(
        "<8s4s20s20I",
        b"dex\n" + version + b"\x00", b"\x00" * 4, b"\x00" * 20,
        file_size, 0x70, 0x12345678, 0, 0, map_off,
        n, ids_off if n else 0,
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
        file_size - data_off, data_off)
    body[:0x70] = header
    body[12:32] = hashlib.sha1(bytes(body[32:])).digest()
    body[8:12] = struct.pack("<I", zlib.adler32(bytes(body[12:])))
    return bytes(body)


# --- binary manifest -----------------------------------------------------------

class _Pool:
    def __init__(self, leading):
        self.strings = list(leading)

    def idx(self, s):
        if s not in self.strings:
            self.strings.append(s)
        return self.strings.index(s)

    def chunk(self, utf8=False):
        offs, data = [], bytearray()
        for s in self.strings:
            offs.append(len(data))
            if utf8:
                enc = s.encode("utf-8")
                data += _len8(len(s)) + _len8(len(enc)) + enc + b"\x00"
            else:
                units = len(s.encode("utf-16-le")) // 2
                data += struct.pack("<H", units) + s.encode("utf-16-le") + b"\x00\x00"
        while len(data) % 4:
            data.append(0)
        hsize = 0x1C
        start = hsize + 4 * len(offs)
        size = start + len(data)
        return (struct.pack("<HHIIIIII", 0x0001, hsize, size, len(offs), 0,
                            (1 << 8) if utf8 else 0, start, 0)
                + b"".join(struct.pack("<I", o) for o in offs) + bytes(data))


def _len8(n):
    if n > 0x7F:
        return bytes((0x80 | (n >> 8), n & 0xFF))
    return bytes((n,))


def _start(pool, name, attrs, line):
    body = struct.pack("<IIHHHHHH", 0xFFFFFFFF, pool.idx(name), 0x14, 0x14, len(attrs), 0, 0, 0)
    for ns, aname, value in attrs:
        ns_idx = pool.idx(ns) if ns else 0xFFFFFFFF
        v = pool.idx(value)
        body += struct.pack("<IIIHBBI", ns_idx, pool.idx(aname), v, 8, 0, 0x03, v)
    return struct.pack("<HHIII", 0x0102, 0x10, 0x10 + len(body), line, 0xFFFFFFFF) + body


def _end(pool, name, line):
    return struct.pack("<HHIIIII", 0x0103, 0x10, 0x18, line, 0xFFFFFFFF, 0xFFFFFFFF, pool.idx(name))


def build_axml(permissions, package="com.example.app", utf8=False, extra_elements=()):
    """Compile a minimal binary AndroidManifest.xml declaring ``permissions`` in order.

    ``extra_elements`` names additional empty elements (each with an
    ``android:name`` attribute of ``"x"``) emitted before the permissions.
    """
    pool = _Pool(["name", "label"])  # resource-mapped attribute names lead the pool
    resmap = [0x01010003, 0x01010001]
    pool.idx(ANDROID_NS)
    pool.idx("android")
    chunks = []
    chunks.append(struct.pack("<HHIIIII", 0x0100, 0x10, 0x18, 1, 0xFFFFFFFF,
                              pool.idx("android"), pool.idx(ANDROID_NS)))
    line = 2
    chunks.append(_start(pool, "manifest", [(None, "package", package)], line))
    for el in extra_elements:
        line += 1
        chunks.append(_start(pool, el, [(ANDROID_NS, "name", "x")], line))
        chunks.append(_end(pool, el, line))
    for perm in permissions:
        line += 1
        chunks.append(_start(pool, "uses-permission", [(ANDROID_NS, "name", perm)], line))
        chunks.append(_end(pool, "uses-permission", line))
    line += 1
    chunks.append(_start(pool, "application", [(ANDROID_NS, "label", "App")], line))
    chunks.append(_end(pool, "application", line))
    chunks.append(_end(pool, "manifest", line + 1))
    chunks.append(struct.pack("<HHIIIII", 0x0101, 0x10, 0x18, line + 1, 0xFFFFFFFF,
                              pool.idx("android"), pool.idx(ANDROID_NS)))
    res_chunk = struct.pack("<HHI", 0x0180, 8, 8 + 4 * len(resmap)) + struct.pack("<%dI" % len(resmap), *resmap)
    body = pool.chunk(utf8) + res_chunk + b"".join(chunks)
    return struct.pack("<HHI", 0x0003, 8, 8 + len(body)) + body


def text_manifest(permissions, package="com.example.app"):
    lines = ['<?xml version="1.0" encoding="utf-8"?>',
             '<manifest xmlns:android="%s" package="%s">' % (ANDROID_NS, package)]
    lines += ['  <uses-permission android:name="%s"/>' % p for p in permissions]
    lines += ['  <application android:label="App"/>', "</manifest>"]
    return ("\n".join(lines) + "\n").encode("utf-8")


# --- archives --------------------------------------------------------------------

def build_apk(entries, compression=zipfile.ZIP_DEFLATED):
    """Zip ``entries`` (iterable of ``(path, bytes)``) with fixed timestamps."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        for path, payload in entries:
            info = zipfile.ZipInfo(path, date_time=FIXED_DATE)
            info.compress_type = compression
            info.external_attr = 0o644 << 16
            zf.writestr(info, payload)
    return buf.getvalue()


def mini_apk(api=(), commands=(), permissions=(), package="com.example.app", filler=(),
             compression=zipfile.ZIP_DEFLATED):
    """An APK whose DEX holds ``api`` keywords and ``filler`` strings, whose hidden
    asset holds ``commands`` and whose manifest declares ``permissions``."""
    dex = build_dex(list(api) + list(filler) + ["Ljava/lang/Object;", "<init>"])
    manifest = build_axml(["android.permission." + p for p in permissions], package)
    asset = b"\x7fELF\x01\x00\x00" + b"\x00\x01".join(c.encode("ascii") for c in commands) + b"\x00\xff"
    return build_apk([
        ("AndroidManifest.xml", manifest),
        ("classes.dex", dex),
        ("assets/.cfg", asset),
        ("res/raw/blob.bin", bytes(range(256))),
    ], compression)


# --- labelled corpora ---------------------------------------------------------------

def synthetic_catalog(d, prefix="f"):
    return FeatureCatalog([Feature("%s%d" % (prefix, j), "api") for j in range(d)])


def random_decision_list(rng, d=8, n_rules=3, max_literals=2):
    """``n_rules`` rules of 1..max_literals literals over distinct features, and a default class."""
    rules = []
    for _ in range(n_rules):
        k = int(rng.integers(1, max_literals + 1))
        feats = rng.choice(d, size=k, replace=False)
        lits = tuple((int(j), int(rng.integers(0, 2))) for j in sorted(feats))
        rules.append((lits, int(rng.integers(0, 2))))
    default = 1 - rules[-1][1]
    return rules, default


def apply_decision_list(rules, default, X):
    y = np.full(X.shape[0], default, dtype=np.uint8)
    open_ = np.ones(X.shape[0], dtype=bool)
    for lits, cls in rules:
        hit = open_.copy()
        for j, b in lits:
            hit &= X[:, j] == b
        y[hit] = cls
        open_ &= ~hit
    return y


def decision_list_corpus(seed, n=200, d=8, n_rules=3, min_per_class=10, max_literals=2):
    """Noise-free matrix labelled by a random decision list; both classes >= ``min_per_class``."""
    rng = np.random.default_rng(seed)
    while True:
        rules, default = random_decision_list(rng, d, n_rules, max_literals)
        X = rng.integers(0, 2, size=(n, d), dtype=np.uint8)
        y = apply_decision_list(rules, default, X)
        n_sus = int(y.sum())
        if min(n_sus, n - n_sus) >= min_per_class:
            break
    m = SampleMatrix(synthetic_catalog(d), ["s%04d" % i for i in range(n)], X, y)
    return m, rules, default


# Keyword pools drawn from the default catalog for end-to-end corpora.
NOISE_API = ("abortBroadcast", "getSubscriberId", "getCallState", "getSimSerialNumber",
             "getPackageManager", "bindService", "onActivityResult", "registerReceiver",
             "HttpPost_init", "SecretKey", "getMethod", "System.loadLibrary")
NOISE_CMD = ("chown", "jar", "GET_META_DATA", "GET_SIGNATURES", "/system/app")
NOISE_PERM = ("INTERNET", "ACCESS_COARSE_LOCATION", "CAMERA", "RECORD_AUDIO", "WRITE_EXTERNAL_STORAGE",
              "RECEIVE_BOOT_COMPLETED", "CHANGE_WIFI_STATE", "VIBRATE", "WAKE_LOCK", "READ_CONTACTS")
FILLER = ("Landroid/app/Activity;", "Lcom/example/Main;", "onCreate", "setContentView",
          "Landroid/os/Bundle;", "toString", "hello world")


def planted_concept(api, commands, permissions):
    """Suspicious iff (SEND_SMS and getDeviceId) or (chmod and /system/bin/sh) or DexClassLoader."""
    return (("SEND_SMS" in permissions and "getDeviceId" in api)
            or ("chmod" in commands and "/system/bin/sh" in commands)
            or "DexClassLoader" in api)


def apk_corpus(n=200, seed=0):
    """``n`` mini-APKs with planted keywords. Returns ``[(name, bytes, label), ...]``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        api = {k for k in NOISE_API if rng.random() < 0.3}
        cmds = {k for k in NOISE_CMD if rng.random() < 0.3}
        perms = {k for k in NOISE_PERM if rng.random() < 0.4}
        # plant concept fragments: full patterns make suspicious apps, halves make hard benign ones
        r = rng.random()
        if r < 0.2:
            api.add("getDeviceId"); perms.add("SEND_SMS")
        elif r < 0.35:
            cmds.update(("chmod", "/system/bin/sh"))
        elif r < 0.5:
            api.add("DexClassLoader")
        elif r < 0.65:
            api.add("getDeviceId")
        elif r < 0.8:
            perms.add("SEND_SMS")
        elif r < 0.9:
            cmds.add("chmod")
        label = "suspicious" if planted_concept(api, cmds, perms) else "benign"
        data = mini_apk(sorted(api), sorted(cmds), sorted(perms),
                        package="com.sample.app%03d" % i, filler=FILLER)
        out.append(("app%03d.apk" % i, data, label))
    return out
