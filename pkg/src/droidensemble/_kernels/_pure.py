"""Pure-Python implementations of the hot kernels.

These are the reference semantics; ``_fast.pyx`` must agree with them
bit-for-bit on every input.
"""
import re

import numpy as np

_RUN_CACHE = {}


def decode_mutf8(data):
    """Decode a Modified-UTF-8 byte string (no terminator) into ``str``.

    Raises ``ValueError`` on any malformed sequence, embedded raw NUL,
    overlong form other than ``C0 80`` or unpaired surrogate.
    """
    if data.isascii():
        if b"\x00" in data:
            raise ValueError("raw NUL inside string data")
        return data.decode("ascii")

    units = []
    i = 0
    n = len(data)
    while i < n:
        b0 = data[i]
        if b0 == 0:
            raise ValueError("raw NUL inside string data")
        if b0 < 0x80:
            units.append(b0)
            i += 1
        elif b0 & 0xE0 == 0xC0:
            if i + 1 >= n or data[i + 1] & 0xC0 != 0x80:
                raise ValueError("truncated 2-byte sequence at %d" % i)
            cp = ((b0 & 0x1F) << 6) | (data[i + 1] & 0x3F)
            if cp < 0x80 and cp != 0:
                raise ValueError("overlong 2-byte sequence at %d" % i)
            units.append(cp)
            i += 2
        elif b0 & 0xF0 == 0xE0:
            if i + 2 >= n or data[i + 1] & 0xC0 != 0x80 or data[i + 2] & 0xC0 != 0x80:
                raise ValueError("truncated 3-byte sequence at %d" % i)
            cp = ((b0 & 0x0F) << 12) | ((data[i + 1] & 0x3F) << 6) | (data[i + 2] & 0x3F)
            if cp < 0x800:
                raise ValueError("overlong 3-byte sequence at %d" % i)
            units.append(cp)
            i += 3
        else:
            raise ValueError("invalid lead byte 0x%02x at %d" % (b0, i))

    out = []
    j = 0
    m = len(units)
    while j < m:
        u = units[j]
        if 0xD800 <= u <= 0xDBFF:
            if j + 1 < m and 0xDC00 <= units[j + 1] <= 0xDFFF:
                out.append(chr(0x10000 + ((u - 0xD800) << 10) + (units[j + 1] - 0xDC00)))
                j += 2
                continue
            raise ValueError("unpaired high surrogate")
        if 0xDC00 <= u <= 0xDFFF:
            raise ValueError("unpaired low surrogate")
        out.append(chr(u))
        j += 1
    return "".join(out)


def _uleb128(buf, pos, end):
    result = 0
    shift = 0
    for k in range(5):
        if pos >= end:
            raise IndexError("uleb128 runs past end of buffer")
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if b < 0x80:
            return result, pos
        shift += 7
    raise ValueError("uleb128 longer than 5 bytes")


def read_string_table(buf, ids_off, count):
    """Decode ``count`` string_data items referenced from ``buf[ids_off:]``.

    Returns ``(strings, bad)`` where ``bad`` lists the indices whose payload
    was not valid MUTF-8. Raises ``IndexError`` when any offset, length
    prefix or terminator lies outside ``buf``.
    """
    n = len(buf)
    if ids_off < 0 or count < 0 or ids_off + 4 * count > n:
        raise IndexError("string_ids table out of bounds")
    strings = []
    bad = []
    view = memoryview(buf)
    for k in range(count):
        p = ids_off + 4 * k
        off = buf[p] | (buf[p + 1] << 8) | (buf[p + 2] << 16) | (buf[p + 3] << 24)
        if off >= n:
            raise IndexError("string_data_off %d out of bounds" % off)
        try:
            _, start = _uleb128(buf, off, n)
        except ValueError as exc:
            raise IndexError(str(exc)) from None
        stop = buf.find(b"\x00", start)
        if stop < 0:
            raise IndexError("unterminated string_data item at %d" % off)
        try:
            strings.append(decode_mutf8(bytes(view[start:stop])))
        except ValueError:
            bad.append(k)
    return strings, bad


def printable_runs(data, min_len):
    """Return every maximal run of printable ASCII (0x20-0x7e) of length >= min_len."""
    pat = _RUN_CACHE.get(min_len)
    if pat is None:
        pat = _RUN_CACHE[min_len] = re.compile(rb"[\x20-\x7e]{%d,}" % min_len)
    return pat.findall(data)


def feature_class_counts(X, y, rows):
    """Per-feature counts of bit=1 among the selected rows, split by class.

    ``X`` is an (n, d) uint8 matrix, ``y`` uint8 labels (1 = suspicious),
    ``rows`` an int64 index array. Returns ``(ones_sus, ones_ben)`` as int64.
    """
    sub = X[rows]
    lab = y[rows].astype(bool)
    ones_sus = sub[lab].sum(axis=0, dtype=np.int64)
    ones_ben = sub[~lab].sum(axis=0, dtype=np.int64)
    return ones_sus, ones_ben
