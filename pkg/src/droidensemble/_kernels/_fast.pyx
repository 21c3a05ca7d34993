# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pure``; identical semantics."""
import numpy as np

from libc.stdint cimport uint8_t, uint32_t, int64_t


cdef object _decode(const uint8_t[:] data, Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t i = start, m = 0, j = 0
    cdef uint32_t b0, cp, u, lo
    cdef bint ascii = True
    for i in range(start, stop):
        if data[i] >= 0x80 or data[i] == 0:
            ascii = False
            break
    if ascii:
        return bytes(data[start:stop]).decode("ascii")

    units = []
    i = start
    while i < stop:
        b0 = data[i]
        if b0 == 0:
            raise ValueError("raw NUL inside string data")
        if b0 < 0x80:
            units.append(b0)
            i += 1
        elif (b0 & 0xE0) == 0xC0:
            if i + 1 >= stop or (data[i + 1] & 0xC0) != 0x80:
                raise ValueError("truncated 2-byte sequence at %d" % (i - start))
            cp = ((b0 & 0x1F) << 6) | (data[i + 1] & 0x3F)
            if cp < 0x80 and cp != 0:
                raise ValueError("overlong 2-byte sequence at %d" % (i - start))
            units.append(cp)
            i += 2
        elif (b0 & 0xF0) == 0xE0:
            if i + 2 >= stop or (data[i + 1] & 0xC0) != 0x80 or (data[i + 2] & 0xC0) != 0x80:
                raise ValueError("truncated 3-byte sequence at %d" % (i - start))
            cp = ((b0 & 0x0F) << 12) | ((data[i + 1] & 0x3F) << 6) | (data[i + 2] & 0x3F)
            if cp < 0x800:
                raise ValueError("overlong 3-byte sequence at %d" % (i - start))
            units.append(cp)
            i += 3
        else:
            raise ValueError("invalid lead byte 0x%02x at %d" % (b0, i - start))

    out = []
    m = len(units)
    j = 0
    while j < m:
        u = units[j]
        if 0xD800 <= u <= 0xDBFF:
            if j + 1 < m:
                lo = units[j + 1]
                if 0xDC00 <= lo <= 0xDFFF:
                    out.append(chr(0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00)))
                    j += 2
                    continue
            raise ValueError("unpaired high surrogate")
        if 0xDC00 <= u <= 0xDFFF:
            raise ValueError("unpaired low surrogate")
        out.append(chr(u))
        j += 1
    return "".join(out)


def decode_mutf8(data):
    cdef const uint8_t[:] view = data
    return _decode(view, 0, view.shape[0])


def read_string_table(buf, Py_ssize_t ids_off, Py_ssize_t count):
    cdef const uint8_t[:] b = buf
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t k, p, pos, stop
    cdef uint32_t off, byte
    cdef int shift, nb
    if ids_off < 0 or count < 0 or ids_off + 4 * count > n:
        raise IndexError("string_ids table out of bounds")
    strings = []
    bad = []
    for k in range(count):
        p = ids_off + 4 * k
        off = b[p] | (<uint32_t>b[p + 1] << 8) | (<uint32_t>b[p + 2] << 16) | (<uint32_t>b[p + 3] << 24)
        if off >= n:
            raise IndexError("string_data_off %d out of bounds" % off)
        pos = off
        nb = 0
        while True:
            if nb == 5:
                raise IndexError("uleb128 longer than 5 bytes")
            if pos >= n:
                raise IndexError("uleb128 runs past end of buffer")
            byte = b[pos]
            pos += 1
            nb += 1
            if byte < 0x80:
                break
        stop = pos
        while stop < n and b[stop] != 0:
            stop += 1
        if stop >= n:
            raise IndexError("unterminated string_data item at %d" % off)
        try:
            strings.append(_decode(b, pos, stop))
        except ValueError:
            bad.append(k)
    return strings, bad


def printable_runs(data, Py_ssize_t min_len):
    cdef const uint8_t[:] b = data
    cdef Py_ssize_t n = b.shape[0], i = 0, start = -1
    cdef uint8_t c
    out = []
    for i in range(n):
        c = b[i]
        if 0x20 <= c <= 0x7E:
            if start < 0:
                start = i
        elif start >= 0:
            if i - start >= min_len:
                out.append(bytes(b[start:i]))
            start = -1
    if start >= 0 and n - start >= min_len:
        out.append(bytes(b[start:n]))
    return out


def feature_class_counts(const uint8_t[:, :] X, const uint8_t[:] y, const int64_t[:] rows):
    cdef Py_ssize_t d = X.shape[1], r, j, i
    sus = np.zeros(d, dtype=np.int64)
    ben = np.zeros(d, dtype=np.int64)
    cdef int64_t[:] s = sus
    cdef int64_t[:] t = ben
    for r in range(rows.shape[0]):
        i = rows[r]
        if y[i]:
            for j in range(d):
                s[j] += X[i, j]
        else:
            for j in range(d):
                t[j] += X[i, j]
    return sus, ben
