"""Read the string table of a DEX file.

Only the header, ``string_ids`` and ``string_data`` sections are touched;
code items are never decoded.
"""
import logging
import re
import struct

from .. import _kernels
from ..errors import MalformedDex

log = logging.getLogger(__name__)

DEX_MAGIC = re.compile(rb"dex\n0\d\d\x00")
HEADER_SIZE = 0x70
_STRING_IDS = struct.Struct("<II")  # string_ids_size, string_ids_off at 0x38


def is_dex(payload):
    return DEX_MAGIC.match(payload[:8]) is not None


def dex_strings(payload, name="classes.dex", issues=None):
    """Return the decoded string table of one DEX payload as a list.

    Raises :class:`MalformedDex` when the header or any string offset points
    outside the payload. Items that are not valid MUTF-8 are skipped; each
    skip is appended to ``issues`` (when given) and logged.
    """
    if not is_dex(payload):
        raise MalformedDex("%s: missing DEX magic" % name)
    if len(payload) < HEADER_SIZE:
        raise MalformedDex("%s: truncated header (%d bytes)" % (name, len(payload)))
    count, ids_off = _STRING_IDS.unpack_from(payload, 0x38)
    if count and ids_off < HEADER_SIZE:
        raise MalformedDex("%s: string_ids_off 0x%x overlaps header" % (name, ids_off))
    try:
        strings, bad = _kernels.read_string_table(payload, ids_off, count)
    except IndexError as exc:
        raise MalformedDex("%s: %s" % (name, exc)) from None
    for k in bad:
        msg = "%s: string #%d is not valid MUTF-8, skipped" % (name, k)
        log.warning(msg)
        if issues is not None:
            issues.append(msg)
    return strings


def extract_dex_strings(pkg, issues=None):
    """Union of the string tables of every DEX entry in ``pkg``.

    Entries are recognised by magic, not by name, so multidex and renamed
    payloads are covered. A malformed DEX contributes nothing; the
    error message is appended to ``issues``.
    """
    found = set()
    for path, payload in pkg.entries:
        if not is_dex(payload):
            continue
        try:
            found.update(dex_strings(payload, path, issues))
        except MalformedDex as exc:
            log.warning("%s", exc)
            if issues is not None:
                issues.append(str(exc))
    return found
