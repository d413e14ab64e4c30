# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Reading and writing transactions, batmap collections and pair supports.

- Transactions use the FIMI text format: one transaction per line, items as
  whitespace-separated non-negative integers.
- Collections use a little-endian binary format: the magic ``BMAP``, a version
  byte, the 64-bit header fields ``seed, max_id, s, r0, n_items``, one 64-bit
  record ``original_item_id, set_size, r, payload_offset`` per batmap and
  finally the concatenated batmap bytes.
- Pair supports are CSV with the header ``item_a,item_b,support``.
"""

import csv
import logging
import struct
import typing

import numpy as np

from .mining import BatMapCollection, PairSupportTable, TransactionDB
from .params import MAX_ID_LIMIT, MIN_RANGE, derive_params, is_power_of_two

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

logger = logging.getLogger(__name__)

MAGIC = b"BMAP"
VERSION = 1
_HEADER = struct.Struct("<4sB5Q")
_RECORD_FIELDS = 4
_RECORD_SIZE = 8 * _RECORD_FIELDS
SUPPORTS_HEADER = ("item_a", "item_b", "support")
_GENERATE_CHUNK_CELLS = 1 << 22
_READ_CHUNK = 1 << 24


class FimiParseError(ValueError):
    """A line of a FIMI file is malformed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CollectionFileError(ValueError):
    """A collection file cannot be read."""


class BadMagicError(CollectionFileError):
    """The file does not start with ``BMAP``."""


class VersionMismatchError(CollectionFileError):
    """The file has a format version this library cannot read."""


class TruncatedFileError(CollectionFileError):
    """The file ends before the header, records or payload are complete."""


class CorruptFileError(CollectionFileError):
    """Header, records and payload of the file do not agree."""


def parse_fimi(source: typing.Union[str, typing.Iterable[str]]) -> TransactionDB:
    """Read transactions in FIMI format.

    Repeated items of a line are collapsed and blank lines are empty
    transactions. Items are renumbered densely in ascending order of their
    ids; the original ids are kept in :attr:`TransactionDB.item_ids`.

    :param source: A text stream or the file content.
    :raise FimiParseError: On a token that is not a non-negative integer.
    """
    if isinstance(source, str):
        source = source.splitlines()
    rows = []
    for number, line in enumerate(source, start=1):
        row = set()
        for token in line.split():
            try:
                item = int(token)
            except ValueError as exc:
                raise FimiParseError(number, f"{token!r} is not an integer") from exc
            if item < 0:
                raise FimiParseError(number, f"negative item {item}")
            row.add(item)
        rows.append(sorted(row))
    lengths = [len(row) for row in rows]
    flat = np.fromiter(
        (item for row in rows for item in row), dtype=np.int64, count=sum(lengths)
    )
    item_ids, dense = np.unique(flat, return_inverse=True)
    bounds = np.cumsum(lengths)[:-1] if rows else []
    transactions = np.split(dense.astype(np.int64), bounds) if rows else []
    db = TransactionDB(transactions, len(item_ids), item_ids)
    logger.debug("parsed %d transactions over %d items", db.n_transactions, db.n_items)
    return db


def write_fimi(db: TransactionDB, sink: typing.TextIO):
    """Write ``db`` in FIMI format using the original item ids."""
    for tid in range(db.n_transactions):
        sink.write(" ".join(str(item) for item in db.original(tid)))
        sink.write("\n")


def generate(
    n_items: int, density: float, target_total: int, seed: int
) -> TransactionDB:
    """Generate random transactions.

    Each transaction contains every item independently with probability
    ``density``; transactions are added until their total size reaches
    ``target_total``.

    :raise ValueError: When a parameter is out of range.
    """
    if n_items < 1:
        raise ValueError(f"n_items must be >= 1 (was {n_items})")
    if not 0 < density <= 1:
        raise ValueError(f"density must be in (0, 1] (was {density})")
    if target_total < 1:
        raise ValueError(f"target_total must be >= 1 (was {target_total})")
    rng = np.random.default_rng(seed)
    rows = max(1, _GENERATE_CHUNK_CELLS // n_items)
    transactions = []
    total = 0
    while total < target_total:
        chunk = rng.random((rows, n_items)) < density
        for row in chunk:
            items = np.flatnonzero(row)
            transactions.append(items)
            total += len(items)
            if total >= target_total:
                break
    logger.debug(
        "generated %d transactions of total size %d", len(transactions), total
    )
    return TransactionDB(transactions, n_items)


def write_collection(collection: BatMapCollection, sink: typing.BinaryIO):
    """Write ``collection`` in the binary collection format."""
    params = collection.params
    sink.write(
        _HEADER.pack(
            MAGIC,
            VERSION,
            params.seed,
            params.max_id,
            params.s,
            collection.r0,
            len(collection),
        )
    )
    records = np.stack(
        [
            collection.item_ids,
            collection.set_sizes,
            collection.ranges,
            collection.offsets,
        ],
        axis=1,
    ).astype("<u8")
    sink.write(records.tobytes())
    sink.write(collection.payload.tobytes())


def _read_exactly(source: typing.BinaryIO, size: int, what: str) -> bytes:
    # sizes come from untrusted fields, so never ask for more than a chunk
    chunks = []
    missing = size
    while missing > 0:
        chunk = source.read(min(missing, _READ_CHUNK))
        if not chunk:
            raise TruncatedFileError(
                f"{what} needs {size} bytes, found {size - missing}"
            )
        chunks.append(chunk)
        missing -= len(chunk)
    return b"".join(chunks)


def _check_ranges(ranges: np.ndarray, r0: int):
    if not is_power_of_two(r0) or r0 < MIN_RANGE:
        raise CorruptFileError(f"r0={r0} is not a power of two >= {MIN_RANGE}")
    # unsigned: a zero range wraps in r - 1 but already fails r < r0
    if np.any(ranges < r0) or np.any(ranges & (ranges - np.uint64(1))):
        raise CorruptFileError(f"table ranges must be powers of two >= r0={r0}")
    if np.any(ranges > MAX_ID_LIMIT):
        raise CorruptFileError("table range exceeds any universe")


def read_collection(source: typing.BinaryIO) -> BatMapCollection:
    """Read a collection written by :func:`write_collection`.

    The live count of every batmap is recounted from its bytes.

    :raise BadMagicError: When the file does not start with ``BMAP``.
    :raise VersionMismatchError: When the format version is not 1.
    :raise TruncatedFileError: When the file ends early.
    :raise CorruptFileError: When parameters, records and payload disagree.
    """
    magic = source.read(len(MAGIC))
    if magic != MAGIC:
        raise BadMagicError(f"expected magic {MAGIC!r}, found {magic!r}")
    header = magic + _read_exactly(source, _HEADER.size - len(MAGIC), "header")
    _, version, seed, max_id, shift, r0, n_items = _HEADER.unpack(header)
    if version != VERSION:
        raise VersionMismatchError(f"expected version {VERSION}, found {version}")
    try:
        params = derive_params(max_id, seed)
    except ValueError as exc:
        raise CorruptFileError(f"invalid header: {exc}") from exc
    if params.s != shift:
        raise CorruptFileError(f"s={shift} does not match max_id={max_id}")
    records = np.frombuffer(
        _read_exactly(source, n_items * _RECORD_SIZE, "records"), dtype="<u8"
    ).reshape(n_items, _RECORD_FIELDS)
    _check_ranges(records[:, 2], r0)
    item_ids, set_sizes, ranges, offsets = (
        records[:, field].astype(np.int64) for field in range(_RECORD_FIELDS)
    )
    payload_size = 3 * sum(map(int, records[:, 2]))
    payload = np.frombuffer(
        _read_exactly(source, payload_size, "payload"), dtype=np.uint8
    ).copy()
    if source.read(1):
        raise CorruptFileError("trailing bytes after the payload")
    expected = np.zeros(n_items, dtype=np.int64)
    np.cumsum(3 * ranges[:-1], out=expected[1:])
    if not np.array_equal(offsets, expected):
        raise CorruptFileError("payload offsets do not match the table ranges")
    try:
        return BatMapCollection(params, r0, payload, ranges, set_sizes, item_ids)
    except ValueError as exc:
        raise CorruptFileError(str(exc)) from exc


def write_supports(table: PairSupportTable, sink: typing.TextIO):
    """Write ``table`` as CSV, sorted by pair."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(SUPPORTS_HEADER)
    writer.writerows(table)


def read_supports(source: typing.Iterable[str]) -> PairSupportTable:
    """Read a table written by :func:`write_supports`.

    :raise ValueError: On a missing header or malformed row.
    """
    reader = csv.reader(source)
    header = next(reader, None)
    if tuple(header or ()) != SUPPORTS_HEADER:
        raise ValueError(f"expected header {','.join(SUPPORTS_HEADER)}")
    entries = []
    for row in reader:
        if len(row) != len(SUPPORTS_HEADER):
            raise ValueError(f"line {reader.line_num}: expected 3 fields")
        entries.append(tuple(int(field) for field in row))
    return PairSupportTable(entries)
