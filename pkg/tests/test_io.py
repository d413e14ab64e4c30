# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

# pylint: disable=missing-module-docstring
# pylint: disable=missing-class-docstring
# pylint: disable=missing-function-docstring

import io
import struct

import numpy as np
import pytest

from pybatmap.intersect import count_pair
from pybatmap.io import (
    MAGIC,
    BadMagicError,
    CollectionFileError,
    CorruptFileError,
    FimiParseError,
    TruncatedFileError,
    VersionMismatchError,
    generate,
    parse_fimi,
    read_collection,
    read_supports,
    write_collection,
    write_fimi,
    write_supports,
)
from pybatmap.mining import (
    PairSupportTable,
    TransactionDB,
    VerticalIndex,
    build_collection,
    build_vertical,
)
from pybatmap.params import derive_params

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"


def collection_bytes(collection) -> bytes:
    sink = io.BytesIO()
    write_collection(collection, sink)
    return sink.getvalue()


def test_parse_fimi():
    db = parse_fimi("1 5 3\n\n5 5 9\n")
    assert db.n_transactions == 3
    assert db.item_ids.tolist() == [1, 3, 5, 9]
    assert [t.tolist() for t in db.transactions] == [[0, 1, 2], [], [2, 3]]
    assert db.original(2) == [5, 9]


def test_parse_fimi_stream():
    source = io.StringIO("0 1\n1 2\n")
    assert parse_fimi(source) == parse_fimi(["0 1", "1 2"])


def test_parse_fimi_empty():
    db = parse_fimi("")
    assert db.n_transactions == 0
    assert db.n_items == 0


@pytest.mark.parametrize(
    "content, exp_line",
    [
        pytest.param("1 2\n3 x\n", 2, id="not an integer"),
        pytest.param("1 -2\n", 1, id="negative"),
        pytest.param("1\n2\n\n3.5\n", 4, id="float"),
    ],
)
def test_parse_fimi_error(content, exp_line):
    with pytest.raises(FimiParseError) as exc_info:
        parse_fimi(content)
    assert exc_info.value.line == exp_line
    assert f"line {exp_line}" in str(exc_info.value)
    assert isinstance(exc_info.value, ValueError)


def test_write_fimi():
    db = TransactionDB([[0, 2], [], [1]], 3, item_ids=[4, 8, 15])
    sink = io.StringIO()
    write_fimi(db, sink)
    assert sink.getvalue() == "4 15\n\n8\n"
    assert parse_fimi(sink.getvalue()) == db


def test_generate_full_density():
    db = generate(4, 1.0, 10, seed=0)
    assert db.n_transactions == 3
    assert db.total_size == 12
    assert all(t.tolist() == [0, 1, 2, 3] for t in db.transactions)


def test_generate():
    db = generate(50, 0.1, 5000, seed=3)
    assert db.n_items == 50
    assert db.total_size >= 5000
    # stops with the transaction that reaches the target
    assert db.total_size - len(db.transactions[-1]) < 5000
    assert db == generate(50, 0.1, 5000, seed=3)
    assert db != generate(50, 0.1, 5000, seed=4)


@pytest.mark.parametrize(
    "n_items, density, total",
    [
        pytest.param(500, 0.05, 200_000, id="scaled"),
        pytest.param(8000, 0.05, 10**7, id="full", marks=pytest.mark.slow),
    ],
)
def test_generate_item_frequencies(n_items, density, total):
    db = generate(n_items, density, total, seed=11)
    m = db.n_transactions
    counts = np.bincount(np.concatenate(db.transactions), minlength=n_items)
    sigma = np.sqrt(m * density * (1 - density))
    deviation = np.abs(counts - density * m) / sigma
    # binomial: about 0.27% of the items fall outside 3 sigma
    assert np.mean(deviation <= 3) >= 0.99
    assert deviation.max() <= 5


@pytest.mark.parametrize(
    "args",
    [
        pytest.param((0, 0.5, 10), id="no items"),
        pytest.param((5, 0.0, 10), id="zero density"),
        pytest.param((5, 1.5, 10), id="density > 1"),
        pytest.param((5, 0.5, 0), id="zero total"),
    ],
)
def test_generate_invalid(args):
    with pytest.raises(ValueError):
        generate(*args, seed=0)


def test_collection_round_trip(small_db):
    collection, _ = build_collection(build_vertical(small_db), seed=9)
    data = collection_bytes(collection)
    assert data.startswith(MAGIC)
    loaded = read_collection(io.BytesIO(data))
    assert loaded.params == collection.params
    assert loaded.r0 == collection.r0
    assert np.array_equal(loaded.payload, collection.payload)
    assert np.array_equal(loaded.ranges, collection.ranges)
    assert np.array_equal(loaded.set_sizes, collection.set_sizes)
    assert np.array_equal(loaded.item_ids, collection.item_ids)
    for first, second in zip(loaded, collection):
        assert first == second
        assert first.live_count == second.live_count
    assert count_pair(loaded[0], loaded[-1]) == count_pair(
        collection[0], collection[-1]
    )
    assert collection_bytes(loaded) == data


@pytest.mark.parametrize(
    "vertical",
    [
        pytest.param(VerticalIndex([], 10), id="empty"),
        pytest.param(VerticalIndex([[1, 4, 7]], 8, item_ids=[42]), id="one item"),
    ],
)
def test_collection_round_trip_small(vertical):
    collection, _ = build_collection(vertical)
    loaded = read_collection(io.BytesIO(collection_bytes(collection)))
    assert len(loaded) == len(collection)
    assert loaded.item_ids.tolist() == collection.item_ids.tolist()
    assert loaded.nbytes == collection.nbytes


@pytest.fixture
def collection_file(small_collection):
    return collection_bytes(small_collection)


def test_read_collection_bad_magic(collection_file):
    # pylint: disable=redefined-outer-name
    with pytest.raises(BadMagicError):
        read_collection(io.BytesIO(b"PAMB" + collection_file[4:]))


def test_read_collection_version(collection_file):
    # pylint: disable=redefined-outer-name
    data = bytearray(collection_file)
    data[4] = 2
    with pytest.raises(VersionMismatchError):
        read_collection(io.BytesIO(bytes(data)))


@pytest.mark.parametrize(
    "cut",
    [
        pytest.param(10, id="in header"),
        pytest.param(60, id="in records"),
        pytest.param(-1, id="in payload"),
    ],
)
def test_read_collection_truncated(collection_file, cut):
    # pylint: disable=redefined-outer-name
    with pytest.raises(TruncatedFileError):
        read_collection(io.BytesIO(collection_file[:cut]))


def test_read_collection_trailing(collection_file):
    # pylint: disable=redefined-outer-name
    with pytest.raises(CorruptFileError):
        read_collection(io.BytesIO(collection_file + b"\0"))


def test_read_collection_shift(collection_file):
    # pylint: disable=redefined-outer-name
    data = bytearray(collection_file)
    # s is the third 64-bit header field after magic and version
    data[5 + 16] += 1
    with pytest.raises(CorruptFileError):
        read_collection(io.BytesIO(bytes(data)))


def test_read_collection_offsets(collection_file):
    # pylint: disable=redefined-outer-name
    data = bytearray(collection_file)
    # offset of the second record
    data[45 + 32 + 24] += 3
    with pytest.raises(CorruptFileError):
        read_collection(io.BytesIO(bytes(data)))


def header_bytes(n_items: int, r0: int = 64, max_id: int = 126) -> bytes:
    shift = derive_params(max_id, 0).s
    return struct.pack("<4sB5Q", MAGIC, 1, 0, max_id, shift, r0, n_items)


@pytest.mark.parametrize(
    "n_items",
    [
        pytest.param(1 << 40, id="2^40 records"),
        pytest.param(1 << 58, id="2^58 records"),
        pytest.param((1 << 64) - 1, id="all ones"),
    ],
)
def test_read_collection_huge_count(n_items):
    with pytest.raises(TruncatedFileError):
        read_collection(io.BytesIO(header_bytes(n_items) + bytes(2 * 32)))


@pytest.mark.parametrize(
    "r, error",
    [
        pytest.param(1 << 60, CorruptFileError, id="beyond any universe"),
        pytest.param(96, CorruptFileError, id="not a power of two"),
        pytest.param(32, CorruptFileError, id="below r0"),
        pytest.param(0, CorruptFileError, id="zero"),
        pytest.param(1 << 40, TruncatedFileError, id="payload missing"),
    ],
)
def test_read_collection_bad_range(r, error):
    record = struct.pack("<4Q", 5, 1, r, 0)
    with pytest.raises(error):
        read_collection(io.BytesIO(header_bytes(1) + record + bytes(3 * 64)))


@pytest.mark.parametrize("r0", [2, 6, 0])
def test_read_collection_bad_r0(r0):
    with pytest.raises(CorruptFileError):
        read_collection(io.BytesIO(header_bytes(0, r0=r0)))


def test_collection_errors_are_value_errors():
    for error in (
        BadMagicError,
        VersionMismatchError,
        TruncatedFileError,
        CorruptFileError,
    ):
        assert issubclass(error, CollectionFileError)
        assert issubclass(error, ValueError)


def test_supports_round_trip():
    table = PairSupportTable([(3, 8, 2), (0, 1, 5), (0, 2, 0)])
    sink = io.StringIO()
    write_supports(table, sink)
    assert sink.getvalue() == "item_a,item_b,support\n0,1,5\n0,2,0\n3,8,2\n"
    assert read_supports(io.StringIO(sink.getvalue())) == table


@pytest.mark.parametrize(
    "content",
    [
        pytest.param("", id="empty"),
        pytest.param("a,b,support\n", id="wrong header"),
        pytest.param("item_a,item_b,support\n1,2\n", id="short row"),
        pytest.param("item_a,item_b,support\n1,x,2\n", id="not an integer"),
        pytest.param("item_a,item_b,support\n2,1,2\n", id="unordered pair"),
    ],
)
def test_read_supports_invalid(content):
    with pytest.raises(ValueError):
        read_supports(io.StringIO(content))


def test_round_trips_random():
    rng = np.random.default_rng(77)
    for case in range(100):
        n_items = int(rng.integers(1, 40))
        db = TransactionDB(
            [
                np.flatnonzero(rng.random(n_items) < rng.uniform(0.05, 0.5))
                for _ in range(int(rng.integers(1, 200)))
            ],
            n_items,
            item_ids=np.sort(rng.choice(10_000, size=n_items, replace=False)),
        )
        sink = io.StringIO()
        write_fimi(db, sink)
        parsed = parse_fimi(sink.getvalue())
        for tid in range(db.n_transactions):
            assert parsed.original(tid) == db.original(tid), case

        collection, _ = build_collection(build_vertical(parsed), seed=case, r_min=4)
        data = collection_bytes(collection)
        assert collection_bytes(read_collection(io.BytesIO(data))) == data, case

        table = PairSupportTable(
            (a, b, int(rng.integers(0, 100)))
            for a, b in {
                tuple(sorted(pair))
                for pair in rng.choice(1000, size=(int(rng.integers(0, 30)), 2))
                if pair[0] != pair[1]
            }
        )
        sink = io.StringIO()
        write_supports(table, sink)
        assert read_supports(io.StringIO(sink.getvalue())) == table, case
