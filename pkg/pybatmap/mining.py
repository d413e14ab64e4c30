# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Frequent pair mining with batmaps.

The transactions are turned into per-item tidlists, infrequent items are
dropped and the tidlist of every remaining item is stored as a batmap. Items
are sorted by tidlist size so that batmaps of similar width end up in the same
tile. Counting all batmap pairs then yields the support of every item pair,
except for the occurrences lost to failed cuckoo insertions; those are added
back from a ledger of ``(item, item, transaction)`` corrections.
"""

from __future__ import annotations

import collections
import concurrent.futures
import logging
import time
import typing

import numpy as np

from .batmap import BatMap, build_batmap
from .intersect import DEFAULT_TILE_SIZE, count_all
from .params import (
    MIN_RANGE,
    UniverseParams,
    derive_params,
    is_power_of_two,
    table_range,
)

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

logger = logging.getLogger(__name__)

DEFAULT_R_MIN = 64
DEFAULT_MEMORY_BUDGET = 4 << 30
"""Default upper bound for the bytes of a batmap collection (4 GiB)."""

Triple = typing.Tuple[int, int, int]


def _as_ids(values) -> np.ndarray:
    if not isinstance(values, np.ndarray):
        values = list(values)
    array = np.asarray(values, dtype=np.int64)
    if array.ndim != 1:
        raise TypeError(f"expected a flat sequence of integers (got {array.shape})")
    return array


class TransactionDB:
    """Transactions over densely numbered items."""

    def __init__(
        self,
        transactions: typing.Iterable[typing.Iterable[int]],
        n_items: typing.Optional[int] = None,
        item_ids: typing.Optional[typing.Sequence[int]] = None,
    ):
        """
        :param transactions: Items of each transaction, in [0, ``n_items``).
        :param n_items: Number of items (default: largest item + 1).
        :param item_ids: Original (input) id of each item (default: identity).
        :raise ValueError: When a transaction repeats an item or an item is out
            of range.

        .. py:attribute:: transactions
           :type: list[numpy.ndarray]

           Sorted items of each transaction.

        .. py:attribute:: item_ids
           :type: numpy.ndarray

           Original id of each dense item id.
        """
        self.transactions = []
        largest = -1
        for tid, transaction in enumerate(transactions):
            items = np.sort(_as_ids(transaction))
            if items.size:
                if items[0] < 0:
                    raise ValueError(f"transaction {tid} has a negative item")
                if np.any(items[1:] == items[:-1]):
                    raise ValueError(f"transaction {tid} repeats an item")
                largest = max(largest, int(items[-1]))
            self.transactions.append(items)
        if n_items is None:
            n_items = largest + 1 if item_ids is None else len(item_ids)
        if largest >= n_items:
            raise ValueError(f"item {largest} is out of range for {n_items} items")
        if item_ids is None:
            item_ids = np.arange(n_items, dtype=np.int64)
        item_ids = _as_ids(item_ids)
        if len(item_ids) != n_items:
            raise ValueError(f"expected {n_items} item ids (got {len(item_ids)})")
        self.n_items = n_items
        self.item_ids = item_ids

    def __repr__(self):
        return (
            f"<{type(self).__name__} n_transactions={self.n_transactions} "
            f"n_items={self.n_items}>"
        )

    def __len__(self):
        return len(self.transactions)

    def __eq__(self, other):
        if not isinstance(other, TransactionDB):
            return NotImplemented
        return (
            self.n_items == other.n_items
            and np.array_equal(self.item_ids, other.item_ids)
            and len(self) == len(other)
            and all(
                np.array_equal(a, b)
                for a, b in zip(self.transactions, other.transactions)
            )
        )

    __hash__ = None

    @property
    def n_transactions(self) -> int:
        # pylint: disable=missing-function-docstring
        return len(self.transactions)

    @property
    def total_size(self) -> int:
        """Sum of all transaction sizes."""
        return sum(len(t) for t in self.transactions)

    def original(self, transaction: int) -> typing.List[int]:
        """Items of a transaction in original ids, ascending."""
        return sorted(int(i) for i in self.item_ids[self.transactions[transaction]])


class VerticalIndex:
    """The tidlist of every item."""

    def __init__(
        self,
        tidlists: typing.Sequence[np.ndarray],
        n_transactions: int,
        item_ids: typing.Optional[typing.Sequence[int]] = None,
    ):
        """
        :param tidlists: Strictly increasing transaction ids of each item.
        :param n_transactions: Number of transactions.
        :param item_ids: Original id of each item (default: identity).
        """
        self.tidlists = [_as_ids(tidlist) for tidlist in tidlists]
        self.n_transactions = n_transactions
        if item_ids is None:
            item_ids = np.arange(len(self.tidlists), dtype=np.int64)
        self.item_ids = _as_ids(item_ids)
        if len(self.item_ids) != len(self.tidlists):
            raise ValueError("need one item id per tidlist")

    def __repr__(self):
        return (
            f"<{type(self).__name__} n_items={len(self)} "
            f"n_transactions={self.n_transactions}>"
        )

    def __len__(self):
        return len(self.tidlists)

    @property
    def sizes(self) -> np.ndarray:
        """Tidlist length, i.e. the support, of every item."""
        return np.array([len(t) for t in self.tidlists], dtype=np.int64)

    @property
    def total_size(self) -> int:
        # pylint: disable=missing-function-docstring
        return int(self.sizes.sum())


class BatMapCollection:
    """The batmaps of all items of an instance, sorted by width.

    All batmaps share one payload array; batmap ``i`` occupies the bytes
    ``offsets[i]`` to ``offsets[i] + 3 * ranges[i]``.
    """

    def __init__(
        self,
        params: UniverseParams,
        r0: int,
        payload: np.ndarray,
        ranges: typing.Sequence[int],
        set_sizes: typing.Sequence[int],
        item_ids: typing.Sequence[int],
        order: typing.Optional[typing.Sequence[int]] = None,
        live_counts: typing.Optional[typing.Sequence[int]] = None,
        moves: int = 0,
    ):
        """
        :param params: Universe parameters of every batmap.
        :param r0: Smallest table range of the collection.
        :param payload: Concatenated entry bytes.
        :param ranges: Table range of each batmap, non-decreasing.
        :param set_sizes: Size of the set behind each batmap.
        :param item_ids: Original item id of each batmap.
        :param order: Index of the item in its
            :class:`VerticalIndex` for each batmap (default: identity).
        :param live_counts: Stored elements of each batmap (default: recount).
        :param moves: Evictions performed while building.
        :raise ValueError: When the layout is inconsistent.

        .. py:attribute:: order
           :type: numpy.ndarray

           Position in the source index of each batmap.

        .. py:attribute:: rank
           :type: numpy.ndarray

           Inverse of :py:attr:`order`.
        """
        ranges = _as_ids(ranges)
        n = len(ranges)
        if not is_power_of_two(r0) or r0 < MIN_RANGE:
            raise ValueError(f"r0 must be a power of two >= {MIN_RANGE} (was {r0})")
        if n and (ranges.min() != r0 or np.any(ranges % r0)):
            raise ValueError(f"r0={r0} is not the smallest range dividing all")
        if np.any(ranges[1:] < ranges[:-1]):
            raise ValueError("batmaps must be sorted by width")
        set_sizes, item_ids = _as_ids(set_sizes), _as_ids(item_ids)
        if len(set_sizes) != n or len(item_ids) != n:
            raise ValueError("need one set size and one item id per batmap")
        order = np.arange(n, dtype=np.int64) if order is None else _as_ids(order)
        if len(order) != n:
            raise ValueError("need one order entry per batmap")
        payload = np.asarray(payload, dtype=np.uint8)
        if payload.shape != (int(3 * ranges.sum()),):
            raise ValueError(
                f"payload has {payload.size} bytes, expected {3 * ranges.sum()}"
            )
        payload.flags.writeable = False
        self.params = params
        self.perms = params.permutations()
        self.r0 = r0
        self.payload = payload
        self.ranges = ranges
        self.offsets = np.zeros(n, dtype=np.int64)
        np.cumsum(3 * ranges[:-1], out=self.offsets[1:])
        self.set_sizes = set_sizes
        self.item_ids = item_ids
        self.order = order
        self.rank = np.empty(n, dtype=np.int64)
        self.rank[order] = np.arange(n, dtype=np.int64)
        self.moves = moves
        if live_counts is None:
            live_counts = [None] * n
        self.batmaps = [
            BatMap(params, int(r), r0, payload[offset : offset + 3 * r], live)
            for r, offset, live in zip(ranges, self.offsets, live_counts)
        ]

    def __repr__(self):
        return f"<{type(self).__name__} n={len(self)} nbytes={self.nbytes}>"

    def __len__(self):
        return len(self.batmaps)

    def __getitem__(self, index: int) -> BatMap:
        return self.batmaps[index]

    def __iter__(self):
        return iter(self.batmaps)

    @property
    def nbytes(self) -> int:
        """Size of all batmaps in bytes."""
        return int(self.payload.size)

    def position_of(self, item_id: int) -> int:
        """Position of the batmap of an original item id.

        :raise KeyError: When the collection has no such item.
        """
        hits = np.flatnonzero(self.item_ids == item_id)
        if not hits.size:
            raise KeyError(item_id)
        return int(hits[0])


class FallbackLedger:
    """Transactions whose insertion failed and the pair corrections they
    cause."""

    def __init__(
        self,
        failures: typing.Iterable[typing.Tuple[int, int]],
        k: int,
    ):
        """
        :param failures: ``(position, transaction)`` of every failed insertion,
            positions in collection order.
        :param k: Tile edge length the corrections are grouped by.

        .. py:attribute:: corrections
           :type: dict[tuple[int, int], set[tuple[int, int, int]]]

           Triples ``(a, c, b)`` with ``a < c`` per tile ``(p, q)``.
        """
        self.failures = sorted(set(failures))
        self.k = k
        self.corrections: typing.Dict[
            typing.Tuple[int, int], typing.Set[Triple]
        ] = collections.defaultdict(set)

    def __repr__(self):
        return (
            f"<{type(self).__name__} failures={len(self.failures)} "
            f"corrections={self.correction_count}>"
        )

    @property
    def correction_count(self) -> int:
        # pylint: disable=missing-function-docstring
        return sum(len(triples) for triples in self.corrections.values())

    def add(self, a: int, c: int, b: int):
        """Record that the pair of positions ``a`` and ``c`` lost transaction
        ``b``."""
        if a == c:
            raise ValueError(f"no correction for the diagonal pair ({a}, {a})")
        low, high = min(a, c), max(a, c)
        self.corrections[low // self.k, high // self.k].add((low, high, b))

    def tile(self, p: int, q: int) -> typing.Set[Triple]:
        """Correction triples of tile ``(p, q)``."""
        return self.corrections.get((p, q), set())


class PairSupportTable:
    """Supports of item pairs in original item ids."""

    def __init__(self, entries: typing.Iterable[Triple] = ()):
        """
        :param entries: ``(item_a, item_b, support)`` with ``item_a < item_b``.
        :raise ValueError: On unordered or repeated pairs or negative supports.
        """
        supports = {}
        for item_a, item_b, support in entries:
            item_a, item_b, support = int(item_a), int(item_b), int(support)
            if item_a >= item_b:
                raise ValueError(f"pair ({item_a}, {item_b}) is not ordered")
            if support < 0:
                raise ValueError(f"negative support for ({item_a}, {item_b})")
            if (item_a, item_b) in supports:
                raise ValueError(f"pair ({item_a}, {item_b}) is repeated")
            supports[item_a, item_b] = support
        self._supports = dict(sorted(supports.items()))

    def __repr__(self):
        return f"<{type(self).__name__} pairs={len(self)}>"

    def __len__(self):
        return len(self._supports)

    def __iter__(self) -> typing.Iterator[Triple]:
        for (item_a, item_b), support in self._supports.items():
            yield item_a, item_b, support

    def __eq__(self, other):
        if not isinstance(other, PairSupportTable):
            return NotImplemented
        return self._supports == other._supports

    __hash__ = None

    def __contains__(self, pair):
        return tuple(pair) in self._supports

    def support(self, item_a: int, item_b: int) -> int:
        """Support of a pair in either order, 0 when it is not listed."""
        pair = (min(item_a, item_b), max(item_a, item_b))
        return self._supports.get(pair, 0)

    def as_dict(self) -> typing.Dict[typing.Tuple[int, int], int]:
        # pylint: disable=missing-function-docstring
        return dict(self._supports)

    def thresholded(self, threshold: int) -> "PairSupportTable":
        """The pairs with support at least ``threshold``."""
        return PairSupportTable(t for t in self if t[2] >= threshold)


def build_vertical(db: TransactionDB) -> VerticalIndex:
    """Turn the transactions into the tidlist of every item."""
    lengths = np.array([len(t) for t in db.transactions], dtype=np.int64)
    if db.transactions:
        items = np.concatenate(db.transactions)
    else:
        items = np.empty(0, dtype=np.int64)
    tids = np.repeat(np.arange(len(lengths), dtype=np.int64), lengths)
    # tids are ascending, a stable sort keeps them ascending per item
    grouped = tids[np.argsort(items, kind="stable")]
    counts = np.bincount(items, minlength=db.n_items)
    tidlists = np.split(grouped, np.cumsum(counts)[:-1]) if db.n_items else []
    return VerticalIndex(tidlists, db.n_transactions, db.item_ids)


def filter_items(
    vertical: VerticalIndex, minsup: int
) -> typing.Tuple[VerticalIndex, np.ndarray]:
    """Drop the items with support below ``minsup``.

    :raise ValueError: When ``minsup`` < 1.
    :return: The index of the kept items, renumbered densely, and the map of
        old to new item ids (-1 for dropped items).
    """
    if minsup < 1:
        raise ValueError(f"minsup must be >= 1 (was {minsup})")
    kept = np.flatnonzero(vertical.sizes >= minsup)
    id_map = np.full(len(vertical), -1, dtype=np.int64)
    id_map[kept] = np.arange(len(kept), dtype=np.int64)
    filtered = VerticalIndex(
        [vertical.tidlists[i] for i in kept],
        vertical.n_transactions,
        vertical.item_ids[kept],
    )
    logger.info(
        "kept %d of %d items with support >= %d", len(kept), len(vertical), minsup
    )
    return filtered, id_map


def collection_params(vertical: VerticalIndex, seed: int) -> UniverseParams:
    """Universe parameters for the transaction ids of ``vertical``."""
    return derive_params(max(vertical.n_transactions - 1, 0), seed)


def collection_ranges(
    sizes: np.ndarray, params: UniverseParams, r_min: int = DEFAULT_R_MIN
) -> np.ndarray:
    """Table range of the batmap for each set size.

    Empty sets get the smallest range the parameters allow.
    """
    if not is_power_of_two(r_min) or r_min < MIN_RANGE:
        raise ValueError(f"r_min must be a power of two >= {MIN_RANGE} (was {r_min})")
    floor = max(1 << params.s, r_min)
    return np.array(
        [table_range(int(size), params, r_min) if size else floor for size in sizes],
        dtype=np.int64,
    )


def build_collection(
    vertical: VerticalIndex,
    seed: int = 0,
    r_min: int = DEFAULT_R_MIN,
    max_loop: typing.Optional[int] = None,
    workers: int = 1,
) -> typing.Tuple[BatMapCollection, typing.List[typing.Tuple[int, int]]]:
    """Build the batmaps of all tidlists of ``vertical``.

    :param vertical: The tidlists.
    :param seed: Seed of the permutations.
    :param r_min: Smallest table range.
    :param max_loop: Insertion rounds before giving up (default per batmap).
    :param workers: Number of threads building batmaps.
    :return: The collection, sorted by tidlist size, and the ``(position,
        transaction)`` pair of every failed insertion.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1 (was {workers})")
    params = collection_params(vertical, seed)
    perms = params.permutations()
    sizes = vertical.sizes
    order = np.argsort(sizes, kind="stable")
    ranges = collection_ranges(sizes[order], params, r_min)
    r0 = int(ranges[0]) if len(ranges) else max(1 << params.s, r_min)

    def build(position):
        return build_batmap(
            vertical.tidlists[order[position]],
            params,
            perms,
            int(ranges[position]),
            r0,
            max_loop,
        )

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(build, range(len(order))))
    if outcomes:
        payload = np.concatenate([o.batmap.entries for o in outcomes])
    else:
        payload = np.empty(0, dtype=np.uint8)
    failures = [
        (position, tid)
        for position, outcome in enumerate(outcomes)
        for tid in outcome.failed
    ]
    collection = BatMapCollection(
        params,
        r0,
        payload,
        ranges,
        sizes[order],
        vertical.item_ids[order],
        order=order,
        live_counts=[o.batmap.live_count for o in outcomes],
        moves=sum(o.move_count for o in outcomes),
    )
    logger.info(
        "built %d batmaps (%d bytes, r0=%d): %d failed insertions, %d moves",
        len(collection),
        collection.nbytes,
        r0,
        len(failures),
        collection.moves,
    )
    return collection, failures


def build_corrections(
    failures: typing.Iterable[typing.Tuple[int, int]],
    vertical: VerticalIndex,
    k: int,
    order: typing.Sequence[int],
) -> FallbackLedger:
    """Collect the pair corrections of all failed insertions.

    For every transaction ``b``, every position ``a`` whose insertion of ``b``
    failed and every other position ``c`` whose item occurs in ``b``, the
    triple ``(min(a, c), max(a, c), b)`` is recorded once.

    :param failures: ``(position, transaction)`` pairs from
        :func:`build_collection`.
    :param vertical: The tidlists the collection was built from.
    :param k: Tile edge length.
    :param order: Index in ``vertical`` of the item at each position.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1 (was {k})")
    ledger = FallbackLedger(failures, k)
    if not ledger.failures:
        return ledger
    failed_by_tid = collections.defaultdict(list)
    for position, tid in ledger.failures:
        failed_by_tid[tid].append(position)
    failed_tids = np.fromiter(failed_by_tid, dtype=np.int64)
    holders = collections.defaultdict(list)
    for position, item in enumerate(order):
        tidlist = vertical.tidlists[item]
        for tid in tidlist[np.isin(tidlist, failed_tids)]:
            holders[int(tid)].append(position)
    for tid, failed in failed_by_tid.items():
        for a in failed:
            for c in holders[tid]:
                if c != a:
                    ledger.add(a, c, tid)
    logger.info(
        "%d failed insertions give %d pair corrections",
        len(ledger.failures),
        ledger.correction_count,
    )
    return ledger


def _tile_mask(shape, diagonal: bool) -> np.ndarray:
    if diagonal:
        return np.triu(np.ones(shape, dtype=bool), 1)
    return np.ones(shape, dtype=bool)


def mine_pairs(  # pylint: disable=too-many-arguments,too-many-locals
    db: TransactionDB,
    minsup: int = 1,
    pair_threshold: int = 1,
    k: int = DEFAULT_TILE_SIZE,
    workers: int = 1,
    seed: int = 0,
    r_min: int = DEFAULT_R_MIN,
    max_loop: typing.Optional[int] = None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    emit_all: bool = False,
    stage_times: typing.Optional[typing.Dict[str, float]] = None,
) -> PairSupportTable:
    """Supports of all item pairs of ``db`` meeting ``pair_threshold``.

    :param db: The transactions.
    :param minsup: Items with lower support are dropped first.
    :param pair_threshold: Smallest support of an emitted pair.
    :param k: Tile edge length.
    :param workers: Threads building and counting batmaps.
    :param seed: Seed of the permutations. Does not affect the result.
    :param r_min: Smallest table range.
    :param max_loop: Insertion rounds before giving up (default per batmap).
    :param memory_budget: Largest collection size in bytes.
    :param emit_all: Emit every pair of kept items, including support 0.
    :param stage_times: When given, receives the seconds spent in the
        ``build``, ``count`` and ``correct`` stages.
    :raise ValueError: When ``minsup`` or ``pair_threshold`` is < 1.
    :raise MemoryError: When the collection would exceed ``memory_budget``.
    """
    if pair_threshold < 1:
        raise ValueError(f"pair_threshold must be >= 1 (was {pair_threshold})")
    times = {"build": 0.0, "count": 0.0, "correct": 0.0}
    start = time.perf_counter()
    vertical, _ = filter_items(build_vertical(db), minsup)
    params = collection_params(vertical, seed)
    needed = int(3 * collection_ranges(vertical.sizes, params, r_min).sum())
    if needed > memory_budget:
        raise MemoryError(
            f"collection needs {needed} bytes, budget is {memory_budget} bytes"
        )
    collection, failures = build_collection(vertical, seed, r_min, max_loop, workers)
    times["build"] = time.perf_counter() - start

    start = time.perf_counter()
    ledger = build_corrections(failures, vertical, k, collection.order)
    times["correct"] += time.perf_counter() - start

    threshold = 0 if emit_all else pair_threshold
    entries = []
    applied = 0.0
    start = time.perf_counter()
    for tile in count_all(collection, k, workers):
        counts = tile.counts
        correct_start = time.perf_counter()
        triples = ledger.tile(tile.p, tile.q)
        for a, c, _ in triples:
            counts[a - tile.row_start, c - tile.col_start] += 1
        applied += time.perf_counter() - correct_start
        rows, cols = np.nonzero(
            _tile_mask(counts.shape, tile.p == tile.q) & (counts >= threshold)
        )
        first = collection.item_ids[rows + tile.row_start]
        second = collection.item_ids[cols + tile.col_start]
        entries.extend(
            zip(
                np.minimum(first, second).tolist(),
                np.maximum(first, second).tolist(),
                counts[rows, cols].tolist(),
            )
        )
    times["count"] = time.perf_counter() - start - applied
    table = PairSupportTable(entries)
    logger.info(
        "%d pairs with support >= %d among %d items",
        len(table),
        threshold,
        len(collection),
    )
    times["correct"] += applied
    if stage_times is not None:
        stage_times.update(times)
    return table
