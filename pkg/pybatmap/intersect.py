# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Counting common elements of batmaps.

Two batmaps of one collection are compared word by word: every 32-bit word of
the larger batmap is paired with the aligned word of the smaller one and the
matching byte lanes are counted with a branch-free SWAR expression. All-pairs
counting is split into tiles of ``k`` × ``k`` batmaps that are handed to a pool
of worker threads.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import logging
import typing

import numpy as np

from .batmap import BatMap, _check_layout
from .libbatmap import (  # pylint: disable=import-error,no-name-in-module
    MICRO_TILE,
    count_superblocks,
    count_tile_block,
    swar_compare,
    swar_compare_array,
)

if typing.TYPE_CHECKING:  # pragma: no cover
    from .mining import BatMapCollection

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

__all__ = [
    "DEFAULT_TILE_SIZE",
    "TileResult",
    "align_position",
    "count_all",
    "count_pair",
    "count_tile",
    "swar_compare",
    "swar_compare_array",
    "tile_coordinates",
]

logger = logging.getLogger(__name__)

DEFAULT_TILE_SIZE = 2048


class TileResult(typing.NamedTuple):
    """Pair counts of the batmaps of one tile."""

    p: int
    """Tile row, covering batmaps ``p * k`` to ``p * k + k - 1``."""
    q: int
    """Tile column (``q >= p``)."""
    k: int
    """Tile edge length in batmaps."""
    counts: np.ndarray
    """``counts[i, j]`` is the count of batmaps ``p * k + i`` and
    ``q * k + j``. Tiles at the edge of the collection are trimmed. For
    ``p == q`` only entries above the diagonal are set."""

    @property
    def row_start(self) -> int:
        # pylint: disable=missing-function-docstring
        return self.p * self.k

    @property
    def col_start(self) -> int:
        # pylint: disable=missing-function-docstring
        return self.q * self.k

    def pairs(self) -> typing.Iterator[typing.Tuple[int, int, int]]:
        """Yield ``(i, j, count)`` in collection order for every counted pair
        of the tile."""
        rows, cols = self.counts.shape
        for i in range(rows):
            start = i + 1 if self.p == self.q else 0
            for j in range(start, cols):
                yield (
                    self.row_start + i,
                    self.col_start + j,
                    int(self.counts[i, j]),
                )


def align_position(p: int, r_small: int, r_large: int, r0: int) -> int:
    """Byte of a smaller batmap that byte ``p`` of a larger batmap is compared
    with.

    :param p: Byte index in the larger batmap.
    :param r_small: Table range of the smaller batmap.
    :param r_large: Table range of the larger batmap.
    :param r0: Superblock table range of the collection.
    :raise ValueError: When the ranges are not nested powers of two or ``p`` is
        outside the larger batmap.
    """
    _check_layout(r_small, r0)
    _check_layout(r_large, r_small)
    if not 0 <= p < 3 * r_large:
        raise ValueError(f"p={p} not in [0, {3 * r_large})")
    block = 3 * r0
    group, offset = divmod(p, block)
    return block * (group % (r_small // r0)) + offset


def _check_compatible(first: BatMap, second: BatMap):
    if first.params != second.params:
        raise ValueError("batmaps were encoded with different parameters")
    if first.r0 != second.r0:
        raise ValueError(f"batmaps use different r0 ({first.r0} != {second.r0})")


def count_pair(first: BatMap, second: BatMap) -> int:
    """Number of elements stored in both ``first`` and ``second``.

    The result is symmetric; the batmaps may have different table ranges.

    :raise ValueError: When the batmaps do not belong to the same collection
        encoding.
    """
    _check_compatible(first, second)
    large, small = (first, second) if first.r >= second.r else (second, first)
    return int(count_superblocks(large.entries, small.entries, large.r0))


def tile_coordinates(n: int, k: int) -> typing.List[typing.Tuple[int, int]]:
    """Coordinates ``(p, q)`` with ``p <= q`` of all tiles of ``n`` batmaps in
    lexicographic order."""
    if k < 1:
        raise ValueError(f"k must be >= 1 (was {k})")
    tiles = -(-n // k)
    return [(p, q) for p in range(tiles) for q in range(p, tiles)]


def count_tile(collection: BatMapCollection, p: int, q: int, k: int) -> TileResult:
    """Count all batmap pairs of tile ``(p, q)``.

    :param collection: The size-sorted collection.
    :param p: Tile row.
    :param q: Tile column.
    :param k: Tile edge length in batmaps.
    :raise ValueError: When ``k < 1``, ``p > q`` or the tile lies outside the
        collection.
    """
    n = len(collection)
    if k < 1:
        raise ValueError(f"k must be >= 1 (was {k})")
    if not 0 <= p <= q or q * k >= n:
        raise ValueError(f"no tile ({p}, {q}) of size {k} for {n} batmaps")
    row_start, row_stop = p * k, min((p + 1) * k, n)
    col_start, col_stop = q * k, min((q + 1) * k, n)
    counts = np.zeros((row_stop - row_start, col_stop - col_start), dtype=np.int64)
    count_tile_block(
        collection.payload,
        collection.offsets,
        collection.ranges,
        collection.r0,
        row_start,
        row_stop,
        col_start,
        col_stop,
        p == q,
        counts,
    )
    return TileResult(p, q, k, counts)


def count_all(
    collection: BatMapCollection,
    k: int = DEFAULT_TILE_SIZE,
    worker_count: int = 1,
) -> typing.Iterator[TileResult]:
    """Count every pair of batmaps of ``collection``.

    Tiles are counted by ``worker_count`` threads and yielded in ascending
    ``(p, q)`` order.

    :param k: Tile edge length, at least the micro-tile size 16.
    :param worker_count: Number of worker threads.
    :raise ValueError: When ``k`` or ``worker_count`` is too small.
    """
    if k < MICRO_TILE:
        raise ValueError(f"k must be >= {MICRO_TILE} (was {k})")
    if worker_count < 1:
        raise ValueError(f"worker_count must be >= 1 (was {worker_count})")
    if k % MICRO_TILE:
        logger.debug("tile size %d is not a multiple of %d", k, MICRO_TILE)
    coordinates = tile_coordinates(len(collection), k)
    logger.debug(
        "counting %d tiles of size %d with %d workers",
        len(coordinates),
        k,
        worker_count,
    )
    rows, cols = zip(*coordinates) if coordinates else ((), ())
    args = (itertools.repeat(collection), rows, cols, itertools.repeat(k))
    if worker_count == 1:
        yield from map(count_tile, *args)
        return
    with concurrent.futures.ThreadPoolExecutor(max_workers=worker_count) as pool:
        yield from pool.map(count_tile, *args)
