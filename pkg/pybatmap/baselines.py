# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Reference intersection counting: sorted lists, dense bitmaps and the exact
pair support oracles the batmap pipeline is checked against."""

from __future__ import annotations

import collections
import itertools
import typing

import numpy as np

from .libbatmap import (  # pylint: disable=import-error,no-name-in-module
    merge_count as _merge_count,
)
from .mining import PairSupportTable, TransactionDB, VerticalIndex

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_WORD_BITS = 64


def _strictly_increasing(values: np.ndarray) -> bool:
    return bool(np.all(values[1:] > values[:-1]))


class SortedList:
    """A set as strictly increasing array of transaction ids."""

    def __init__(self, values: typing.Iterable[int]):
        """
        :raise ValueError: When ``values`` is not strictly increasing.
        """
        if not isinstance(values, np.ndarray):
            values = list(values)
        values = np.ascontiguousarray(values, dtype=np.int64)
        if not _strictly_increasing(values):
            raise ValueError("values must be strictly increasing")
        values.flags.writeable = False
        self.values = values

    @classmethod
    def from_unsorted(cls, values: typing.Iterable[int]) -> "SortedList":
        """Sort and deduplicate ``values``."""
        if not isinstance(values, np.ndarray):
            values = list(values)
        return cls(np.unique(np.asarray(values, dtype=np.int64)))

    def __repr__(self):
        return f"<{type(self).__name__} len={len(self)}>"

    def __len__(self):
        return len(self.values)


def bit_count64(words: np.ndarray) -> np.ndarray:
    """Population count of every 64-bit word."""
    words = words - ((words >> np.uint64(1)) & _M1)
    words = (words & _M2) + ((words >> np.uint64(2)) & _M2)
    words += words >> np.uint64(4)
    words &= _M4
    words *= _H01
    words >>= np.uint64(56)
    return words


class DenseBitmap:
    """A set of transaction ids as one bit per transaction."""

    def __init__(self, words: np.ndarray, length: int):
        """
        :param words: ``ceil(length / 64)`` 64-bit words, bit ``b % 64`` of
            word ``b // 64`` standing for transaction ``b``.
        :param length: Number of transactions.
        """
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.shape != (-(-length // _WORD_BITS),):
            raise ValueError(f"{length} bits need {-(-length // _WORD_BITS)} words")
        self.words = words
        self.length = length

    @classmethod
    def from_tidlist(cls, tids: typing.Iterable[int], length: int) -> "DenseBitmap":
        """Set the bits of ``tids``.

        :raise ValueError: When a transaction id is outside [0, ``length``).
        """
        if not isinstance(tids, np.ndarray):
            tids = list(tids)
        tids = np.asarray(tids, dtype=np.int64)
        if tids.size and (tids.min() < 0 or tids.max() >= length):
            raise ValueError(f"transaction ids must be in [0, {length})")
        bits = np.zeros(-(-length // _WORD_BITS) * _WORD_BITS, dtype=np.uint8)
        bits[tids] = 1
        words = np.packbits(bits, bitorder="little").view("<u8").astype(np.uint64)
        return cls(words, length)

    def __repr__(self):
        return f"<{type(self).__name__} length={self.length}>"

    def __len__(self):
        return self.length

    def count(self) -> int:
        """Number of set bits."""
        return int(bit_count64(self.words.copy()).sum())


def merge_count(a, b, checked: bool = False) -> int:
    """Size of the intersection of two sorted lists by a two-finger scan.

    :param a: A :class:`SortedList` or strictly increasing integers.
    :param b: A :class:`SortedList` or strictly increasing integers.
    :param checked: Verify that plain arrays are strictly increasing.
    :raise ValueError: In checked mode, when an input is not strictly
        increasing.
    """
    arrays = []
    for values in (a, b):
        if isinstance(values, SortedList):
            arrays.append(values.values)
            continue
        if not isinstance(values, np.ndarray):
            values = list(values)
        values = np.ascontiguousarray(values, dtype=np.int64)
        if checked and not _strictly_increasing(values):
            raise ValueError("merge_count input is not strictly increasing")
        arrays.append(values)
    return int(_merge_count(*arrays))


def bitmap_count(a: DenseBitmap, b: DenseBitmap) -> int:
    """Number of bits set in both bitmaps.

    :raise ValueError: When the bitmap lengths differ.
    """
    if a.length != b.length:
        raise ValueError(f"bitmap lengths differ ({a.length} != {b.length})")
    return int(bit_count64(a.words & b.words).sum())


def oracle_pair_supports(vertical: VerticalIndex) -> PairSupportTable:
    """Support of every item pair by merging tidlists, including support 0."""
    tidlists = [SortedList(tidlist) for tidlist in vertical.tidlists]
    entries = []
    for a, c in itertools.combinations(range(len(tidlists)), 2):
        first, second = int(vertical.item_ids[a]), int(vertical.item_ids[c])
        entries.append(
            (
                min(first, second),
                max(first, second),
                merge_count(tidlists[a], tidlists[c]),
            )
        )
    return PairSupportTable(entries)


def transaction_pair_supports(db: TransactionDB) -> PairSupportTable:
    """Support of every item pair by enumerating the pairs of each
    transaction, including support 0."""
    supports = collections.Counter()
    for transaction in db.transactions:
        originals = sorted(int(i) for i in db.item_ids[transaction])
        supports.update(itertools.combinations(originals, 2))
    items = sorted(int(i) for i in db.item_ids)
    return PairSupportTable(
        (a, c, supports[a, c]) for a, c in itertools.combinations(items, 2)
    )
