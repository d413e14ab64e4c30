# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Construction of a single batmap.

Each element is stored twice, in two of three tables, by a cuckoo insertion that
cycles through the tables 1, 2, 3, 1, ... Once placement is stable every
occupied slot is compressed to one byte: the 7 most significant bits of the
permuted element and an indicator bit that is set on exactly one of the two
copies.
"""

from __future__ import annotations

import logging
import typing

import numpy as np

from .libbatmap import (  # pylint: disable=import-error,no-name-in-module
    VACANT,
    CuckooTables,
    build_slots,
)
from .params import (
    MAX_CODE,
    MIN_RANGE,
    NULL_CODE,
    TABLES,
    MixingPermutation,
    UniverseParams,
    default_max_loop,
    is_power_of_two,
)

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

logger = logging.getLogger(__name__)

NULL_ENTRY = NULL_CODE
"""Byte of a vacant slot (indicator bit 0, code 127)."""
INDICATOR = 0x80

# table (0-based) of the single bit left in a copy mask
_MASK_TO_TABLE = np.array([-1, 0, 1, -1, 2, -1, -1, -1], dtype=np.int64)

Permutations = typing.Sequence[MixingPermutation]


def _check_layout(r: int, r0: int):
    if not is_power_of_two(r) or not is_power_of_two(r0):
        raise ValueError(f"r={r} and r0={r0} must be powers of two")
    if r0 < MIN_RANGE:
        raise ValueError(f"r0={r0} must be >= {MIN_RANGE}")
    if r0 > r:
        raise ValueError(f"r0={r0} must not exceed r={r}")


def slot_position(params: UniverseParams, r: int, r0: int, t: int, v):
    """Designated slot of permuted value ``v`` in table ``t`` of a batmap.

    Works on single values as well as on :class:`numpy.ndarray` s.

    :param params: The universe parameters.
    :param r: Table range of the batmap.
    :param r0: Superblock table range of the collection.
    :param t: Table index in {1, 2, 3}.
    :param v: Permuted value(s) in [0, U).
    :return: :math:`3 r_0 \\lfloor (v \\bmod r) / r_0 \\rfloor + (t - 1) r_0
        + (v \\bmod r_0)`
    """
    # pylint: disable=unused-argument
    _check_layout(r, r0)
    if t not in TABLES:
        raise ValueError(f"t must be one of {TABLES} (was {t})")
    return 3 * r0 * ((v % r) // r0) + (t - 1) * r0 + (v % r0)


def indicator_bit(t_self: int, t_other: int) -> int:
    """Indicator bit of a copy in table ``t_self`` whose sibling is in
    ``t_other``.

    :raise ValueError: When the tables are equal or not table indices.
    :return: 1 iff ``t_other`` immediately precedes ``t_self`` in the cyclic
        order 1 → 2 → 3 → 1.
    """
    if t_self not in TABLES or t_other not in TABLES:
        raise ValueError(f"table indices must be in {TABLES}")
    if t_self == t_other:
        raise ValueError(f"copies must be in distinct tables (both {t_self})")
    return int((t_self - t_other) % 3 == 1)


def encode_entry(code: int, bit: int) -> int:
    """Compress an element code and its indicator bit into one entry byte.

    :raise ValueError: When ``code`` is outside [0, 126] or ``bit`` not 0 or 1.
    """
    if not 0 <= code <= MAX_CODE:
        raise ValueError(f"code must be in [0, {MAX_CODE}] (was {code})")
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1 (was {bit})")
    return (bit << 7) | code


class BatMap:
    """The three compressed tables of one set."""

    def __init__(
        self,
        params: UniverseParams,
        r: int,
        r0: int,
        entries: np.ndarray,
        live_count: typing.Optional[int] = None,
    ):
        """
        :param params: The universe parameters the entries are encoded with.
        :param r: Table range.
        :param r0: Superblock table range of the collection.
        :param entries: ``3 * r`` entry bytes.
        :param live_count: Number of stored elements. Recounted from
            ``entries`` when not given.
        :raise ValueError: When ``entries`` does not have ``3 * r`` bytes.

        .. py:attribute:: entries
           :type: numpy.ndarray

           The read-only entry bytes, superblock by superblock.
        """
        _check_layout(r, r0)
        entries = np.asarray(entries, dtype=np.uint8)
        if entries.shape != (3 * r,):
            raise ValueError(f"expected {3 * r} entry bytes (got {entries.shape})")
        entries.flags.writeable = False
        self.params = params
        self.r = r
        self.r0 = r0
        self.entries = entries
        if live_count is None:
            live_count = int(np.count_nonzero(entries != NULL_ENTRY)) // 2
        self.live_count = live_count

    def __repr__(self):
        return f"<{type(self).__name__} r={self.r} live_count={self.live_count}>"

    def __eq__(self, other):
        if not isinstance(other, BatMap):
            return NotImplemented
        return (
            self.params == other.params
            and self.r == other.r
            and self.r0 == other.r0
            and np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    @property
    def width(self) -> int:
        """Size in bytes."""
        return 3 * self.r

    def slot_tables(self) -> np.ndarray:
        """Table index (1-based) of every slot."""
        block = 3 * self.r0
        return (np.arange(self.width) % block) // self.r0 + 1

    def decode(self, perms: Permutations) -> np.ndarray:
        """Reconstruct the stored elements from the entry bytes alone.

        :param perms: The three permutations of the collection.
        :return: The stored elements in ascending order.
        """
        block = 3 * self.r0
        slots = np.flatnonzero(self.entries & INDICATOR)
        codes = (self.entries[slots] & NULL_CODE).astype(np.int64)
        low = (slots // block) * self.r0 + slots % self.r0
        values = (codes << self.params.s) | (low & self.params.low_mask)
        tables = (slots % block) // self.r0
        decoded = [perms[t].inverse(values[tables == t]) for t in range(3)]
        return np.sort(np.concatenate(decoded))


class BuildOutcome(typing.NamedTuple):
    """Result of :func:`build_batmap`."""

    batmap: BatMap
    """The built batmap."""
    failed: typing.List[int]
    """Elements that could not be placed, in ascending order."""
    move_count: int
    """Evictions performed during placement."""


def designated_positions(
    elements: np.ndarray,
    params: UniverseParams,
    perms: Permutations,
    r: int,
    r0: int,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Slots and codes of ``elements`` in the three tables.

    :return: ``(positions, codes)``, both of shape (3, n).
    """
    positions = np.empty((3, len(elements)), dtype=np.int64)
    codes = np.empty((3, len(elements)), dtype=np.uint8)
    for t, perm in zip(TABLES, perms):
        permuted = perm(elements)
        positions[t - 1] = slot_position(params, r, r0, t, permuted)
        codes[t - 1] = permuted >> params.s
    return positions, codes


def cuckoo_insert(tables: CuckooTables, x: int) -> typing.Optional[int]:
    """Insert one copy of element index ``x`` into ``tables``.

    :return: None when the insertion ended in a vacant slot, otherwise the
        element index left nestless after ``tables.max_loop`` rounds.
    """
    nestless = tables.insert(x)
    return None if nestless == VACANT else nestless


def _encode(slots, masks, codes, r: int, r0: int) -> np.ndarray:
    entries = np.full(3 * r, NULL_ENTRY, dtype=np.uint8)
    live = np.flatnonzero(slots != VACANT)
    elements = slots[live]
    tables = (live % (3 * r0)) // r0
    others = _MASK_TO_TABLE[masks[elements] & ~(1 << tables)]
    bits = ((tables - others) % 3 == 1).astype(np.uint8)
    entries[live] = (bits << 7) | codes[tables, elements]
    return entries


def build_batmap(
    elements: typing.Iterable[int],
    params: UniverseParams,
    perms: Permutations,
    r: int,
    r0: int,
    max_loop: typing.Optional[int] = None,
) -> BuildOutcome:
    """Build the batmap of a set.

    :param elements: Distinct elements in [0, U). They are inserted in
        ascending order.
    :param params: The universe parameters.
    :param perms: The three permutations of ``params``.
    :param r: Table range, see :func:`pybatmap.params.table_range`.
    :param r0: Superblock table range of the collection.
    :param max_loop: Full insertion rounds before an insertion fails
        (default: :func:`pybatmap.params.default_max_loop`).
    :raise ValueError: When elements repeat or fall outside [0, U).
    """
    _check_layout(r, r0)
    if not isinstance(elements, np.ndarray):
        elements = list(elements)
    values = np.sort(np.asarray(elements, dtype=np.int64))
    if values.size and (values[0] < 0 or values[-1] >= params.U):
        raise ValueError(f"elements must be in [0, {params.U})")
    if values.size > 1 and not np.all(values[1:] != values[:-1]):
        raise ValueError("elements must be distinct")
    if max_loop is None:
        max_loop = default_max_loop(r)
    positions, codes = designated_positions(values, params, perms, r, r0)
    slots, masks, failed, moves = build_slots(positions, 3 * r, max_loop)
    entries = _encode(slots, masks, codes, r, r0)
    batmap = BatMap(params, r, r0, entries, live_count=len(values) - len(failed))
    logger.debug(
        "built batmap r=%d for %d elements: %d failed, %d moves",
        r,
        len(values),
        len(failed),
        moves,
    )
    return BuildOutcome(batmap, sorted(int(values[i]) for i in failed), int(moves))


def contains(
    batmap: BatMap, params: UniverseParams, perms: Permutations, x: int
) -> bool:
    """Check whether ``x`` is stored in ``batmap``.

    :raise ValueError: When ``params`` is not the encoding of ``batmap`` or
        ``x`` is outside [0, U).
    """
    if params != batmap.params:
        raise ValueError("params do not match the batmap")
    if not 0 <= x < params.U:
        raise ValueError(f"x={x} not in [0, {params.U})")
    for t, perm in zip(TABLES, perms):
        permuted = int(perm([x])[0])
        slot = slot_position(params, batmap.r, batmap.r0, t, permuted)
        entry = int(batmap.entries[slot])
        if entry != NULL_ENTRY and (entry & NULL_CODE) == permuted >> params.s:
            return True
    return False
