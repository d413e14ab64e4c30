# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Shared universe encoding and the seeded mixing permutations of a collection.

Every batmap of a collection stores, for each element ``x`` and table ``t``, only
the 7 most significant bits of :math:`\\pi_t(x)`. The universe is therefore
restricted to :math:`U = 127 \\cdot 2^s` values so that the stored code is always
in [0, 126] and code 127 stays free for the NULL entry.
"""

import typing

import numpy as np
from pydantic import ConfigDict, Field, model_validator

from ._pydantic import BaseModel

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

MAX_CODE = 126
"""Largest element code that can be stored in an entry."""
NULL_CODE = 127
"""Reserved code of a vacant slot."""
TABLES = (1, 2, 3)
"""Table indices."""
MIX_ROUNDS = 4
"""Number of multiply/xor-shift rounds of a :class:`MixingPermutation`."""
MAX_ID_LIMIT = 1 << 56
MIN_RANGE = 4
"""Smallest table range; superblocks must hold whole 32-bit words."""


def _bit_length(value: int) -> int:
    return int(value).bit_length()


def is_power_of_two(value: int) -> bool:
    # pylint: disable=missing-function-docstring
    return value > 0 and (value & (value - 1)) == 0


class UniverseParams(BaseModel):
    """Encoding parameters shared by all batmaps of a collection."""

    model_config = ConfigDict(frozen=True)

    max_id: int = Field(ge=0, lt=MAX_ID_LIMIT)
    """Largest element value any set may contain."""
    s: int = Field(ge=0)
    """Shift that moves the 7 most significant bits of a permuted value down."""
    U: int = Field(gt=0)  # pylint: disable=invalid-name
    """Permutation domain size :math:`127 \\cdot 2^s`."""
    w: int = Field(gt=0, le=64)
    """Mixer word width in bits, smallest with :math:`2^w \\geq U`."""
    seed: int = Field(ge=0, lt=1 << 64)
    """Seed the three permutations are derived from."""

    @model_validator(mode="after")
    def check_encoding(self):
        # pylint: disable=missing-function-docstring
        if self.U != (NULL_CODE << self.s):
            raise ValueError(f"U={self.U} is not 127 * 2^{self.s}")
        if self.U < self.max_id + 1:
            raise ValueError(f"U={self.U} does not cover max_id={self.max_id}")
        if self.s > 0 and (NULL_CODE << (self.s - 1)) >= self.max_id + 1:
            raise ValueError(f"s={self.s} is not minimal for max_id={self.max_id}")
        if (1 << self.w) < self.U or (1 << (self.w - 1)) >= self.U:
            raise ValueError(f"w={self.w} is not the minimal width for U={self.U}")
        return self

    @property
    def low_mask(self) -> int:
        """Mask of the :attr:`s` least significant bits of a permuted value."""
        return (1 << self.s) - 1

    def permutations(self) -> typing.Tuple["MixingPermutation", ...]:
        """The three mixing permutations :math:`\\pi_1, \\pi_2, \\pi_3`."""
        return tuple(MixingPermutation(self, t) for t in TABLES)


def derive_params(max_id: int, seed: int) -> UniverseParams:
    """Derive the universe encoding for elements in [0, ``max_id``].

    :param max_id: Largest element value any set may contain.
    :param seed: 64-bit seed for the permutations.
    :return: The parameters with minimal shift ``s``.
    """
    shift = 0
    while (NULL_CODE << shift) < max_id + 1:
        shift += 1
    universe = NULL_CODE << shift
    return UniverseParams(
        max_id=max_id,
        s=shift,
        U=universe,
        w=_bit_length(universe - 1),
        seed=seed,
    )


def table_range(set_size: int, params: UniverseParams, r_min: int = 64) -> int:
    """Range ``r`` of each of the three tables of a batmap for a set.

    :param set_size: Number of elements of the set (≥ 1).
    :param params: The universe parameters of the collection.
    :param r_min: Floor for ``r``, a power of two >= :data:`MIN_RANGE`.
    :raise ValueError: When ``set_size`` < 1 or ``r_min`` is not a power of two
        >= :data:`MIN_RANGE`.
    :return: :math:`\\max(2^{\\lceil\\log_2(2|S|)\\rceil}, 2^s, r_{min})`
    """
    if set_size < 1:
        raise ValueError(f"set_size must be >= 1 (was {set_size})")
    if not is_power_of_two(r_min) or r_min < MIN_RANGE:
        raise ValueError(f"r_min must be a power of two >= {MIN_RANGE} (was {r_min})")
    return max(1 << _bit_length(2 * set_size - 1), 1 << params.s, r_min)


def default_max_loop(r: int) -> int:
    """Default number of full insertion rounds for tables of range ``r``."""
    return 16 + 3 * (_bit_length(r) - 1)


class MixingPermutation:
    """A seeded bijection on [0, U).

    Alternating rounds of odd-constant multiplication modulo :math:`2^w` and
    xor-with-right-shift mix all input bits into the low output bits; values
    that leave [0, U) are walked along their cycle until they come back.
    """

    def __init__(self, params: UniverseParams, t: int):
        """
        :param params: The universe parameters to permute in.
        :param t: The table index in {1, 2, 3}.
        :raise ValueError: When ``t`` is not a table index.

        .. py:attribute:: params
           :type: pybatmap.params.UniverseParams

           The universe parameters this permutation works in.

        .. py:attribute:: t
           :type: int

           The table index of this permutation.
        """
        if t not in TABLES:
            raise ValueError(f"t must be one of {TABLES} (was {t})")
        self.params = params
        self.t = t
        self._mask = np.uint64((1 << params.w) - 1)
        self._shift = np.uint64((params.w + 1) // 2)
        state = np.random.SeedSequence([params.seed, t]).generate_state(
            2 * MIX_ROUNDS, dtype=np.uint64
        )
        self._multipliers = [
            np.uint64((int(c) | 1) & int(self._mask)) for c in state[::2]
        ]
        self._xors = [np.uint64(int(c) & int(self._mask)) for c in state[1::2]]
        self._inverse_multipliers = [
            np.uint64(pow(int(m), -1, 1 << params.w)) for m in self._multipliers
        ]

    def __repr__(self):
        return f"<{type(self).__name__} t={self.t} U={self.params.U}>"

    @property
    def round_constants(self) -> typing.List[typing.Tuple[int, int]]:
        """(multiplier, xor constant) of each round."""
        return [(int(m), int(c)) for m, c in zip(self._multipliers, self._xors)]

    def _mix(self, values: np.ndarray) -> np.ndarray:
        for multiplier, xor in zip(self._multipliers, self._xors):
            values = (values * multiplier) & self._mask
            values ^= values >> self._shift
            values ^= xor
        return values

    def _unshift(self, values: np.ndarray) -> np.ndarray:
        result = values.copy()
        for _ in range(-(-self.params.w // int(self._shift))):
            result = values ^ (result >> self._shift)
        return result

    def _unmix(self, values: np.ndarray) -> np.ndarray:
        for inverse, xor in zip(
            reversed(self._inverse_multipliers), reversed(self._xors)
        ):
            values = values ^ xor
            values = self._unshift(values)
            values = (values * inverse) & self._mask
        return values

    def _walk(self, values: np.ndarray, step) -> np.ndarray:
        universe = np.uint64(self.params.U)
        result = step(values)
        outside = result >= universe
        while outside.any():
            result[outside] = step(result[outside])
            outside = result >= universe
        return result

    def _check_domain(self, values: np.ndarray):
        if values.size and (values.min() < 0 or values.max() >= self.params.U):
            raise ValueError(f"values must be in [0, {self.params.U})")

    def __call__(self, values: typing.Union[typing.Sequence[int], np.ndarray]):
        """Permute an array of values in [0, U).

        :raise ValueError: When any value is outside [0, U).
        :rtype: :class:`numpy.ndarray` of :class:`numpy.int64`
        """
        values = np.asarray(values, dtype=np.int64)
        self._check_domain(values)
        with np.errstate(over="ignore"):
            return self._walk(values.astype(np.uint64), self._mix).astype(np.int64)

    def inverse(self, values: typing.Union[typing.Sequence[int], np.ndarray]):
        """Map permuted values in [0, U) back to their preimages.

        :raise ValueError: When any value is outside [0, U).
        :rtype: :class:`numpy.ndarray` of :class:`numpy.int64`
        """
        values = np.asarray(values, dtype=np.int64)
        self._check_domain(values)
        with np.errstate(over="ignore"):
            return self._walk(values.astype(np.uint64), self._unmix).astype(np.int64)


def permute(perm: MixingPermutation, x: int) -> int:
    """Apply ``perm`` to a single value.

    :param perm: The permutation.
    :param x: A value in [0, U).
    :raise ValueError: When ``x`` is outside [0, U).
    """
    if not 0 <= x < perm.params.U:
        raise ValueError(f"x={x} not in [0, {perm.params.U})")
    return int(perm([x])[0])
