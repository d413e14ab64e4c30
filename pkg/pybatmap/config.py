# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Validated configurations of the mining pipeline and the benchmarks."""

import typing

from pydantic import Field, field_validator

from . import bench, mining
from ._pydantic import BaseModel
from .intersect import DEFAULT_TILE_SIZE
from .params import MIN_RANGE, is_power_of_two

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"


def _check_r_min(value: int) -> int:
    if not is_power_of_two(value):
        raise ValueError(f"r_min={value} is not a power of two")
    return value


class MiningConfig(BaseModel):
    """Parameters of :func:`pybatmap.mining.mine_pairs`."""

    # pylint: disable=too-few-public-methods
    minsup: int = Field(default=1, ge=1)
    """Items with fewer transactions are dropped before mining."""
    pair_threshold: int = Field(default=1, ge=1)
    """Smallest support of a reported pair."""
    tile_size: int = Field(default=DEFAULT_TILE_SIZE, ge=16)
    """Edge length of a counting tile in batmaps."""
    workers: int = Field(default=1, ge=1)
    """Threads building and counting batmaps."""
    seed: int = Field(default=0, ge=0, lt=1 << 64)
    """Seed of the mixing permutations."""
    r_min: int = Field(default=mining.DEFAULT_R_MIN, ge=MIN_RANGE)
    """Smallest table range, a power of two."""
    max_loop: typing.Optional[int] = Field(default=None, ge=1)
    """Insertion rounds before an insertion fails; ``None`` picks
    :func:`pybatmap.params.default_max_loop` per batmap."""
    memory_budget: int = Field(default=mining.DEFAULT_MEMORY_BUDGET, gt=0)
    """Largest collection size in bytes."""
    emit_all: bool = False
    """Report every pair of kept items, including support 0."""

    @field_validator("r_min")
    @classmethod
    def check_r_min(cls, value):
        # pylint: disable=missing-function-docstring
        return _check_r_min(value)

    def mine(
        self,
        db: mining.TransactionDB,
        stage_times: typing.Optional[typing.Dict[str, float]] = None,
    ) -> mining.PairSupportTable:
        """Run the mining pipeline on ``db`` with this configuration.

        :param db: The transactions.
        :param stage_times: Receives the seconds spent per stage.
        :raise MemoryError: When the collection exceeds
            :attr:`memory_budget`.
        """
        return mining.mine_pairs(
            db,
            minsup=self.minsup,
            pair_threshold=self.pair_threshold,
            k=self.tile_size,
            workers=self.workers,
            seed=self.seed,
            r_min=self.r_min,
            max_loop=self.max_loop,
            memory_budget=self.memory_budget,
            emit_all=self.emit_all,
            stage_times=stage_times,
        )


class BenchConfig(BaseModel):
    """Parameters of :func:`pybatmap.bench.bench_run`."""

    # pylint: disable=too-few-public-methods
    mode: bench.BenchMode
    """The workload, one of ``swar``, ``merge`` or ``pipeline`` (any case)."""
    set_size: int = Field(default=1 << 20, ge=1)
    """Elements per set in ``swar`` and ``merge`` mode."""
    items: int = Field(default=256, ge=2)
    """Items of the generated instance in ``pipeline`` mode."""
    density: float = Field(default=0.02, gt=0, le=1)
    """Item probability per transaction in ``pipeline`` mode."""
    total: int = Field(default=1 << 18, ge=1)
    """Total instance size in ``pipeline`` mode."""
    threads: int = Field(default=1, ge=1)
    """Worker threads."""
    repetitions: int = Field(default=5, ge=1)
    """Timed runs; the median is reported."""
    seed: int = Field(default=0, ge=0, lt=1 << 64)
    """Seed of the generated input."""

    def run(self) -> "bench.BenchReport":
        """Run the benchmark with this configuration."""
        return bench.bench_run(**self.model_dump(exclude={"mode"}), mode=self.mode)
