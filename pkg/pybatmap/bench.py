# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Throughput benchmarks of batmap comparison, sorted-list merging and the
mining pipeline.

All rates of a :class:`BenchReport` are derived from the measured times and the
exact number of bytes and elements a single run handles.
"""

import concurrent.futures
import logging
import statistics
import time
import typing

import numpy as np
from pydantic import Field, computed_field

from ._pydantic import BaseModel, EnumByName
from .baselines import merge_count
from .batmap import build_batmap
from .io import generate
from .libbatmap import (  # pylint: disable=import-error,no-name-in-module
    count_superblocks,
)
from .mining import (
    DEFAULT_R_MIN,
    build_vertical,
    collection_params,
    collection_ranges,
    mine_pairs,
)
from .params import derive_params, table_range

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

logger = logging.getLogger(__name__)


class BenchMode(EnumByName):
    """Benchmark workloads."""

    SWAR = "swar"
    """Word-parallel comparison of two batmaps."""
    MERGE = "merge"
    """Two-finger scan over two sorted arrays."""
    PIPELINE = "pipeline"
    """Frequent pair mining on a generated instance."""


class BenchReport(BaseModel):
    """Measured times of a benchmark and the rates derived from them."""

    mode: BenchMode
    set_size: int = Field(ge=0)
    """Elements per input set (items of the instance in ``pipeline`` mode)."""
    density: float = Field(gt=0, le=1)
    threads: int = Field(ge=1)
    times: typing.List[float]
    """Wall time of every run in seconds."""
    bytes_per_run: int = Field(ge=0)
    """Bytes of input read by one run."""
    elements_per_run: int = Field(ge=0)
    """Elements handled by one run."""
    result: int
    """Count computed by the workload, equal for every thread count."""
    stage_times: typing.Dict[str, float] = {}
    """Median seconds per pipeline stage."""

    @computed_field
    @property
    def median_time(self) -> float:
        """Median wall time in seconds."""
        return statistics.median(self.times)

    @computed_field
    @property
    def bytes_per_second(self) -> float:
        # pylint: disable=missing-function-docstring
        return self.bytes_per_run / self.median_time if self.median_time else 0.0

    @computed_field
    @property
    def elements_per_second(self) -> float:
        # pylint: disable=missing-function-docstring
        return self.elements_per_run / self.median_time if self.median_time else 0.0


def _random_set(rng: np.random.Generator, size: int, density: float) -> np.ndarray:
    universe = max(size, int(np.ceil(size / density)))
    return np.sort(rng.choice(universe, size=size, replace=False)).astype(np.int64)


def _chunks(stop: int, parts: int, step: int = 1) -> typing.List[typing.Tuple]:
    units = stop // step
    bounds = [step * (units * part // parts) for part in range(parts + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:]) if a < b]


def _time_runs(
    run: typing.Callable[[], int], repetitions: int
) -> typing.Tuple[typing.List[float], int]:
    times, results = [], set()
    for _ in range(repetitions):
        start = time.perf_counter()
        results.add(run())
        times.append(time.perf_counter() - start)
    if len(results) != 1:
        raise RuntimeError(f"benchmark runs disagree: {sorted(results)}")
    return times, results.pop()


def _bench_swar(pool, set_size, density, threads, repetitions, seed):
    # pylint: disable=too-many-arguments,too-many-locals
    rng = np.random.default_rng(seed)
    first = _random_set(rng, set_size, density)
    second = _random_set(rng, set_size, density)
    params = derive_params(int(max(first[-1], second[-1])), seed)
    perms = params.permutations()
    r = table_range(set_size, params)
    r0 = min(r, DEFAULT_R_MIN)
    large = build_batmap(first, params, perms, r, r0).batmap
    small = build_batmap(second, params, perms, r, r0).batmap
    spans = _chunks(large.width, threads, 3 * r0)

    def count(span):
        return count_superblocks(large.entries, small.entries, r0, *span)

    times, result = _time_runs(lambda: sum(pool.map(count, spans)), repetitions)
    return times, large.width + small.width, large.live_count + small.live_count, result


def _bench_merge(pool, set_size, density, threads, repetitions, seed):
    # pylint: disable=too-many-arguments
    rng = np.random.default_rng(seed)
    first = _random_set(rng, set_size, density)
    second = _random_set(rng, set_size, density)
    pieces = []
    for start, stop in _chunks(set_size, threads):
        low = np.searchsorted(second, first[start], side="left")
        high = (
            len(second)
            if stop == set_size
            else np.searchsorted(second, first[stop], side="left")
        )
        pieces.append((first[start:stop], second[low:high]))

    def count(piece):
        return merge_count(*piece)

    times, result = _time_runs(lambda: sum(pool.map(count, pieces)), repetitions)
    return times, 2 * 8 * set_size, 2 * set_size, result


def _bench_pipeline(items, density, total, threads, repetitions, seed):
    # pylint: disable=too-many-arguments
    db = generate(items, density, total, seed)
    vertical = build_vertical(db)
    params = collection_params(vertical, seed)
    nbytes = int(3 * collection_ranges(vertical.sizes, params).sum())
    stages = []

    def run():
        stage_times = {}
        table = mine_pairs(db, workers=threads, seed=seed, stage_times=stage_times)
        stages.append(stage_times)
        return len(table)

    times, result = _time_runs(run, repetitions)
    stage_times = {
        stage: statistics.median(run[stage] for run in stages) for stage in stages[0]
    }
    return times, nbytes, db.total_size, result, stage_times


def bench_run(  # pylint: disable=too-many-arguments
    mode: BenchMode,
    set_size: int = 1 << 20,
    items: int = 256,
    density: float = 0.02,
    total: int = 1 << 18,
    threads: int = 1,
    repetitions: int = 5,
    seed: int = 0,
) -> BenchReport:
    """Run a benchmark workload ``repetitions`` times.

    :param mode: The workload.
    :param set_size: Elements per set in ``swar`` and ``merge`` mode.
    :param items: Items of the generated instance in ``pipeline`` mode.
    :param density: Ratio of set size to universe size in ``swar`` and
        ``merge`` mode, item probability in ``pipeline`` mode.
    :param total: Total instance size in ``pipeline`` mode.
    :param threads: Worker threads splitting the work.
    :param repetitions: Number of timed runs.
    :param seed: Seed of the generated input.
    :raise RuntimeError: When runs compute different results.
    """
    mode = BenchMode._validate(mode)  # pylint: disable=protected-access
    if threads < 1 or repetitions < 1:
        raise ValueError("threads and repetitions must be >= 1")
    stage_times = {}
    if mode is BenchMode.PIPELINE:
        times, nbytes, elements, result, stage_times = _bench_pipeline(
            items, density, total, threads, repetitions, seed
        )
        set_size = items
    else:
        bench = _bench_swar if mode is BenchMode.SWAR else _bench_merge
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            times, nbytes, elements, result = bench(
                pool, set_size, density, threads, repetitions, seed
            )
    report = BenchReport(
        mode=mode,
        set_size=set_size,
        density=density,
        threads=threads,
        times=times,
        bytes_per_run=nbytes,
        elements_per_run=elements,
        result=result,
        stage_times=stage_times,
    )
    logger.info(
        "%s: median %.6f s, %.3e bytes/s, %.3e elements/s",
        mode.value,
        report.median_time,
        report.bytes_per_second,
        report.elements_per_second,
    )
    return report
