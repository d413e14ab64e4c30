# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

"""Command line interface ``pybatmap``.

Subcommands:

- ``gen``: write a random FIMI instance
- ``build``: store the batmaps of a FIMI instance in a collection file
- ``mine``: write the supports of frequent item pairs as CSV
- ``intersect``: count the common transactions of two items of a collection
- ``bench``: measure throughput and print a JSON report
"""

import argparse
import contextlib
import logging
import sys
import typing

import numpy as np

from . import __version__
from .bench import BenchMode
from .config import BenchConfig, MiningConfig
from .intersect import count_pair
from .io import (
    generate,
    parse_fimi,
    read_collection,
    write_collection,
    write_fimi,
    write_supports,
)
from .mining import build_collection, build_vertical

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"

logger = logging.getLogger(__name__)

PROG = "pybatmap"


@contextlib.contextmanager
def _open(path: str, mode: str):
    if path == "-":
        stream = sys.stdin if "r" in mode else sys.stdout
        yield stream.buffer if "b" in mode else stream
        return
    with open(path, mode, encoding=None if "b" in mode else "utf-8") as stream:
        yield stream


def _gen(args):
    db = generate(args.items, args.density, args.total, args.seed)
    with _open(args.output, "w") as sink:
        write_fimi(db, sink)
    logger.info("wrote %d transactions to %s", db.n_transactions, args.output)


def _build(args):
    config = MiningConfig(
        seed=args.seed, r_min=args.rmin, max_loop=args.maxloop, workers=args.threads
    )
    with _open(args.input, "r") as source:
        db = parse_fimi(source)
    collection, failures = build_collection(
        build_vertical(db), config.seed, config.r_min, config.max_loop, config.workers
    )
    if failures:
        logger.warning(
            "%d insertions failed; their transactions are not stored", len(failures)
        )
    with _open(args.output, "wb") as sink:
        write_collection(collection, sink)


def _mine(args):
    config = MiningConfig(
        minsup=args.minsup,
        pair_threshold=args.pair_threshold,
        tile_size=args.tile_size,
        workers=args.threads,
        seed=args.seed,
        r_min=args.rmin,
        max_loop=args.maxloop,
        memory_budget=args.memory_budget,
        emit_all=args.emit_all,
    )
    with _open(args.input, "r") as source:
        db = parse_fimi(source)
    table = config.mine(db)
    with _open(args.output, "w") as sink:
        write_supports(table, sink)


def _position(collection, item_id: int) -> int:
    try:
        return collection.position_of(item_id)
    except KeyError as exc:
        raise ValueError(f"item {item_id} is not in the collection") from exc


def _intersect(args):
    with _open(args.input, "rb") as source:
        collection = read_collection(source)
    first = collection[_position(collection, args.a)]
    second = collection[_position(collection, args.b)]
    print(count_pair(first, second))
    if args.list:
        common = np.intersect1d(
            first.decode(collection.perms), second.decode(collection.perms)
        )
        print(" ".join(str(tid) for tid in common))


def _bench(args):
    config = BenchConfig(
        mode=args.mode,
        set_size=args.set_size,
        items=args.items,
        density=args.density,
        total=args.total,
        threads=args.threads,
        repetitions=args.repetitions,
        seed=args.seed,
    )
    print(config.run().model_dump_json(indent=2))


def _add_build_options(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="permutation seed")
    parser.add_argument(
        "--rmin", type=int, default=64, help="smallest table range (power of two)"
    )
    parser.add_argument(
        "--maxloop", type=int, default=None, help="insertion rounds before failing"
    )
    parser.add_argument("--threads", type=int, default=1, help="worker threads")


def make_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``pybatmap`` command."""
    parser = argparse.ArgumentParser(
        prog=PROG, description="Frequent pair mining with batmaps."
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more log output"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a random FIMI instance")
    gen.add_argument("--items", type=int, required=True)
    gen.add_argument("--density", type=float, required=True)
    gen.add_argument("--total", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", default="-")
    gen.set_defaults(func=_gen)

    build = commands.add_parser("build", help="build a batmap collection file")
    build.add_argument("-i", "--input", required=True)
    build.add_argument("-o", "--output", required=True)
    _add_build_options(build)
    build.set_defaults(func=_build)

    mine = commands.add_parser("mine", help="mine frequent item pairs")
    mine.add_argument("-i", "--input", required=True)
    mine.add_argument("--minsup", type=int, default=1)
    mine.add_argument("--pair-threshold", type=int, default=1)
    mine.add_argument("--tile-size", type=int, default=2048)
    mine.add_argument("--memory-budget", type=int, default=4 << 30)
    mine.add_argument(
        "--emit-all", action="store_true", help="also report pairs below threshold"
    )
    mine.add_argument("-o", "--output", default="-")
    _add_build_options(mine)
    mine.set_defaults(func=_mine)

    intersect = commands.add_parser(
        "intersect", help="count common transactions of two items"
    )
    intersect.add_argument("-i", "--input", required=True)
    intersect.add_argument("--a", type=int, required=True, help="first item id")
    intersect.add_argument("--b", type=int, required=True, help="second item id")
    intersect.add_argument(
        "--list", action="store_true", help="also print the common transactions"
    )
    intersect.set_defaults(func=_intersect)

    bench = commands.add_parser("bench", help="measure throughput")
    bench.add_argument("mode", choices=[m.value for m in BenchMode])
    bench.add_argument("--set-size", type=int, default=1 << 20)
    bench.add_argument("--items", type=int, default=256)
    bench.add_argument("--density", type=float, default=0.02)
    bench.add_argument("--total", type=int, default=1 << 18)
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--repetitions", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=_bench)
    return parser


def _configure_logging(verbose: int, quiet: bool):
    if quiet:
        level = logging.ERROR
    else:
        level = max(logging.DEBUG, logging.WARNING - 10 * verbose)
    logging.basicConfig(level=level, format="%(levelname)s:%(name)s:%(message)s")


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """Run the ``pybatmap`` command.

    :return: The exit code, 1 when the command failed.
    """
    args = make_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        args.func(args)
    except (ValueError, TypeError, MemoryError, OSError) as exc:
        message = "; ".join(str(exc).splitlines())
        print(f"{PROG}: error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    return 0
