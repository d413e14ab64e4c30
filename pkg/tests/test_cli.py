# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

# pylint: disable=missing-module-docstring
# pylint: disable=missing-class-docstring
# pylint: disable=missing-function-docstring

import io
import json
import struct

import pytest

import pybatmap
from pybatmap.baselines import oracle_pair_supports
from pybatmap.cli import main
from pybatmap.io import MAGIC, parse_fimi, read_collection, read_supports, write_fimi
from pybatmap.mining import build_vertical

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"


@pytest.fixture
def fimi_file(tmp_path, small_db):
    path = tmp_path / "instance.dat"
    with open(path, "w", encoding="utf-8") as sink:
        write_fimi(small_db, sink)
    return path


def test_version(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["--version"])
    assert exc_info.value.code == 0
    assert capsys.readouterr().out.strip() == pybatmap.__version__


def test_no_command(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main([])
    assert exc_info.value.code == 2
    assert "usage: pybatmap" in capsys.readouterr().err


def test_gen(tmp_path):
    path = tmp_path / "gen.dat"
    args = ["gen", "--items", "30", "--density", "0.2", "--total", "500"]
    assert main(args + ["--seed", "4", "-o", str(path)]) == 0
    db = parse_fimi(path.read_text(encoding="utf-8"))
    assert db.total_size >= 500
    assert db.n_items <= 30


def test_gen_stdout(capsys):
    assert main(["gen", "--items", "3", "--density", "1", "--total", "6"]) == 0
    assert capsys.readouterr().out == "0 1 2\n0 1 2\n"


def test_gen_invalid(capsys):
    assert main(["gen", "--items", "0", "--density", "0.5", "--total", "5"]) == 1
    assert capsys.readouterr().err.startswith("pybatmap: error: ValueError:")


def test_build(tmp_path, fimi_file):
    # pylint: disable=redefined-outer-name
    path = tmp_path / "instance.bmap"
    assert main(["build", "-i", str(fimi_file), "-o", str(path), "--seed", "3"]) == 0
    with open(path, "rb") as source:
        collection = read_collection(source)
    assert collection.params.seed == 3
    exp = parse_fimi(fimi_file.read_text(encoding="utf-8")).item_ids.tolist()
    assert sorted(collection.item_ids.tolist()) == exp


def test_build_failures_warn(tmp_path, fimi_file, caplog):
    # pylint: disable=redefined-outer-name
    path = tmp_path / "instance.bmap"
    args = ["build", "-i", str(fimi_file), "-o", str(path), "--rmin", "16"]
    assert main(args + ["--maxloop", "1"]) == 0
    assert "insertions failed" in caplog.text


def test_build_invalid_rmin(tmp_path, fimi_file, capsys):
    # pylint: disable=redefined-outer-name
    path = tmp_path / "instance.bmap"
    assert main(["build", "-i", str(fimi_file), "-o", str(path), "--rmin", "48"]) == 1
    assert "ValidationError" in capsys.readouterr().err
    assert not path.exists()


def test_mine(tmp_path, fimi_file, small_db):
    # pylint: disable=redefined-outer-name
    path = tmp_path / "pairs.csv"
    args = ["mine", "-i", str(fimi_file), "--pair-threshold", "3"]
    assert main(args + ["--tile-size", "16", "--threads", "2", "-o", str(path)]) == 0
    with open(path, encoding="utf-8") as source:
        table = read_supports(source)
    assert table == oracle_pair_supports(build_vertical(small_db)).thresholded(3)


def test_mine_stdout_emit_all(fimi_file, capsys):
    # pylint: disable=redefined-outer-name
    assert main(["mine", "-i", str(fimi_file), "--minsup", "1000", "--emit-all"]) == 0
    assert capsys.readouterr().out == "item_a,item_b,support\n"


def test_mine_memory_budget(fimi_file, capsys):
    # pylint: disable=redefined-outer-name
    assert main(["mine", "-i", str(fimi_file), "--memory-budget", "10"]) == 1
    assert "MemoryError" in capsys.readouterr().err


def test_mine_missing_input(tmp_path, capsys):
    assert main(["mine", "-i", str(tmp_path / "missing.dat")]) == 1
    assert "FileNotFoundError" in capsys.readouterr().err


def test_mine_parse_error(tmp_path, capsys):
    path = tmp_path / "broken.dat"
    path.write_text("1 2\n1 b\n", encoding="utf-8")
    assert main(["mine", "-i", str(path)]) == 1
    assert "FimiParseError: line 2" in capsys.readouterr().err


def test_intersect(tmp_path, capsys):
    source = tmp_path / "small.dat"
    source.write_text("1 2\n1 2 7\n2 7\n1\n", encoding="utf-8")
    collection = tmp_path / "small.bmap"
    assert main(["build", "-i", str(source), "-o", str(collection)]) == 0
    capsys.readouterr()
    assert main(["intersect", "-i", str(collection), "--a", "1", "--b", "2"]) == 0
    assert capsys.readouterr().out == "2\n"
    args = ["intersect", "-i", str(collection), "--a", "7", "--b", "2", "--list"]
    assert main(args) == 0
    assert capsys.readouterr().out == "2\n1 2\n"


def test_intersect_unknown_item(tmp_path, fimi_file, capsys):
    # pylint: disable=redefined-outer-name
    collection = tmp_path / "instance.bmap"
    assert main(["build", "-i", str(fimi_file), "-o", str(collection)]) == 0
    args = ["intersect", "-i", str(collection), "--a", "10000", "--b", "0"]
    assert main(args) == 1
    assert "item 10000 is not in the collection" in capsys.readouterr().err


def test_intersect_bad_file(tmp_path, capsys):
    path = tmp_path / "bad.bmap"
    path.write_bytes(b"NOPE" + bytes(60))
    assert main(["intersect", "-i", str(path), "--a", "0", "--b", "1"]) == 1
    assert "BadMagicError" in capsys.readouterr().err


@pytest.mark.parametrize(
    "n_items", [pytest.param(1 << 40, id="2^40"), pytest.param(1 << 58, id="2^58")]
)
def test_intersect_huge_record_count(tmp_path, capsys, n_items):
    path = tmp_path / "huge.bmap"
    header = struct.pack("<4sB5Q", MAGIC, 1, 0, 126, 0, 64, n_items)
    path.write_bytes(header + bytes(64))
    assert main(["intersect", "-i", str(path), "--a", "0", "--b", "1"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("pybatmap: error: TruncatedFileError:")
    assert "Traceback" not in err


def test_bench(capsys):
    args = ["bench", "merge", "--set-size", "1000", "--repetitions", "2"]
    assert main(args + ["--threads", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["mode"] == "MERGE"
    assert report["threads"] == 2
    assert len(report["times"]) == 2
    assert report["bytes_per_second"] > 0


def test_bench_invalid_mode(capsys):
    with pytest.raises(SystemExit):
        main(["bench", "simd"])
    assert "invalid choice" in capsys.readouterr().err


def test_gen_build_mine_pipeline(tmp_path, capsys):
    fimi = tmp_path / "gen.dat"
    args = ["gen", "--items", "40", "--density", "0.1", "--total", "3000"]
    assert main(args + ["-o", str(fimi)]) == 0
    assert main(["-q", "mine", "-i", str(fimi), "--tile-size", "16"]) == 0
    table = read_supports(io.StringIO(capsys.readouterr().out))
    db = parse_fimi(fimi.read_text(encoding="utf-8"))
    exp = oracle_pair_supports(build_vertical(db)).thresholded(1)
    assert table == exp
