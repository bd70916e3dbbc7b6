import csv
import io

import numpy as np
import pytest

from posetvote.bench import FIELDS, BenchGrid, BenchRow, rows_to_csv, run_grid, run_instance


def _content(rows):
    return [{k: v for k, v in vars(r).items() if k not in ("time_ms", "speedup")} for r in rows]


def test_single_cell_grid():
    rows = run_grid(BenchGrid(datasets=("rsm-mix",), rules=("borda",), methods=("nw",), ms=(6,), ns=(8,)))
    assert len(rows) == 1 and rows[0].method == "nw" and rows[0].time_ms >= 0


def test_grid_order_and_determinism():
    grid = BenchGrid(datasets=("chains", "partitioned"), rules=("plurality", "borda"),
                     methods=("nw", "auto"), ms=(5,), ns=(4, 8), instances=2, seed=5)
    a = run_grid(grid)
    b = run_grid(grid, threads=4)
    assert len(a) == 2 * 2 * 2 * 2 * 2
    assert _content(a) == _content(b)
    cells = [(r.dataset_type, r.rule, r.n, r.seed) for r in a[::2]]
    assert cells == [(d, r, n, s) for d in ("chains", "partitioned") for r in ("plurality", "borda")
                     for n in (4, 8) for s in (5, 6)]
    assert {r.method for r in a} == {"nw", "flow", "threephase"}


def test_csv_schema():
    rows = [BenchRow("chains", "borda", 3, 2, 0, "nw", 1, time_ms=1.23456),
            BenchRow("chains", "borda", 3, 2, 0, "nw-speedup", 1, speedup=4.5)]
    text = rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert tuple(parsed[0]) == FIELDS
    assert parsed[0]["time_ms"] == "1.235" and parsed[0]["speedup"] == ""
    assert parsed[1]["speedup"] == "4.500" and parsed[1]["timed_out"] == "0"


def test_timed_out_rows_only_for_ilp_methods():
    row = run_instance("rsm-mix", "borda", "ilp", 10, 30, 4, timeout=0.0)
    assert row.timed_out and row.method == "ilp"
    assert not run_instance("rsm-mix", "borda", "nw", 10, 30, 4).timed_out


def test_grid_validation():
    with pytest.raises(ValueError):
        BenchGrid(datasets=("nope",))
    with pytest.raises(ValueError):
        BenchGrid(methods=("simplex",))
    with pytest.raises(ValueError):
        BenchGrid(rules=("median",))
    with pytest.raises(ValueError):
        BenchGrid(instances=0)


def test_nw_time_grows_with_n():
    rows = run_grid(BenchGrid(datasets=("rsm-mix",), rules=("borda",), methods=("nw",),
                              ms=(100,), ns=(10, 100), instances=5))
    mean = {n: np.mean([r.time_ms for r in rows if r.n == n]) for n in (10, 100)}
    assert mean[100] > mean[10]
