"""Seeded benchmark grid producing one CSV row per instance.

Methods are the possible-winner methods of :func:`pw_set` plus ``nw`` and
``nw-baseline`` for the necessary-winner routines.  With ``speedup=True``
each (dataset, rule, size, seed) cell additionally gets an ``nw-speedup`` row
holding ``baseline_time / optimized_time``.
"""

from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

from .nw import nw_set, nw_set_baseline
from .pipeline import METHODS, pw_set
from .posetgen import GENERATORS
from .rules import parse_rule

NW_METHODS = ("nw", "nw-baseline")
BENCH_METHODS = NW_METHODS + METHODS


@dataclass
class BenchRow:
    dataset_type: str
    rule: str
    m: int
    n: int
    seed: int
    method: str
    winners_count: int
    confirmed_phase1: int = 0
    pruned_phase1: int = 0
    confirmed_phase2: int = 0
    phase3: int = 0
    ilp_calls: int = 0
    time_ms: float = 0.0
    timed_out: bool = False
    speedup: float | None = None


FIELDS = tuple(f.name for f in fields(BenchRow))


@dataclass
class BenchGrid:
    datasets: tuple[str, ...] = ("rsm-mix",)
    rules: tuple[str, ...] = ("borda",)
    methods: tuple[str, ...] = ("nw",)
    ms: tuple[int, ...] = (10,)
    ns: tuple[int, ...] = (10,)
    instances: int = 1
    seed: int = 0
    timeout: float = 2000.0
    unique: bool = False
    speedup: bool = False

    def __post_init__(self):
        for d in self.datasets:
            if d not in GENERATORS:
                raise ValueError(f"unknown dataset {d!r}; expected one of {sorted(GENERATORS)}")
        for meth in self.methods:
            if meth not in BENCH_METHODS:
                raise ValueError(f"unknown method {meth!r}; expected one of {BENCH_METHODS}")
        for r in self.rules:
            parse_rule(r)
        if self.instances < 1:
            raise ValueError("instances must be >= 1")

    def cells(self):
        """``(dataset, rule, m, n, seed)`` in grid order."""
        seeds = range(self.seed, self.seed + self.instances)
        return list(itertools.product(self.datasets, self.rules, self.ms, self.ns, seeds))


def run_instance(dataset: str, rule_text: str, method: str, m: int, n: int, seed: int,
                 timeout: float = 2000.0, unique: bool = False, profile=None) -> BenchRow:
    rule = parse_rule(rule_text)
    if profile is None:
        profile = GENERATORS[dataset](m, n, seed)
    row = BenchRow(dataset, rule.name, m, n, seed, method, 0)
    if method in NW_METHODS:
        profile.cover_edges()  # input form shared by both routines; not timed
        fn = nw_set if method == "nw" else nw_set_baseline
        t = time.perf_counter()
        winners = fn(profile, rule, unique)
        row.time_ms = (time.perf_counter() - t) * 1000.0
        row.winners_count = len(winners)
        return row
    t = time.perf_counter()
    possible, report = pw_set(profile, rule, method=method, timeout=timeout, unique=unique)
    row.time_ms = (time.perf_counter() - t) * 1000.0
    row.method = report.method
    row.winners_count = len(possible)
    row.confirmed_phase1 = len(report.confirmed_phase1)
    row.pruned_phase1 = len(report.pruned_phase1)
    row.confirmed_phase2 = len(report.confirmed_phase2)
    row.phase3 = len(report.undecided_into_phase3)
    row.ilp_calls = report.ilp_invocations
    row.timed_out = bool(report.timeout_candidates)
    return row


def _cell_rows(grid: BenchGrid, cell) -> list[BenchRow]:
    dataset, rule_text, m, n, seed = cell
    profile = GENERATORS[dataset](m, n, seed)
    rows = [run_instance(dataset, rule_text, meth, m, n, seed, grid.timeout, grid.unique, profile)
            for meth in grid.methods]
    if grid.speedup:
        opt = run_instance(dataset, rule_text, "nw", m, n, seed, unique=grid.unique, profile=profile)
        base = run_instance(dataset, rule_text, "nw-baseline", m, n, seed, unique=grid.unique, profile=profile)
        opt.method = "nw-speedup"
        opt.speedup = base.time_ms / max(opt.time_ms, 1e-6)
        rows.append(opt)
    return rows


def run_grid(grid: BenchGrid, threads: int = 1) -> list[BenchRow]:
    """All rows of ``grid``, in grid order whatever the number of worker threads."""
    cells = grid.cells()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda c: _cell_rows(grid, c), cells))
    else:
        chunks = [_cell_rows(grid, c) for c in cells]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows, destination=None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        d = asdict(row)
        d["time_ms"] = f"{row.time_ms:.3f}"
        d["speedup"] = "" if row.speedup is None else f"{row.speedup:.3f}"
        d["timed_out"] = int(row.timed_out)
        writer.writerow(d)
    text = buf.getvalue()
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text
