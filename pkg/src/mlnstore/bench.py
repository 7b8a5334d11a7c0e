"""Layer-aggregation benchmark over network size, and log-log scaling fits.

For every ``(backend, size)`` cell a fresh two-layer ER network is built,
the operator is run ``warmups`` times untimed and then ``reps`` times timed.
Only the operator call sits inside the timed region; building the input and
dropping the result layer between reps do not.  A cell that runs out of
memory (or hits the dense layout's cap) yields DNF records with no time and
the run moves on.
"""

from __future__ import annotations

import csv
import gc
import math
import statistics
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from mlnstore import errors
from mlnstore.backends import BACKENDS, DEMO_BACKENDS, make_store
from mlnstore.generator import ErConfig, generate_er, layer_name
from mlnstore.operators import diff_layer, filter_layer, flatten_layer, project_layer

CSV_HEADER = ("backend", "operator", "size", "rep", "seconds")
DEFAULT_SIZES = (100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000, 100000)
DEFAULT_BACKENDS = ("adjacency", "matrix")
DIMENSION = "layer"
FILTER_PREDICATE = "degree >= 4"

_SRC, _TGT = layer_name(0), layer_name(1)

BENCH_OPERATORS: dict[str, Callable] = {
    "flatten": lambda s, into: flatten_layer(s, DIMENSION, _SRC, _TGT, into),
    "project": lambda s, into: project_layer(s, DIMENSION, _SRC, _TGT, into),
    "diff": lambda s, into: diff_layer(s, DIMENSION, _SRC, _TGT, into),
    "filter": lambda s, into: filter_layer(s, (DIMENSION, _SRC), FILTER_PREDICATE, into),
    # timing self-test: measures the harness alone
    "noop": lambda s, into: None,
}


@dataclass(frozen=True)
class BenchRecord:
    backend: str
    operator: str
    size: int
    rep: int
    seconds: Optional[float]

    @property
    def dnf(self) -> bool:
        return self.seconds is None

    def row(self) -> tuple:
        secs = "" if self.seconds is None else repr(self.seconds)
        return (self.backend, self.operator, self.size, self.rep, secs)


@dataclass
class BenchConfig:
    operator: str = "flatten"
    backends: tuple[str, ...] = DEFAULT_BACKENDS
    sizes: tuple[int, ...] = DEFAULT_SIZES
    degree: float = 4.0
    reps: int = 5
    warmups: int = 1
    seed: int = 0
    output: Optional[str] = None
    allow_dense: bool = False
    layers: int = field(default=2, repr=False)

    def validate(self) -> None:
        if self.operator not in BENCH_OPERATORS:
            raise errors.UnknownOperator(
                f"unknown operator {self.operator!r}; choose from {sorted(BENCH_OPERATORS)}"
            )
        known = set(BACKENDS) | (set(DEMO_BACKENDS) if self.allow_dense else set())
        for b in self.backends:
            if b not in known:
                raise errors.UnknownBackend(f"unknown backend {b!r}; choose from {sorted(known)}")
        if self.reps < 1:
            raise errors.InvalidConfig("reps must be >= 1")
        if self.warmups < 0:
            raise errors.InvalidConfig("warmups must be >= 0")
        if not self.sizes or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise errors.InvalidConfig(f"sizes must be strictly increasing, got {self.sizes}")


def timed(fn: Callable[[], object]) -> float:
    """Wall-clock seconds of one call on the monotonic ns clock (never 0)."""
    start = time.perf_counter_ns()
    fn()
    return max(time.perf_counter_ns() - start, 1) / 1e9


def build_input(backend: str, size: int, degree: float, seed: int, allow_dense: bool = False, layers: int = 2):
    store = make_store(backend, allow_dense=allow_dense)
    generate_er(ErConfig(layers=layers, nodes=size, degree=degree, seed=seed, dimension=DIMENSION), store)
    return store


def _run_cell(config: BenchConfig, backend: str, size: int) -> Iterator[BenchRecord]:
    op = BENCH_OPERATORS[config.operator]
    done = 0
    store = None
    try:
        store = build_input(backend, size, config.degree, config.seed, config.allow_dense, config.layers)
        for w in range(config.warmups):
            _once(store, op, f"warmup{w}")
        for rep in range(config.reps):
            secs = _once(store, op, f"result{rep}")
            done += 1
            yield BenchRecord(backend, config.operator, size, rep, secs)
    except MemoryError:
        store = None
        gc.collect()
        for rep in range(done, config.reps):
            yield BenchRecord(backend, config.operator, size, rep, None)


def _once(store, op, into: str) -> float:
    secs = timed(lambda: op(store, into))
    if store.has_layer(DIMENSION, into):
        store.delete_layer(DIMENSION, into)
    return secs


def run_bench(config: BenchConfig) -> Iterator[BenchRecord]:
    """Yield records in execution order: backends outer, sizes inner, then reps."""
    config.validate()
    for backend in config.backends:
        for size in config.sizes:
            yield from _run_cell(config, backend, size)
            gc.collect()


def write_csv(records: Iterable[BenchRecord], fh) -> list[BenchRecord]:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    out = []
    for rec in records:
        writer.writerow(rec.row())
        fh.flush()
        out.append(rec)
    return out


def read_csv(fh) -> list[BenchRecord]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise errors.InsufficientData(f"unexpected CSV header {header!r}")
    rows = []
    for backend, operator, size, rep, secs in reader:
        rows.append(BenchRecord(backend, operator, int(size), int(rep), float(secs) if secs else None))
    return rows


# ---------------------------------------------------------------- fitting


@dataclass(frozen=True)
class ScalingFit:
    backend: str
    operator: str
    slope: float
    intercept: float
    r2: float
    sizes: tuple[int, ...]

    def line(self) -> str:
        return f"{self.backend},{self.operator},slope={self.slope:.4f},r2={self.r2:.4f},points={len(self.sizes)}"


def loglog_fit(sizes, seconds) -> tuple[float, float, float]:
    """Least-squares line through ``(log10 size, log10 seconds)``: slope, intercept, R^2."""
    x = np.log10(np.asarray(sizes, dtype=float))
    y = np.log10(np.asarray(seconds, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def fit_scaling(
    records: Iterable[BenchRecord], min_size: int | None = None, max_size: int | None = None
) -> list[ScalingFit]:
    """Fit median seconds against size for each (backend, operator); DNF rows are skipped."""
    cells: dict[tuple[str, str], dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.dnf:
            continue
        if (min_size is not None and r.size < min_size) or (max_size is not None and r.size > max_size):
            continue
        cells[(r.backend, r.operator)][r.size].append(r.seconds)
    if not cells:
        raise errors.InsufficientData("no timed records in range")
    fits = []
    for (backend, operator), by_size in sorted(cells.items()):
        sizes = sorted(by_size)
        if len(sizes) < 3:
            raise errors.InsufficientData(
                f"{backend}/{operator} has {len(sizes)} sizes with timings; need at least 3"
            )
        medians = [statistics.median(by_size[s]) for s in sizes]
        if any(not m > 0 or math.isinf(m) for m in medians):
            raise errors.InsufficientData(f"{backend}/{operator} has non-positive timings")
        slope, intercept, r2 = loglog_fit(sizes, medians)
        fits.append(ScalingFit(backend, operator, slope, intercept, r2, tuple(sizes)))
    return fits
