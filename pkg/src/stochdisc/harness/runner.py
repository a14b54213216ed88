"""Seeded experiment runs, sweeps and CSV/JSON persistence."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..adversary import ReplayGuesses, build_oblivious_script, play_script, run_adaptive_game
from ..algorithms import AlternatingColorer, ConstantColorer, PotentialColorer, RandomColorer
from ..envy import run_online_envy
from ..interval import derive_params, run_online_interval
from ..separation import facts_sweep, separation_tightness_fixture
from ..stripe import run_online_stripe
from ..tree import OVERFLOW, default_lambda
from .config import ExperimentConfig

SCHEMA_VERSION = 1

# number of facts-check samples / tightness path samples when not configured
DEFAULT_FACTS_SAMPLES = 10_000
DEFAULT_PATH_SAMPLES = 100_000


class HarnessIOError(OSError):
    """Writing results failed; ``rows`` holds everything computed so far."""

    def __init__(self, message: str, rows: list):
        super().__init__(message)
        self.rows = rows


@dataclass
class ResultRow:
    kind: str
    n: int
    seed: int
    algorithm: str
    h: int | None = None
    m: int | None = None
    lam: float | None = None
    running_interval_disc: int | None = None
    final_interval_disc: int | None = None
    tree_disc: int | None = None
    stripe_disc_x: int | None = None
    stripe_disc_y: int | None = None
    stripe_disc: int | None = None
    envy_p1: float | None = None
    envy_p2: float | None = None
    envy_final: float | None = None
    envy_running: float | None = None
    ordinal_envy: int | None = None
    chain_ok: bool | None = None
    l_over_q: float | None = None
    facts_pass_rate: float | None = None
    wall_time_ms: float | None = None


COLUMNS = ["schema_version"] + [f.name for f in fields(ResultRow)]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else OVERFLOW
    return value


def row_record(row: ResultRow) -> dict:
    """The row as written: schema version first, unset fields empty, non-finite as the overflow flag."""
    out = {"schema_version": SCHEMA_VERSION}
    out.update({k: _fmt(v) for k, v in asdict(row).items()})
    return out


def row_json(row: ResultRow) -> dict:
    """JSON mirror of :func:`row_record`: native numbers, null for unset, the overflow flag for non-finite."""
    out = {"schema_version": SCHEMA_VERSION}
    for k, v in asdict(row).items():
        out[k] = OVERFLOW if isinstance(v, float) and not math.isfinite(v) else v
    return out


def cell_rngs(seed: int, n: int, count: int = 2) -> list[np.random.Generator]:
    """Independent generators for one (seed, n) cell: [arrivals, algorithm, ...]."""
    root = np.random.SeedSequence(seed, spawn_key=(n,))
    return [np.random.default_rng(s) for s in root.spawn(count)]


# --- single cells ---------------------------------------------------------------


def _colorer(config: ExperimentConfig, rng: np.random.Generator):
    if config.algorithm == "potential":
        return PotentialColorer.for_n(config.n, config.C, config.lam)
    if config.algorithm == "random":
        return RandomColorer(rng)
    if config.algorithm == "constant":
        return ConstantColorer(1)
    return AlternatingColorer()


def _embedding(config: ExperimentConfig):
    params = derive_params(config.n, config.C)
    lam = default_lambda(config.n) if config.lam is None else config.lam
    return params, lam


def _interval(config, seed, row):
    arrivals_rng, algo_rng = cell_rngs(seed, config.n)
    params, lam = _embedding(config)
    run = run_online_interval(arrivals_rng.random(config.n), params, lam, config.algorithm, algo_rng)
    row.h, row.m, row.lam = params.height, params.arity, lam
    row.running_interval_disc = run.running_discrepancy
    row.final_interval_disc = run.final_discrepancy
    row.tree_disc = run.tree_discrepancy


def _stripe(config, seed, row):
    arrivals_rng, algo_rng = cell_rngs(seed, config.n)
    params, lam = _embedding(config)
    run = run_online_stripe(arrivals_rng.random((config.n, 2)), params, lam, config.algorithm, algo_rng)
    row.h, row.m, row.lam = params.height, params.arity, lam
    row.stripe_disc_x, row.stripe_disc_y = run.disc_x, run.disc_y
    row.stripe_disc = run.stripe_discrepancy
    row.tree_disc = max(run.tree_discrepancy_x, run.tree_discrepancy_y)


def _envy(config, seed, row):
    arrivals_rng, algo_rng = cell_rngs(seed, config.n)
    params, lam = _embedding(config)
    run = run_online_envy(arrivals_rng.random((config.n, 2)), params, lam, "uniform", config.algorithm, algo_rng)
    row.h, row.m, row.lam = params.height, params.arity, lam
    row.stripe_disc_x, row.stripe_disc_y = run.stripe.disc_x, run.stripe.disc_y
    row.stripe_disc = run.stripe_discrepancy
    row.tree_disc = max(run.stripe.tree_discrepancy_x, run.stripe.tree_discrepancy_y)
    row.envy_p1, row.envy_p2 = run.cardinal_final
    row.envy_final = run.envy_final
    row.envy_running = run.envy_running
    row.ordinal_envy = max(run.ordinal_final)
    row.chain_ok = run.chain_ok


def _adaptive(config, seed, row):
    (algo_rng,) = cell_rngs(seed, config.n, 1)
    run = run_adaptive_game(_colorer(config, algo_rng), config.n)
    row.running_interval_disc = run.discrepancy
    row.final_interval_disc = run.discrepancy


def _oblivious(config, seed, row):
    script_rng, algo_rng = cell_rngs(seed, config.n)
    script = build_oblivious_script(config.n, script_rng)
    run = play_script(_colorer(config, algo_rng), script)
    row.running_interval_disc = run.discrepancy
    # what the guessed coloring itself would have scored
    row.final_interval_disc = play_script(ReplayGuesses(script), script).discrepancy


def _tightness(config, seed, row):
    (rng,) = cell_rngs(seed, config.n, 1)
    _, report = separation_tightness_fixture(
        config.arity, config.height, config.n, rng, config.samples or DEFAULT_PATH_SAMPLES
    )
    row.h, row.m, row.lam = config.height, config.arity, report.lam
    row.l_over_q = report.ratio


def _facts(config, seed, row):
    (rng,) = cell_rngs(seed, config.n, 1)
    lam = default_lambda(config.n) if config.lam is None else config.lam
    sweep = facts_sweep(config.n, config.samples or DEFAULT_FACTS_SAMPLES, rng, lam)
    row.lam = lam
    row.facts_pass_rate = sweep.pass_rate


_CELL = {
    "interval": _interval,
    "stripe": _stripe,
    "envy": _envy,
    "adversary-adaptive": _adaptive,
    "adversary-oblivious": _oblivious,
    "tightness": _tightness,
    "facts-check": _facts,
}


def run_cell(config: ExperimentConfig, seed: int) -> ResultRow:
    row = ResultRow(config.kind, config.n, seed, config.algorithm)
    start = time.perf_counter()
    _CELL[config.kind](config, seed, row)
    if config.timing:
        row.wall_time_ms = (time.perf_counter() - start) * 1e3
    return row


# --- writers --------------------------------------------------------------------


class RowWriter:
    """Streams rows to CSV or to a JSON document {"schema_version", "rows"}."""

    def __init__(self, path: Path, fmt: str):
        self.path = Path(path)
        self.fmt = fmt
        self._fh = None
        self._csv = None
        self._count = 0

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", newline="", encoding="utf-8")
        if self.fmt == "csv":
            self._csv = csv.DictWriter(self._fh, fieldnames=COLUMNS, lineterminator="\n")
            self._csv.writeheader()
        else:
            self._fh.write(f'{{"schema_version": {SCHEMA_VERSION}, "rows": [\n')
        self._fh.flush()
        return self

    def write(self, row: ResultRow):
        if self._csv is not None:
            self._csv.writerow(row_record(row))
        else:
            sep = ",\n" if self._count else ""
            self._fh.write(sep + json.dumps(row_json(row)))
        self._count += 1
        self._fh.flush()

    def __exit__(self, *exc):
        if self._csv is None and self._fh is not None:
            self._fh.write("\n]}\n")
        self._fh.close()
        return False


def read_rows(path: Path) -> list[dict]:
    """Records from a CSV or JSON results file, values as written."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return json.loads(text)["rows"]
    return list(csv.DictReader(text.splitlines()))


# --- experiments ----------------------------------------------------------------


def _cells(config: ExperimentConfig) -> Iterator[ResultRow]:
    seeds = sorted(set(config.seeds))
    if config.workers == 1:
        for seed in seeds:
            yield run_cell(config, seed)
        return
    with ProcessPoolExecutor(config.workers) as pool:
        # map keeps submission order, so output stays canonical
        yield from pool.map(run_cell, [config] * len(seeds), seeds)


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """One row per seed, in seed order; streamed to ``config.out`` when set."""
    rows: list[ResultRow] = []
    try:
        writer = RowWriter(config.out, config.format) if config.out else nullcontext()
        with writer as w:
            for row in _cells(config):
                rows.append(row)
                if w is not None:
                    w.write(row)
    except OSError as exc:
        raise HarnessIOError(f"writing {config.out}: {exc}", rows) from exc
    return rows


# --- sweeps ---------------------------------------------------------------------

METRIC = {
    "interval": "running_interval_disc",
    "stripe": "stripe_disc",
    "envy": "envy_final",
    "adversary-adaptive": "running_interval_disc",
    "adversary-oblivious": "running_interval_disc",
    "tightness": "l_over_q",
    "facts-check": "facts_pass_rate",
}


@dataclass
class SweepCell:
    algorithm: str
    n: int
    count: int
    median: float
    q10: float
    q25: float
    q75: float
    q90: float


@dataclass
class SweepResult:
    kind: str
    metric: str
    cells: list[SweepCell]
    slopes: dict[str, float | None]
    rows: list[ResultRow]

    def medians(self, algorithm: str) -> tuple[list[int], list[float]]:
        cs = [c for c in self.cells if c.algorithm == algorithm]
        return [c.n for c in cs], [c.median for c in cs]


def loglog_slope(ns: Iterable[float], values: Iterable[float]) -> float | None:
    """Least-squares slope of log(value) against log(n); None for fewer than two points."""
    ns, values = np.asarray(list(ns), float), np.asarray(list(values), float)
    if len(ns) < 2:
        return None
    if np.any(values <= 0):
        raise ValueError("log-log slope needs positive values")
    return float(np.polyfit(np.log(ns), np.log(values), 1)[0])


def sweep(config: ExperimentConfig, n_values: Iterable[int], algorithms: Iterable[str] | None = None) -> SweepResult:
    """Per-n quantiles of the kind's headline metric, and its growth exponent per algorithm."""
    n_values = list(n_values)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be strictly increasing")
    algorithms = list(algorithms or [config.algorithm])
    metric = METRIC[config.kind]
    cells, rows, slopes = [], [], {}
    for alg in algorithms:
        for n in n_values:
            batch = run_experiment(replace(config, algorithm=alg, n=n, out=None))
            rows.extend(batch)
            vals = np.array([getattr(r, metric) for r in batch], dtype=float)
            q = np.quantile(vals, [0.5, 0.1, 0.25, 0.75, 0.9])
            cells.append(SweepCell(alg, n, len(vals), *map(float, q)))
        _, med = zip(*[(c.n, c.median) for c in cells if c.algorithm == alg])
        slopes[alg] = loglog_slope(n_values, med) if min(med) > 0 else None
    return SweepResult(config.kind, metric, cells, slopes, rows)


def write_sweep(result: SweepResult, path: Path, fmt: str = "csv"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [f.name for f in fields(SweepCell)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["schema_version", "kind", "metric"] + cols + ["slope"])
            for c in result.cells:
                slope = result.slopes.get(c.algorithm)
                w.writerow(
                    [SCHEMA_VERSION, result.kind, result.metric]
                    + [_fmt(getattr(c, k)) for k in cols]
                    + [_fmt(slope)]
                )
        else:
            json.dump(
                {
                    "schema_version": SCHEMA_VERSION,
                    "kind": result.kind,
                    "metric": result.metric,
                    "cells": [asdict(c) for c in result.cells],
                    "slopes": result.slopes,
                },
                fh,
                indent=2,
            )
            fh.write("\n")
