"""Campaign driver: the (alpha, beta) grid, parallel execution, table output.

Every (scheduler, alpha_index, beta_index) cell is an independent task whose
seed comes from the master seed and the cell labels alone, so results are
byte-identical no matter how many workers execute the grid or in what order
cells complete.  Tables carry a provenance comment (master seed, RNG name,
grid definition, periods, runs, code version); deliberately no timestamp, so
re-running a campaign reproduces files bit for bit.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .domain import AccessCategory, ConfigError, ScenarioConfig
from .engine import RNG_NAME, SCHEDULERS, SWEEP_ACS, run_replications
from .metrics import (
    MetricGrid,
    avg_change_over_alpha,
    avg_change_over_beta,
    avg_over_alpha,
    avg_over_beta,
    change_grid,
)

AC = AccessCategory

ALPHA_RANGE = (0.5, 1.0)
SCENARIO_USERS = {"1u": 1, "2u": 2, "3u": 3}
BETA_RANGE = {"2u": (0.05, 0.5), "3u": (0.05, 1.0 / 3.0)}

TABLES = (
    "counters",
    "t_change",
    "t_avg_vs_beta",
    "t_change_vs_beta",
    "t_avg_vs_alpha",
    "t_change_vs_alpha",
)


def _linspace(lo: float, hi: float, n: int) -> tuple:
    step = (hi - lo) / (n - 1)
    return tuple(lo + i * step for i in range(n))


def build_grid(scenario: str, n_alpha: int = 25, n_beta: int = 25):
    """Evenly spaced inclusive axes for a scenario; 1u has the single beta 1."""
    if scenario not in SCENARIO_USERS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    if n_alpha < 2 or n_beta < 2:
        raise ConfigError("grid needs at least 2 points per axis")
    alpha_axis = _linspace(*ALPHA_RANGE, n_alpha)
    if scenario == "1u":
        beta_axis = (1.0,)
    else:
        lo, hi = BETA_RANGE[scenario]
        beta_axis = _linspace(lo, hi, n_beta)
    return alpha_axis, beta_axis


@dataclass
class SweepResult:
    scenario: str
    alpha_axis: tuple
    beta_axis: tuple
    periods: int
    runs: int
    master_seed: int
    mean: dict      # scheduler -> MetricGrid of across-run mean counters
    stddev: dict    # scheduler -> MetricGrid of across-run stddevs

    def metadata(self) -> dict:
        return {
            "scenario": self.scenario,
            "master_seed": self.master_seed,
            "rng": RNG_NAME,
            "grid": f"{len(self.alpha_axis)}x{len(self.beta_axis)}",
            "alpha": f"[{self.alpha_axis[0]:g},{self.alpha_axis[-1]:g}]",
            "beta": f"[{self.beta_axis[0]:g},{self.beta_axis[-1]:g}]",
            "periods": self.periods,
            "runs": self.runs,
            "version": __version__,
        }

    def ci95(self, scheduler: str, ac, a_idx: int, b_idx: int) -> float:
        if self.runs < 2:
            return 0.0
        sd = np.asarray(self.stddev[scheduler].values[ac], dtype=float)[a_idx, b_idx]
        return 1.96 * sd / float(np.sqrt(self.runs))


def _run_cell(task):
    (scenario, n_users, scheduler, a_idx, b_idx, alpha, beta, periods, runs, master_seed) = task
    cfg = ScenarioConfig(n_users=n_users, alpha=alpha, beta=beta,
                         periods=periods, runs=runs, master_seed=master_seed)
    stats = run_replications(cfg, scheduler, labels=(scenario, scheduler, a_idx, b_idx))
    return (scheduler, a_idx, b_idx,
            tuple(stats.mean[ac] for ac in SWEEP_ACS),
            tuple(stats.stddev[ac] for ac in SWEEP_ACS))


def run_sweep(scenario: str, n_alpha: int = 25, n_beta: int = 25,
              periods: int = 500, runs: int = 15, master_seed: int = 42,
              workers: int | None = None) -> SweepResult:
    """Run both schedulers over the whole grid with replications.

    ``workers`` is the process count (None: all available cores; 1 runs in
    process).  The output is independent of it by construction: cell results
    are merged by index, never by completion order.
    """
    alpha_axis, beta_axis = build_grid(scenario, n_alpha, n_beta)
    n_users = SCENARIO_USERS[scenario]
    tasks = [
        (scenario, n_users, sched, ai, bi, alpha_axis[ai], beta_axis[bi],
         periods, runs, master_seed)
        for sched in SCHEDULERS
        for ai in range(len(alpha_axis))
        for bi in range(len(beta_axis))
    ]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1:
        results = [_run_cell(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, tasks, chunksize=chunk))

    shape = (len(alpha_axis), len(beta_axis))
    mean = {s: {ac: np.full(shape, np.nan) for ac in SWEEP_ACS} for s in SCHEDULERS}
    stddev = {s: {ac: np.full(shape, np.nan) for ac in SWEEP_ACS} for s in SCHEDULERS}
    for sched, ai, bi, means, stds in results:
        for ac, m, sd in zip(SWEEP_ACS, means, stds):
            mean[sched][ac][ai, bi] = m
            stddev[sched][ac][ai, bi] = sd
    for sched in SCHEDULERS:
        for ac in SWEEP_ACS:
            if np.isnan(mean[sched][ac]).any():
                raise RuntimeError("sweep grid has unpopulated cells")

    return SweepResult(
        scenario=scenario,
        alpha_axis=alpha_axis,
        beta_axis=beta_axis,
        periods=periods,
        runs=runs,
        master_seed=master_seed,
        mean={s: MetricGrid(mean[s], alpha_axis, beta_axis) for s in SCHEDULERS},
        stddev={s: MetricGrid(stddev[s], alpha_axis, beta_axis) for s in SCHEDULERS},
    )


def _fmt(x: float) -> str:
    # inf prints as the literal token "inf"; everything else at 4 decimals.
    return f"{x:.4f}"


def _metadata_line(result: SweepResult, which: str) -> str:
    meta = result.metadata() | {"table": which}
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def _table_rows(result: SweepResult, which: str):
    n_a, n_b = len(result.alpha_axis), len(result.beta_axis)
    dems, fifo = result.mean["dems"], result.mean["fifo"]
    if which == "counters":
        header = ["scenario", "scheduler", "alpha", "beta", "ac", "mean", "stddev", "ci95"]
        rows = []
        for sched in SCHEDULERS:
            g, sd = result.mean[sched], result.stddev[sched]
            for ac in SWEEP_ACS:
                for ai in range(n_a):
                    for bi in range(n_b):
                        rows.append([
                            result.scenario, sched,
                            _fmt(result.alpha_axis[ai]), _fmt(result.beta_axis[bi]), str(ac),
                            _fmt(g.values[ac][ai, bi]), _fmt(sd.values[ac][ai, bi]),
                            _fmt(result.ci95(sched, ac, ai, bi)),
                        ])
        return header, rows
    if which == "t_change":
        header = ["scenario", "ac", "alpha", "beta", "percent"]
        changes = change_grid(dems, fifo)
        return header, [
            [result.scenario, str(ac),
             _fmt(result.alpha_axis[ai]), _fmt(result.beta_axis[bi]),
             _fmt(changes.values[ac][ai, bi])]
            for ac in SWEEP_ACS for ai in range(n_a) for bi in range(n_b)
        ]
    if which == "t_avg_vs_beta":
        header = ["scenario", "scheduler", "ac", "beta", "value"]
        return header, [
            [result.scenario, sched, str(ac), _fmt(result.beta_axis[bi]),
             _fmt(avg_over_alpha(result.mean[sched], ac, bi))]
            for sched in SCHEDULERS for ac in SWEEP_ACS for bi in range(n_b)
        ]
    if which == "t_change_vs_beta":
        header = ["scenario", "ac", "beta", "percent", "excluded"]
        rows = []
        for ac in SWEEP_ACS:
            for bi in range(n_b):
                avg = avg_change_over_alpha(dems, fifo, ac, bi)
                rows.append([result.scenario, str(ac), _fmt(result.beta_axis[bi]),
                             _fmt(avg.percent), str(avg.excluded)])
        return header, rows
    if which == "t_avg_vs_alpha":
        header = ["scenario", "scheduler", "ac", "alpha", "value"]
        return header, [
            [result.scenario, sched, str(ac), _fmt(result.alpha_axis[ai]),
             _fmt(avg_over_beta(result.mean[sched], ac, ai))]
            for sched in SCHEDULERS for ac in SWEEP_ACS for ai in range(n_a)
        ]
    if which == "t_change_vs_alpha":
        header = ["scenario", "ac", "alpha", "percent", "excluded"]
        rows = []
        for ac in SWEEP_ACS:
            for ai in range(n_a):
                avg = avg_change_over_beta(dems, fifo, ac, ai)
                rows.append([result.scenario, str(ac), _fmt(result.alpha_axis[ai]),
                             _fmt(avg.percent), str(avg.excluded)])
        return header, rows
    raise ConfigError(f"unknown table id {which!r}")


def emit_csv(result: SweepResult, which: str) -> str:
    header, rows = _table_rows(result, which)
    buf = io.StringIO()
    buf.write(_metadata_line(result, which) + "\r\n")
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_json(result: SweepResult, which: str) -> str:
    """JSON mirror of a CSV table: same field names, same cell strings."""
    header, rows = _table_rows(result, which)
    doc = {
        "metadata": {k: str(v) for k, v in (result.metadata() | {"table": which}).items()},
        "rows": [dict(zip(header, row)) for row in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def parse_csv(text: str):
    """Inverse of emit_csv: returns (metadata dict, list of row dicts)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata line")
    meta = dict(kv.split("=", 1) for kv in lines[0][2:].split(" "))
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    header = next(reader)
    return meta, [dict(zip(header, row)) for row in reader if row]


def write_tables(result: SweepResult, out_dir, json_mirror: bool = False) -> list:
    """Write every table as <out_dir>/<table>.csv (+ .json); returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for which in TABLES:
        p = out / f"{which}.csv"
        p.write_text(emit_csv(result, which), newline="")
        paths.append(p)
        if json_mirror:
            j = out / f"{which}.json"
            j.write_text(emit_json(result, which))
            paths.append(j)
    return paths
