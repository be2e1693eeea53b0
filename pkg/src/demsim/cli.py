"""Command-line entry point.

Exit codes: 0 on success, 2 for usage errors and missing input files, 1 for
runtime failures.  Machine-readable output goes to stdout or files;
diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .analytic import hol_blocking_monte_carlo, hol_blocking_probability, hol_curve
from .domain import ConfigError, PRIORITY_ORDER, ScenarioConfig
from .engine import RNG_NAME, SWEEP_ACS, run_replications
from .sweep import SCENARIO_USERS, build_grid, run_sweep, write_tables
from .trace import (
    ParseError,
    parse_workload,
    render_timeline,
    replay,
    summary_line,
    timeline_stats,
)

WORKERS_ENV = "DEMSIM_WORKERS"

# Shipping campaign defaults: alpha in [0.5, 1], 25x25 grid, 500 periods,
# 15 runs.  `sweep --scenario 2u` reproduces the full two-user campaign.
DEFAULT_BETA = {"1u": 1.0, "2u": 0.5, "3u": 1.0 / 3.0}


def _out_stream(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_hol(args) -> int:
    if args.ns < 1:
        raise ConfigError("--ns must be >= 1")
    if args.nu_max < args.ns:
        raise ConfigError("--nu-max must be >= --ns")
    rows = hol_curve(args.ns, args.nu_max)
    header = ["n_u", "n_s", "p_blk"]
    if args.mc_samples:
        header += ["mc_estimate", "mc_se"]
    out = _out_stream(args.out)
    try:
        w = csv.writer(out)
        w.writerow(header)
        for n_u, p in rows:
            row = [n_u, args.ns, f"{p:.6f}"]
            if args.mc_samples:
                est, se = hol_blocking_monte_carlo(n_u, args.ns, args.mc_samples, args.seed)
                row += [f"{est:.6f}", f"{se:.6f}"]
            w.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.plot:
        from . import figures

        figures.save_hol_curves(args.plot, [(args.ns, rows)])
        print(f"wrote {args.plot}", file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    beta = args.beta if args.beta is not None else DEFAULT_BETA[args.scenario]
    cfg = ScenarioConfig(
        n_users=SCENARIO_USERS[args.scenario],
        alpha=args.alpha,
        beta=beta,
        periods=args.periods,
        runs=args.runs,
        master_seed=args.seed,
    )
    stats = run_replications(cfg, args.scheduler)
    meta = {
        "scenario": args.scenario,
        "scheduler": args.scheduler,
        "alpha": f"{cfg.alpha:.4f}",
        "beta": f"{cfg.beta:.4f}",
        "periods": cfg.periods,
        "runs": cfg.runs,
        "master_seed": cfg.master_seed,
        "rng": RNG_NAME,
    }
    rows = [
        {
            "ac": str(ac),
            "mean": f"{stats.mean[ac]:.4f}",
            "stddev": f"{stats.stddev[ac]:.4f}",
            "ci95": f"{stats.ci95(ac):.4f}",
        }
        for ac in SWEEP_ACS
    ]
    out = _out_stream(args.out)
    try:
        if args.format == "json":
            json.dump({"metadata": {k: str(v) for k, v in meta.items()}, "rows": rows}, out, indent=1)
            out.write("\n")
        else:
            out.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\r\n")
            w = csv.writer(out)
            w.writerow(["ac", "mean", "stddev", "ci95"])
            for r in rows:
                w.writerow(r.values())
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _grid_arg(text: str):
    try:
        n_alpha, n_beta = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must look like 25x25")
    return n_alpha, n_beta


def cmd_sweep(args) -> int:
    n_alpha, n_beta = args.grid
    if args.workers is not None:
        workers = args.workers
    elif os.environ.get(WORKERS_ENV):
        workers = int(os.environ[WORKERS_ENV])
    else:
        workers = None  # all available cores
    out_dir = args.out_dir or f"sweep_{args.scenario}"
    result = run_sweep(
        args.scenario,
        n_alpha=n_alpha,
        n_beta=n_beta,
        periods=args.periods,
        runs=args.runs,
        master_seed=args.seed,
        workers=workers,
    )
    paths = write_tables(result, out_dir, json_mirror=args.json)
    if args.plots:
        from . import figures

        paths += figures.save_sweep_figures(result, out_dir)
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return 0


def _load_workload_text(path_arg: str):
    p = Path(path_arg)
    if p.exists():
        return p.read_text()
    # fall back to the bundled examples (fig4.wl, fig5.wl, fig6.wl)
    bundled = resources.files("demsim") / "workloads" / p.name
    if p.parent == Path(".") and bundled.is_file():
        return bundled.read_text()
    return None


def cmd_trace(args) -> int:
    text = _load_workload_text(args.workload)
    if text is None:
        print(f"error: workload file not found: {args.workload}", file=sys.stderr)
        return 2
    workload = parse_workload(text)
    timeline = replay(workload, args.scheduler)
    stats = timeline_stats(timeline)
    if args.format == "json":
        doc = {
            "periods": stats.periods,
            "completion": {str(ac): idx for ac, idx in stats.completion.items()},
            "padding": stats.padding,
            "frames": stats.frames,
            "frames_per_txop": stats.frames_per_txop,
        }
        print(json.dumps(doc, indent=1))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        header = ["periods"]
        row = [stats.periods]
        for ac in PRIORITY_ORDER:
            if ac in stats.completion:
                header.append(f"{ac}_done")
                row.append(stats.completion[ac])
        header += ["padding", "frames", "frames_per_txop"]
        row += [stats.padding, stats.frames, f"{stats.frames_per_txop:.2f}"]
        w.writerow(header)
        w.writerow(row)
        print(buf.getvalue(), end="")
    else:
        print(render_timeline(timeline))
        print(summary_line(stats))
    if args.plot:
        from . import figures

        figures.save_trace_gantt(timeline, args.plot, title=f"{args.scheduler} replay")
        print(f"wrote {args.plot}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demsim",
        description="Downlink MU-MIMO scheduling simulator: shared per-AC FIFO "
                    "queues vs. decoupled per-user queues (DEMS).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hol", help="head-of-line blocking probability curve (CSV)")
    p.add_argument("--ns", type=int, required=True, help="spatial streams (>= 1)")
    p.add_argument("--nu-max", type=int, required=True, help="largest user count (>= --ns)")
    p.add_argument("--mc-samples", type=int, default=0,
                   help="add a Monte Carlo estimate column with this many samples")
    p.add_argument("--seed", type=int, default=1, help="Monte Carlo seed (default 1)")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.add_argument("--plot", default=None, help="also render the curve to this PNG")
    p.set_defaults(func=cmd_hol)

    p = sub.add_parser("run", help="one simulation point with replications")
    p.add_argument("--scenario", choices=sorted(SCENARIO_USERS), required=True)
    p.add_argument("--scheduler", choices=("fifo", "dems"), required=True)
    p.add_argument("--alpha", type=float, required=True, help="VO selection probability")
    p.add_argument("--beta", type=float, default=None,
                   help="traffic split (defaults: 1u=1.0, 2u=0.5, 3u=1/3)")
    p.add_argument("--periods", type=int, default=500, help="periods per run (default 500)")
    p.add_argument("--runs", type=int, default=15, help="replications (default 15)")
    p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="full campaign over the (alpha, beta) grid")
    p.add_argument("--scenario", choices=sorted(SCENARIO_USERS), required=True)
    p.add_argument("--grid", type=_grid_arg, default=(25, 25),
                   help="alpha x beta grid points (default 25x25)")
    p.add_argument("--periods", type=int, default=500, help="periods per run (default 500)")
    p.add_argument("--runs", type=int, default=15, help="replications per cell (default 15)")
    p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    p.add_argument("--out-dir", default=None, help="table directory (default sweep_<scenario>)")
    p.add_argument("--json", action="store_true", help="also write JSON mirrors")
    p.add_argument("--plots", action="store_true", help="also render PNG figures")
    p.add_argument("--workers", type=int, default=None,
                   help=f"process count (default: ${WORKERS_ENV} or all cores); "
                        "results do not depend on it")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trace", help="deterministic replay of a workload file")
    p.add_argument("--workload", required=True,
                   help="workload file path, or a bundled name (fig4.wl, fig5.wl, fig6.wl)")
    p.add_argument("--scheduler", choices=("fifo", "dems"), required=True)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text",
                   help="stats format (text renders the full timeline)")
    p.add_argument("--plot", default=None, help="also render the timeline to this PNG")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
