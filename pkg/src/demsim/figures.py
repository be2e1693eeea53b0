"""Figure rendering: PNG files written next to the delimited output.

Kept strictly out of the simulation and analytics paths; only the CLI's
opt-in flags call into this module.  Uses the Agg backend so it works
headless.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt

from .domain import AccessCategory
from .engine import SCHEDULERS, SWEEP_ACS
from .metrics import avg_over_alpha, avg_over_beta, change_grid

AC = AccessCategory

_AC_COLOR = {AC.VO: "tab:red", AC.VI: "tab:orange", AC.BE: "tab:blue", AC.BK: "tab:gray"}
_SCHED_STYLE = {"fifo": "--", "dems": "-"}


def save_hol_curves(path, curves) -> Path:
    """curves: iterable of (n_s, [(n_u, p), ...]) series."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for n_s, series in curves:
        xs = [n_u for n_u, _ in series]
        ys = [p for _, p in series]
        ax.plot(xs, ys, marker="o", markersize=3, label=f"{n_s} streams")
    ax.set_xlabel("served users")
    ax.set_ylabel("head-of-line blocking probability")
    ax.set_ylim(0, 1)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _finite(a):
    out = np.asarray(a, dtype=float).copy()
    out[~np.isfinite(out)] = np.nan
    return out


def save_sweep_figures(result, out_dir) -> list:
    """Marginal counter curves, change heatmaps, and marginal change curves."""
    from .metrics import avg_change_over_alpha, avg_change_over_beta

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    alphas = np.asarray(result.alpha_axis)
    betas = np.asarray(result.beta_axis)
    n_a, n_b = len(alphas), len(betas)

    # mean counters vs alpha (beta-averaged) and vs beta (alpha-averaged)
    for axis_name, xs, avg in (
        ("alpha", alphas, lambda g, ac, i: avg_over_beta(g, ac, i)),
        ("beta", betas, lambda g, ac, i: avg_over_alpha(g, ac, i)),
    ):
        fig, ax = plt.subplots(figsize=(6, 4))
        for sched in SCHEDULERS:
            grid = result.mean[sched]
            for ac in SWEEP_ACS:
                ys = [avg(grid, ac, i) for i in range(len(xs))]
                ax.plot(xs, ys, _SCHED_STYLE[sched], color=_AC_COLOR[ac],
                        marker=".", label=f"{sched} {ac}")
        ax.set_xlabel(axis_name)
        ax.set_ylabel("mean frames per period")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        p = out / f"counters_vs_{axis_name}.png"
        fig.savefig(p, dpi=150)
        plt.close(fig)
        paths.append(p)

    # throughput-change surfaces
    changes = change_grid(result.mean["dems"], result.mean["fifo"])
    fig, axes = plt.subplots(1, len(SWEEP_ACS), figsize=(10, 4))
    for ax, ac in zip(np.atleast_1d(axes), SWEEP_ACS):
        img = ax.imshow(
            _finite(changes.values[ac]).T,
            origin="lower",
            aspect="auto",
            extent=(alphas[0], alphas[-1], betas[0], betas[-1]),
            cmap="RdYlGn",
        )
        ax.set_title(f"throughput change [%], {ac}")
        ax.set_xlabel("alpha")
        ax.set_ylabel("beta")
        fig.colorbar(img, ax=ax)
    fig.tight_layout()
    p = out / "t_change_surface.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)

    # marginal average change curves
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for ac in SWEEP_ACS:
        ys = [avg_change_over_beta(result.mean["dems"], result.mean["fifo"], ac, i).percent
              for i in range(n_a)]
        ax1.plot(alphas, ys, color=_AC_COLOR[ac], marker=".", label=str(ac))
        ys = [avg_change_over_alpha(result.mean["dems"], result.mean["fifo"], ac, i).percent
              for i in range(n_b)]
        ax2.plot(betas, ys, color=_AC_COLOR[ac], marker=".", label=str(ac))
    ax1.set_xlabel("alpha")
    ax2.set_xlabel("beta")
    for ax in (ax1, ax2):
        ax.set_ylabel("average throughput change [%]")
        ax.axhline(0, color="k", linewidth=0.6)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    p = out / "t_change_avg.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)
    return paths


def save_trace_gantt(timeline, path, title: str = "") -> Path:
    """Per-stream bar chart of one replayed timeline."""
    fig, ax = plt.subplots(figsize=(8, 1.2 + 0.8 * timeline.n_streams))
    for txop in timeline.txops:
        ax.axvline(txop.start, color="k", linewidth=0.5, alpha=0.4)
        for p in txop.placements:
            x = txop.start + p.start
            ax.barh(p.stream, p.frame.duration, left=x, height=0.6,
                    color=_AC_COLOR[p.frame.ac], edgecolor="k", linewidth=0.5)
            ax.text(x + p.frame.duration / 2, p.stream,
                    f"{p.frame.ac}{p.frame.id}\nu{p.frame.dest}",
                    ha="center", va="center", fontsize=6)
    end = timeline.txops[-1].start + timeline.txops[-1].duration if timeline.txops else 1
    ax.axvline(end, color="k", linewidth=0.5, alpha=0.4)
    ax.set_yticks(range(timeline.n_streams))
    ax.set_yticklabels([f"stream {s + 1}" for s in range(timeline.n_streams)])
    ax.set_xlabel("time units")
    ax.set_xlim(0, end)
    ax.invert_yaxis()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
