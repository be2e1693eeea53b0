"""Throughput metrics over (alpha, beta) counter grids.

All percentages are carried as unrounded floats; rounding happens only at
CSV emission.  A throughput change against a zero baseline is the sentinel
``math.inf`` and is excluded from marginal averages, with the exclusion
count reported.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

UNBOUNDED = math.inf


@dataclass(frozen=True)
class MetricGrid:
    """Per-AC value surfaces indexed by (alpha_index, beta_index)."""

    values: dict        # AccessCategory -> 2D array-like, shape (n_alpha, n_beta)
    alpha_axis: tuple
    beta_axis: tuple

    def __post_init__(self):
        shape = (len(self.alpha_axis), len(self.beta_axis))
        for ac, m in self.values.items():
            if np.asarray(m, dtype=float).shape != shape:
                raise ValueError(f"grid for {ac} does not match the axes")
        for axis in (self.alpha_axis, self.beta_axis):
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ValueError("axes must be strictly increasing")

    def column(self, ac, beta_index: int) -> np.ndarray:
        return np.asarray(self.values[ac], dtype=float)[:, beta_index]

    def row(self, ac, alpha_index: int) -> np.ndarray:
        return np.asarray(self.values[ac], dtype=float)[alpha_index, :]


def throughput_change(c_dems: float, c_ac: float) -> float:
    """Relative throughput change in percent: (c_dems/c_ac - 1) * 100.

    0/0 is defined as 0% (both schedulers starve the AC equally); a positive
    numerator over a zero baseline is unbounded and returns the inf sentinel.
    """
    if c_dems < 0.0 or c_ac < 0.0:
        raise ValueError("counters are non-negative")
    if c_ac == 0.0:
        return 0.0 if c_dems == 0.0 else UNBOUNDED
    return (c_dems / c_ac - 1.0) * 100.0


def change_grid(dems_grid: MetricGrid, ac_grid: MetricGrid) -> MetricGrid:
    """Per-cell throughput change surface (with inf sentinels)."""
    _check_axes(dems_grid, ac_grid)
    out = {}
    for ac in dems_grid.values:
        d = np.asarray(dems_grid.values[ac], dtype=float)
        a = np.asarray(ac_grid.values[ac], dtype=float)
        out[ac] = np.array(
            [[throughput_change(dv, av) for dv, av in zip(drow, arow)]
             for drow, arow in zip(d, a)]
        )
    return MetricGrid(out, dems_grid.alpha_axis, dems_grid.beta_axis)


class ChangeAverage(NamedTuple):
    percent: float
    excluded: int


def _check_axes(g1: MetricGrid, g2: MetricGrid):
    if g1.alpha_axis != g2.alpha_axis or g1.beta_axis != g2.beta_axis:
        raise ValueError("grids do not share axes")


def _complete(xs: np.ndarray):
    if np.isnan(xs).any():
        raise ValueError("incomplete grid slice")


def avg_over_alpha(grid: MetricGrid, ac, beta_index: int) -> float:
    """Mean of the AC's counter over all alpha points at one beta."""
    col = grid.column(ac, beta_index)
    _complete(col)
    return float(col.mean())


def avg_over_beta(grid: MetricGrid, ac, alpha_index: int) -> float:
    """Mean of the AC's counter over all beta points at one alpha."""
    row = grid.row(ac, alpha_index)
    _complete(row)
    return float(row.mean())


def _avg_change(d: np.ndarray, a: np.ndarray) -> ChangeAverage:
    _complete(d)
    _complete(a)
    changes = [throughput_change(dv, av) for dv, av in zip(d, a)]
    bounded = [c for c in changes if math.isfinite(c)]
    excluded = len(changes) - len(bounded)
    if not bounded:
        raise ValueError("no bounded cells to average")
    if excluded:
        warnings.warn(f"{excluded} unbounded cells excluded from average",
                      RuntimeWarning, stacklevel=3)
    return ChangeAverage(sum(bounded) / len(bounded), excluded)


def avg_change_over_alpha(dems_grid: MetricGrid, ac_grid: MetricGrid, ac,
                          beta_index: int) -> ChangeAverage:
    """Mean of per-cell changes over alpha at one beta (mean of ratios)."""
    _check_axes(dems_grid, ac_grid)
    return _avg_change(dems_grid.column(ac, beta_index), ac_grid.column(ac, beta_index))


def avg_change_over_beta(dems_grid: MetricGrid, ac_grid: MetricGrid, ac,
                         alpha_index: int) -> ChangeAverage:
    """Mean of per-cell changes over beta at one alpha."""
    _check_axes(dems_grid, ac_grid)
    return _avg_change(dems_grid.row(ac, alpha_index), ac_grid.row(ac, alpha_index))
