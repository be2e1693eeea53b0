"""Head-of-line blocking probability of a single saturated FIFO queue.

A multi-user transmission wants the queue head plus the frames right behind
it, but only while their destinations stay pairwise distinct; the first
repeated destination blocks everything behind it for that opportunity.  With
destinations i.i.d. uniform over ``n_u`` users, the probability that a window
of ``n_s`` head frames does NOT cover ``n_s`` distinct users has a closed
form, computed here exactly, plus an independent Monte Carlo estimator used
as an oracle in the tests.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np


def hol_blocking_probability(n_u: int, n_s: int) -> float:
    """Exact blocking probability for a window of n_s frames over n_u users.

    Evaluates 1 - prod_{k=0}^{n_s-1} (n_u - k)/n_u with rational arithmetic
    (telescoping product, no factorials, stable for n_u up to 64 and beyond).
    Defined as 0 when n_u < n_s: the quantity models filling n_s streams with
    n_s distinct users, which no window can do with fewer users than streams.
    """
    if n_u < 1 or n_s < 1:
        raise ValueError("n_u and n_s must be >= 1")
    if n_u < n_s:
        return 0.0
    p_distinct = Fraction(1)
    for k in range(n_s):
        p_distinct *= Fraction(n_u - k, n_u)
    return float(1 - p_distinct)


class McEstimate(NamedTuple):
    estimate: float
    se: float


# Draw this many windows per numpy batch; caps peak memory around 16 MB.
_MC_BATCH = 1 << 18


def hol_blocking_monte_carlo(n_u: int, n_s: int, samples: int, seed: int) -> McEstimate:
    """Estimate the blocking probability by simulating destination draws.

    Independent of the closed form: draws ``samples`` windows of ``n_s``
    destinations from a numpy PCG64 stream fixed by ``seed`` and counts the
    windows containing at least one repeat.  Returns the estimate together
    with its binomial standard error.  Covers the n_u >= n_s regime only.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if n_u < n_s:
        raise ValueError("monte carlo models the n_u >= n_s regime only")
    rng = np.random.default_rng(seed)
    blocked = 0
    left = samples
    while left > 0:
        n = min(left, _MC_BATCH)
        draws = rng.integers(0, n_u, size=(n, n_s))
        draws.sort(axis=1)
        blocked += int((draws[:, 1:] == draws[:, :-1]).any(axis=1).sum())
        left -= n
    est = blocked / samples
    se = math.sqrt(est * (1.0 - est) / samples)
    return McEstimate(est, se)


def hol_curve(n_s: int, n_u_max: int) -> list[tuple[int, float]]:
    """Blocking probability as a function of n_u, for n_u in [n_s, n_u_max]."""
    if n_u_max < n_s:
        raise ValueError("n_u_max must be >= n_s")
    return [(n_u, hol_blocking_probability(n_u, n_s)) for n_u in range(n_s, n_u_max + 1)]
