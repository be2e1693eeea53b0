"""Saturated traffic sources: per-user destination splits and lazy refill.

Queues are conceptually infinite; the engine keeps a finite lookahead window
(depth n_streams + 4) topped up before every period, which no scheduler can
distinguish from an infinite backlog because neither ever inspects more than
n_streams consecutive frames.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

from .domain import AccessCategory, ConfigError, Frame

# Legal beta range per scenario; values outside are usable but warned about.
LEGAL_BETA = {2: (0.05, 0.5), 3: (0.05, 1.0 / 3.0)}


@dataclass(frozen=True)
class BetaDistribution:
    """Destination probabilities, index i is user i+1."""

    weights: tuple[float, ...]

    def __post_init__(self):
        if any(w < 0.0 for w in self.weights):
            raise ConfigError("negative destination weight")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ConfigError("destination weights must sum to 1")


def build_beta_distribution(n_users: int, beta: float) -> BetaDistribution:
    """Traffic split for the three supported scenarios.

    1 user: everything to user 1 (beta unused).  2 users: (beta, 1-beta).
    3 users: (beta, 1/3, 1 - 1/3 - beta).  A beta outside the scenario's
    usual range still builds the distribution when the weights stay legal,
    with a warning; a negative weight is an error.
    """
    if n_users == 1:
        return BetaDistribution((1.0,))
    if n_users == 2:
        raw = (beta, 1.0 - beta)
    elif n_users == 3:
        raw = (beta, 1.0 / 3.0, 1.0 - (1.0 / 3.0 + beta))
    else:
        raise ConfigError("beta traffic model covers 1, 2 or 3 users")
    # Absorb float dust from the subtractions; real negatives still raise.
    weights = tuple(0.0 if -1e-12 < w < 0.0 else w for w in raw)
    dist = BetaDistribution(weights)
    lo, hi = LEGAL_BETA[n_users]
    if not lo <= beta <= hi:
        warnings.warn(
            f"beta={beta:g} outside the usual [{lo:g}, {hi:.4g}] range for {n_users} users",
            RuntimeWarning,
            stacklevel=2,
        )
    return dist


def sample_destination(dist: BetaDistribution, rng) -> int:
    """Categorical draw; returns a 1-based user id.

    Degenerate single-user distributions consume no randomness.
    """
    ws = dist.weights
    if len(ws) == 1:
        return 1
    u = rng.random()
    acc = 0.0
    for i, w in enumerate(ws):
        acc += w
        if u < acc:
            return i + 1
    return len(ws)  # float residue lands on the last user


def refill_saturated(queue, target_depth, ac, dist, rng, next_id, dest=None):
    """Append frames until the queue holds target_depth; no-op when full.

    ``next_id`` is a shared iterator of ints, so ids stay unique and monotone
    per queue.  Pass ``dest`` for queues owned by one user (no sampling);
    otherwise destinations are drawn i.i.d. from ``dist``.
    """
    while len(queue) < target_depth:
        d = dest if dest is not None else sample_destination(dist, rng)
        queue.append(Frame(next(next_id), ac, d, 1))
    return queue
