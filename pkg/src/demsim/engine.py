"""Period-driven simulation loop, replications, seeding, and the exact oracle.

Reproducibility contract: one run consumes a single stdlib ``random.Random``
(Mersenne Twister) stream seeded with a 64-bit value from ``derive_seed``.
Per period the draw order is fixed: FIFO refills the VO queue, refills the BE
queue (one uniform per sampled destination; degenerate 1-user distributions
consume none), then draws the primary AC.  DEMS draws one uniform per user
for the frame-level EDCA choice and nothing else.  The generator name is
pinned in all emitted metadata as ``random-mt19937``.
"""
from __future__ import annotations

import itertools
import math
import random
import statistics
from collections import defaultdict
from dataclasses import dataclass

from . import dems, fifo
from .domain import AccessCategory, ConfigError, ScenarioConfig, validate_config
from .traffic import build_beta_distribution, refill_saturated

AC = AccessCategory

RNG_NAME = "random-mt19937"
SCHEDULERS = ("fifo", "dems")

# ACs that carry traffic in the saturated scenarios; VI/BK stay empty there.
SWEEP_ACS = (AC.VO, AC.BE)

_MASK64 = (1 << 64) - 1


def _mix(x: int) -> int:
    # splitmix64 finalizer; full 64-bit avalanche.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, labels: tuple) -> int:
    """Stable 64-bit seed from (master, labels), identical across machines.

    Labels are ints or short strings (scenario, scheduler, alpha index, beta
    index, run index).  Strings are folded byte-wise, so no reliance on
    Python's randomized hash().
    """
    h = _mix(master & _MASK64)
    for lab in labels:
        if isinstance(lab, int):
            h = _mix(h ^ (lab & _MASK64))
        else:
            data = str(lab).encode()
            for k in range(0, len(data), 8):
                h = _mix(h ^ int.from_bytes(data[k:k + 8], "little"))
            h = _mix(h ^ len(data))
    return h


def _run_fifo(cfg: ScenarioConfig, rng: random.Random) -> dict:
    state = fifo.FifoState()
    dist = build_beta_distribution(cfg.n_users, cfg.beta)
    depth = cfg.n_streams + 4
    ids = itertools.count()
    for period in range(cfg.periods):
        refill_saturated(state.vo, depth, AC.VO, dist, rng, ids)
        refill_saturated(state.be, depth, AC.BE, dist, rng, ids)
        primary = fifo.select_primary_ac(cfg.alpha, rng)
        plan = fifo.plan_mu_transmission(state, primary, cfg.n_streams, period)
        fifo.commit(state, plan)
    return state.counters


def _run_dems(cfg: ScenarioConfig, rng: random.Random) -> dict:
    state = dems.DemsState(cfg.n_users)
    depth = cfg.n_streams + 4
    ids = itertools.count()
    vo_queues = state.virtual[AC.VO]
    be_queues = state.virtual[AC.BE]
    for period in range(cfg.periods):
        for j in range(cfg.n_users):
            refill_saturated(vo_queues[j], depth, AC.VO, None, None, ids, dest=j + 1)
            refill_saturated(be_queues[j], depth, AC.BE, None, None, ids, dest=j + 1)
        dems.schedule_edca(state, cfg.alpha, rng)
        plan = dems.plan_mu_transmission(state, cfg.n_streams, period)
        dems.commit(state, plan)
    return state.counters


def run_once(cfg: ScenarioConfig, scheduler: str, seed: int) -> dict:
    """One simulation: returns frames-per-period counters {VO: c, BE: c}."""
    validate_config(cfg)
    rng = random.Random(seed)
    if scheduler == "fifo":
        counters = _run_fifo(cfg, rng)
    elif scheduler == "dems":
        counters = _run_dems(cfg, rng)
    else:
        raise ConfigError(f"unknown scheduler {scheduler!r}")
    return {ac: counters[ac] / cfg.periods for ac in SWEEP_ACS}


@dataclass(frozen=True)
class CounterStats:
    """Across-run statistics of the normalized per-AC counters."""

    mean: dict
    stddev: dict
    runs: int
    periods: int

    def ci95(self, ac: AccessCategory) -> float:
        # Normal-approximation half width; 0 for a single run.
        if self.runs < 2:
            return 0.0
        return 1.96 * self.stddev[ac] / math.sqrt(self.runs)


def run_replications(cfg: ScenarioConfig, scheduler: str, labels: tuple | None = None) -> CounterStats:
    """cfg.runs independent runs; seeds derived from cfg.master_seed.

    ``labels`` identifies the grid cell (scenario, scheduler, alpha index,
    beta index); standalone callers get a (0, 0) cell by default.  The run
    index is appended per replication.
    """
    validate_config(cfg)
    if labels is None:
        labels = (cfg.scenario, scheduler, 0, 0)
    per_run = [
        run_once(cfg, scheduler, derive_seed(cfg.master_seed, (*labels, r)))
        for r in range(cfg.runs)
    ]
    mean = {}
    stddev = {}
    for ac in SWEEP_ACS:
        xs = [c[ac] for c in per_run]
        mean[ac] = sum(xs) / len(xs)
        stddev[ac] = statistics.stdev(xs) if len(xs) > 1 else 0.0
    return CounterStats(mean, stddev, cfg.runs, cfg.periods)


# --- exhaustive expectation oracle for the FIFO scheduler ------------------
#
# Independent of fifo.py on purpose: it re-derives the scan behaviour from
# the queue discipline itself.  Under saturation with duration-1 frames, a
# per-AC queue is always either "head never examined" (every frame ahead is
# an unexamined i.i.d. draw) or "head is the known destination that blocked
# the previous scan".  That makes the pair of queue states a tiny Markov
# chain whose transitions and per-period transmitted counts can be summed
# exactly, outcome by outcome.

def _scan_outcomes(head, selected, budget, weights):
    """Enumerate (picked_dests, new_head, prob) for one saturated FIFO scan.

    ``head`` is the known blocked head destination or None (unexamined).
    The scan admits frames while destinations avoid ``selected``, stopping at
    the first repeat, which stays queued and becomes the new known head.
    Exhausting ``budget`` leaves the next frame unexamined (new head None).
    """
    out = []

    def rec(pos, sel, left, prob, picked):
        if left == 0:
            out.append((picked, None, prob))
            return
        if pos == 0 and head is not None:
            choices = ((head, 1.0),)
        else:
            choices = tuple((d, w) for d, w in enumerate(weights, start=1) if w > 0.0)
        for d, w in choices:
            p = prob * w
            if d in sel:
                out.append((picked, d, p))
            else:
                rec(pos + 1, sel | {d}, left - 1, p, picked + (d,))

    rec(0, frozenset(selected), budget, 1.0, ())
    return out


def fifo_exact_expected(cfg: ScenarioConfig, horizon: int) -> dict:
    """Exact expected per-period counters over ``horizon`` periods.

    Exhaustively enumerates every primary-AC draw and destination assignment
    (weighted by alpha and the beta distribution) starting from fresh queues,
    so sampled runs of the same length can be validated against it to within
    Monte Carlo error.  Feasibility guard: horizon <= 8, n_users <= 3.
    """
    validate_config(cfg)
    if cfg.n_users > 3:
        raise ConfigError("exact oracle supports up to 3 users")
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    if horizon > 8:
        raise ConfigError("horizon too large for exhaustive enumeration (max 8)")
    weights = build_beta_distribution(cfg.n_users, cfg.beta).weights
    primaries = []
    if cfg.alpha > 0.0:
        primaries.append((AC.VO, cfg.alpha))
    if cfg.alpha < 1.0:
        primaries.append((AC.BE, 1.0 - cfg.alpha))

    dist = {(None, None): 1.0}  # joint (VO head, BE head) state
    total = {AC.VO: 0.0, AC.BE: 0.0}
    for _ in range(horizon):
        nxt = defaultdict(float)
        for (s_vo, s_be), p in dist.items():
            for primary, pw in primaries:
                p1 = p * pw
                s_p, s_s = (s_vo, s_be) if primary is AC.VO else (s_be, s_vo)
                for picked_p, head_p, pr_p in _scan_outcomes(s_p, frozenset(), cfg.n_streams, weights):
                    p2 = p1 * pr_p
                    left = cfg.n_streams - len(picked_p)
                    if left > 0:
                        sec = _scan_outcomes(s_s, frozenset(picked_p), left, weights)
                    else:
                        sec = (((), s_s, 1.0),)  # untouched queue keeps its head
                    for picked_s, head_s, pr_s in sec:
                        p3 = p2 * pr_s
                        if primary is AC.VO:
                            total[AC.VO] += p3 * len(picked_p)
                            total[AC.BE] += p3 * len(picked_s)
                            key = (head_p, head_s)
                        else:
                            total[AC.BE] += p3 * len(picked_p)
                            total[AC.VO] += p3 * len(picked_s)
                            key = (head_s, head_p)
                        nxt[key] += p3
        dist = nxt
    return {ac: v / horizon for ac, v in total.items()}
