"""Decoupled scheduler (DEMS): per-user per-AC virtual queues.

Frame-level EDCA runs per user on its own virtual queues and moves exactly
one winner per period into that user's shallow hardware queue; the MU
grouping step then takes one head frame per hardware queue.  Destinations
are distinct by construction, so no stream is ever lost to head-of-line
blocking.
"""
from __future__ import annotations

import random
from collections import deque

from .domain import AccessCategory, PRIORITY_ORDER, SchedulerError, TransmissionPlan

AC = AccessCategory


class DemsState:
    """virtual[ac][j] holds frames for user j+1 in category ac; hardware[j] is Q_j."""

    __slots__ = ("n_users", "virtual", "hardware", "counters")

    def __init__(self, n_users: int):
        if n_users < 1:
            raise SchedulerError("need at least one user")
        self.n_users = n_users
        self.virtual = {ac: [deque() for _ in range(n_users)] for ac in PRIORITY_ORDER}
        self.hardware = [deque() for _ in range(n_users)]
        self.counters = {ac: 0 for ac in PRIORITY_ORDER}


def schedule_edca(state: DemsState, alpha: float, rng: random.Random) -> DemsState:
    """Per-user frame-level EDCA: move one virtual HOL frame into Q_j.

    Per user, the VO head wins with probability alpha, otherwise the BE head.
    Requires the hardware queues drained (one frame per user per period) and
    both contending virtual queues backlogged.
    """
    vo_queues = state.virtual[AC.VO]
    be_queues = state.virtual[AC.BE]
    for j in range(state.n_users):
        hw = state.hardware[j]
        if hw:
            raise SchedulerError("hardware queue not drained at period start")
        vq = vo_queues[j] if rng.random() < alpha else be_queues[j]
        if not vq:
            raise SchedulerError("virtual queue underflow (saturation violated)")
        hw.append(vq.popleft())
    return state


def plan_mu_transmission(state: DemsState, n_streams: int,
                         period_index: int = 0) -> TransmissionPlan:
    """One head frame per non-empty hardware queue, up to n_streams.

    Users are taken in index order.  The plan's primary AC is the highest
    priority category present among the selected frames (its channel-access
    rules govern the whole MU transmission).
    """
    picked = []
    for hw in state.hardware:
        if len(picked) == n_streams:
            break
        if hw:
            picked.append(hw[0])
    if not picked:
        raise SchedulerError("all hardware queues empty")
    primary = min((f.ac for f in picked), key=PRIORITY_ORDER.index)
    return TransmissionPlan(tuple(picked), primary, period_index)


def commit(state: DemsState, plan: TransmissionPlan) -> DemsState:
    """Dequeue the planned head frames and bump the per-AC counters."""
    for f in plan.frames:
        hw = state.hardware[f.dest - 1]
        if not hw or hw[0] is not f:
            raise SchedulerError("plan does not match hardware queue heads")
        hw.popleft()
        state.counters[f.ac] += 1
    return state
