"""Traditional downlink scheduler: one FIFO per access category.

Each period the AP wins one transmit opportunity for a primary AC, fills up
to n_streams spatial streams from that queue head-first, and may share the
leftover streams with the other AC.  Both scans are strict FIFO: the first
frame that cannot join (duplicate destination, or a secondary frame longer
than the primary head) blocks everything behind it in its queue.
"""
from __future__ import annotations

import random
from collections import deque

from .domain import AccessCategory, Frame, SchedulerError, TransmissionPlan

AC = AccessCategory


class FifoState:
    """Two saturated AC queues (VO and BE) plus per-AC transmit counters."""

    __slots__ = ("vo", "be", "counters")

    def __init__(self):
        self.vo: deque[Frame] = deque()
        self.be: deque[Frame] = deque()
        self.counters = {AC.VO: 0, AC.BE: 0}

    def queue(self, ac: AccessCategory) -> deque:
        if ac is AC.VO:
            return self.vo
        if ac is AC.BE:
            return self.be
        raise SchedulerError(f"no backing queue for {ac}")


def select_primary_ac(alpha: float, rng: random.Random) -> AccessCategory:
    """EDCA contention outcome: VO wins with probability alpha, else BE."""
    return AC.VO if rng.random() < alpha else AC.BE


def plan_mu_transmission(state: FifoState, primary: AccessCategory, n_streams: int,
                         period_index: int = 0) -> TransmissionPlan:
    """Fill streams from the primary queue, then share with the other AC.

    Primary scan: walk from the head, admit while destinations are pairwise
    distinct, stop at the first repeat.  If streams remain, the secondary
    queue is scanned the same way, with the extra admission rule that a
    secondary frame must not outlast the primary head frame.
    """
    pq = state.queue(primary)
    if not pq:
        raise SchedulerError("empty primary queue")
    picked: list[Frame] = []
    dests: set[int] = set()
    for f in pq:
        if len(picked) == n_streams or f.dest in dests:
            break
        picked.append(f)
        dests.add(f.dest)
    if len(picked) < n_streams:
        limit = picked[0].duration
        secondary = AC.BE if primary is AC.VO else AC.VO
        for f in state.queue(secondary):
            if len(picked) == n_streams or f.dest in dests or f.duration > limit:
                break
            picked.append(f)
            dests.add(f.dest)
    return TransmissionPlan(tuple(picked), primary, period_index)


def commit(state: FifoState, plan: TransmissionPlan) -> FifoState:
    """Dequeue the planned frames and bump the per-AC counters.

    Planned frames form a contiguous prefix of each touched queue, in queue
    order, so popping along the plan must always meet the exact objects that
    were planned; anything else is an internal consistency bug.
    """
    for f in plan.frames:
        q = state.queue(f.ac)
        if not q or q[0] is not f:
            raise SchedulerError("plan does not match queue heads")
        q.popleft()
        state.counters[f.ac] += 1
    return state
