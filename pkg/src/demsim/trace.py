"""Deterministic replay of hand-written queue traces.

Workload file format (line oriented):

* comments start with ``#`` (full line or trailing); blank lines ignored;
* directives: ``streams=<n>`` (stream count, required before any frame) and
  ``grant=<ac>`` (optional: the access category that won the channel for the
  FIRST transmit opportunity of the fifo replay; ignored by dems, whose
  access emerges from per-user selection);
* section headers name a queue: ``[fifo.vo]``, ``[fifo.vi]``, ``[fifo.be]``,
  ``[fifo.bk]`` or ``[dems.u<j>.<ac>]``;
* frame lines: ``<id> u<dest> <duration>``.

The fifo.* sections and the dems.* sections describe the same arrivals from
the two schedulers' points of view, so a frame id may appear once in each
family; ids are unique within a family and durations are >= 1.

Replay is strict priority (no randomness): the sweep module's alpha knob
models channel contention statistically, while traces reproduce worked
examples exactly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .domain import AccessCategory, Frame, PRIORITY_ORDER, SchedulerError

AC = AccessCategory

_AC_BY_NAME = {ac.value: ac for ac in AccessCategory}


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class Workload:
    n_streams: int
    fifo_queues: dict = field(default_factory=dict)   # AC -> list[Frame]
    dems_queues: dict = field(default_factory=dict)   # (user, AC) -> list[Frame]
    grant: AccessCategory | None = None

    def frame_count(self, family: str) -> int:
        queues = self.fifo_queues if family == "fifo" else self.dems_queues
        return sum(len(q) for q in queues.values())


@dataclass(frozen=True)
class Placement:
    frame: Frame
    stream: int
    start: int          # offset within the TXOP

    @property
    def end(self) -> int:
        return self.start + self.frame.duration


@dataclass(frozen=True)
class Txop:
    index: int          # 1-based transmission period number
    start: int          # absolute start time
    duration: int
    primary_ac: AccessCategory
    placements: tuple

    def stream_occupancy(self, stream: int) -> int:
        return sum(p.frame.duration for p in self.placements if p.stream == stream)

    def padding(self, n_streams: int) -> int:
        return self.duration * n_streams - sum(p.frame.duration for p in self.placements)


@dataclass(frozen=True)
class Timeline:
    n_streams: int
    txops: tuple

    def starts(self, ac=None, dest=None) -> list:
        """Absolute start times of matching frames, sorted."""
        out = [
            t.start + p.start
            for t in self.txops
            for p in t.placements
            if (ac is None or p.frame.ac is ac) and (dest is None or p.frame.dest == dest)
        ]
        return sorted(out)


_SECTION_RE = re.compile(r"\[(fifo|dems)\.(?:u(\d+)\.)?([a-z]+)\]$")
_FRAME_RE = re.compile(r"(\d+)\s+u(\d+)\s+(\d+)$")


def parse_workload(text: str) -> Workload:
    n_streams = None
    grant = None
    fifo_queues: dict = {}
    dems_queues: dict = {}
    seen_ids = {"fifo": set(), "dems": set()}
    section = None  # ("fifo", None, ac) or ("dems", user, ac)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = _SECTION_RE.match(line)
            if not m:
                raise ParseError(lineno, f"malformed section header {line!r}")
            family, user, ac_name = m.group(1), m.group(2), m.group(3)
            ac = _AC_BY_NAME.get(ac_name)
            if ac is None:
                raise ParseError(lineno, f"unknown access category {ac_name!r}")
            if family == "dems" and user is None:
                raise ParseError(lineno, "dems sections need a user: [dems.u<j>.<ac>]")
            if family == "fifo" and user is not None:
                raise ParseError(lineno, "fifo queues are not per-user")
            section = (family, int(user) if user else None, ac)
            continue
        if "=" in line and section is None:
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "streams":
                if not value.isdigit() or int(value) < 1:
                    raise ParseError(lineno, "streams must be a positive integer")
                n_streams = int(value)
            elif key == "grant":
                grant = _AC_BY_NAME.get(value)
                if grant is None:
                    raise ParseError(lineno, f"unknown access category {value!r}")
            else:
                raise ParseError(lineno, f"unknown directive {key!r}")
            continue
        m = _FRAME_RE.match(line)
        if not m:
            raise ParseError(lineno, f"malformed frame line {line!r}")
        if section is None:
            raise ParseError(lineno, "frame line before any queue section")
        fid, dest, duration = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if duration < 1:
            raise ParseError(lineno, "duration must be >= 1")
        family, user, ac = section
        if fid in seen_ids[family]:
            raise ParseError(lineno, f"duplicate frame id {fid}")
        seen_ids[family].add(fid)
        if family == "dems" and dest != user:
            raise ParseError(lineno, f"frame for u{dest} in a u{user} queue")
        frame = Frame(fid, ac, dest, duration)
        if family == "fifo":
            fifo_queues.setdefault(ac, []).append(frame)
        else:
            dems_queues.setdefault((user, ac), []).append(frame)

    if n_streams is None:
        raise ParseError(0, "missing streams=<n> directive")
    return Workload(n_streams=n_streams, fifo_queues=fifo_queues,
                    dems_queues=dems_queues, grant=grant)


def _next_admissible(queues: dict, scan_order, t: int, txop_dur: int, placements: list):
    """First admissible head frame across the AC queues, FIFO per queue.

    A queue's head is inadmissible if its destination collides with a
    placement active during the frame's would-be air time, or if the frame
    would outlast the TXOP; inadmissibility blocks that whole queue for now
    (frames behind the head may never overtake it).
    """
    for ac in scan_order:
        q = queues.get(ac)
        if not q:
            continue
        f = q[0]
        end = t + f.duration
        if end > txop_dur:
            continue
        conflict = any(
            p.frame.dest == f.dest and p.start < end and p.end > t
            for p in placements
        )
        if conflict:
            continue
        return ac, f
    return None


def _replay_fifo(workload: Workload) -> Timeline:
    queues = {ac: list(workload.fifo_queues.get(ac, ())) for ac in PRIORITY_ORDER}
    n = workload.n_streams
    txops = []
    clock = 0
    first = True
    while any(queues.values()):
        primary = None
        if first and workload.grant is not None and queues.get(workload.grant):
            primary = workload.grant
        if primary is None:
            primary = next(ac for ac in PRIORITY_ORDER if queues[ac])
        first = False
        scan_order = (primary, *(ac for ac in PRIORITY_ORDER if ac is not primary))
        txop_dur = queues[primary][0].duration
        placements: list = []
        free = [0] * n
        while True:
            pending = [s for s in range(n) if free[s] < txop_dur]
            if not pending:
                break
            t = min(free[s] for s in pending)
            progressed = False
            for s in pending:
                if free[s] != t:
                    continue
                hit = _next_admissible(queues, scan_order, t, txop_dur, placements)
                if hit is None:
                    continue
                ac, frame = hit
                queues[ac].pop(0)
                placements.append(Placement(frame, s, t))
                free[s] = t + frame.duration
                progressed = True
            if not progressed:
                # Stalled streams idle until an active frame ends (the
                # destination it pins may free up), or to the TXOP end.
                ends = sorted(p.end for p in placements if p.end > t)
                jump = ends[0] if ends else txop_dur
                for s in pending:
                    if free[s] == t:
                        free[s] = jump
        txops.append(Txop(len(txops) + 1, clock, txop_dur, primary, tuple(placements)))
        clock += txop_dur
    return Timeline(n, tuple(txops))


def _replay_dems(workload: Workload) -> Timeline:
    users = sorted({u for (u, _ac) in workload.dems_queues})
    queues = {
        u: {ac: list(workload.dems_queues.get((u, ac), ())) for ac in PRIORITY_ORDER}
        for u in users
    }

    def head_queue(u):
        for ac in PRIORITY_ORDER:
            if queues[u][ac]:
                return queues[u][ac]
        return None

    n = workload.n_streams
    txops = []
    clock = 0
    while True:
        selections = []
        for u in users:
            if len(selections) == n:
                break
            q = head_queue(u)
            if q is not None:
                selections.append((u, q[0]))
        if not selections:
            break
        txop_dur = max(f.duration for _u, f in selections)
        primary = min((f.ac for _u, f in selections), key=PRIORITY_ORDER.index)
        placements = []
        for stream, (u, _f) in enumerate(selections):
            t = 0
            while True:
                q = head_queue(u)
                if q is None or t + q[0].duration > txop_dur:
                    break
                frame = q.pop(0)
                placements.append(Placement(frame, stream, t))
                t += frame.duration
        txops.append(Txop(len(txops) + 1, clock, txop_dur, primary, tuple(placements)))
        clock += txop_dur
    return Timeline(n, tuple(txops))


def replay(workload: Workload, scheduler: str) -> Timeline:
    """Run TXOPs until the chosen scheduler's queues are empty."""
    if scheduler == "fifo":
        return _replay_fifo(workload)
    if scheduler == "dems":
        return _replay_dems(workload)
    raise SchedulerError(f"unknown scheduler {scheduler!r}")


@dataclass(frozen=True)
class TimelineStats:
    periods: int                 # number of TXOPs
    completion: dict             # AC -> 1-based index of the TXOP with its last frame
    padding: int                 # idle stream-units summed over all TXOPs
    frames: int
    frames_per_txop: float


def timeline_stats(timeline: Timeline) -> TimelineStats:
    completion: dict = {}
    frames = 0
    padding = 0
    for txop in timeline.txops:
        padding += txop.padding(timeline.n_streams)
        for p in txop.placements:
            frames += 1
            completion[p.frame.ac] = txop.index
    periods = len(timeline.txops)
    return TimelineStats(
        periods=periods,
        completion=completion,
        padding=padding,
        frames=frames,
        frames_per_txop=frames / periods if periods else 0.0,
    )


def render_timeline(timeline: Timeline) -> str:
    """Compact fixed-text rendering of the per-TXOP stream layout."""
    lines = []
    for txop in timeline.txops:
        lines.append(f"txop {txop.index}: start={txop.start} dur={txop.duration} "
                     f"primary={txop.primary_ac}")
        for s in range(timeline.n_streams):
            cells = [
                f"{p.frame.ac}#{p.frame.id}->u{p.frame.dest} @{p.start} len{p.frame.duration}"
                for p in txop.placements
                if p.stream == s
            ]
            idle = txop.duration - txop.stream_occupancy(s)
            if idle:
                cells.append(f"idle {idle}")
            lines.append(f"  s{s + 1}: " + ("; ".join(cells) if cells else "idle"))
    return "\n".join(lines)


def summary_line(stats: TimelineStats) -> str:
    parts = [f"periods={stats.periods}"]
    for ac in PRIORITY_ORDER:
        if ac in stats.completion:
            parts.append(f"{ac}_done={stats.completion[ac]}")
    parts.append(f"padding={stats.padding}")
    parts.append(f"frames={stats.frames}")
    parts.append(f"frames_per_txop={stats.frames_per_txop:.2f}")
    return " ".join(parts)
