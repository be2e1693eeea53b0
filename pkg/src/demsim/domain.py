"""Core value types shared by the schedulers, the engine and the CLI.

Conventions used throughout the package:

* user (station) ids are 1-based: ``u1 .. uN``;
* frame durations are integer time units, >= 1;
* access categories follow EDCA priority VO > VI > BE > BK.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Raised for scenario parameters outside their legal domain."""


class SchedulerError(RuntimeError):
    """Raised when a scheduling operation is asked to act on an illegal state."""


class AccessCategory(enum.Enum):
    VO = "vo"
    VI = "vi"
    BE = "be"
    BK = "bk"

    def __str__(self):
        return self.value


# Highest priority first.  Index in this tuple is the rank used for ordering.
PRIORITY_ORDER = (
    AccessCategory.VO,
    AccessCategory.VI,
    AccessCategory.BE,
    AccessCategory.BK,
)

_RANK = {ac: i for i, ac in enumerate(PRIORITY_ORDER)}


def ac_priority(a: AccessCategory, b: AccessCategory) -> int:
    """Three-way comparison on EDCA priority.

    Negative means ``a`` is served first, positive means ``b`` is, zero means
    equal.  ``sorted(acs, key=lambda ac: PRIORITY_ORDER.index(ac))`` is the
    matching sort idiom.
    """
    return _RANK[a] - _RANK[b]


@dataclass(slots=True)
class Frame:
    """A queued MPDU heading to one destination.

    Instances are treated as immutable once enqueued (value semantics); no
    field is ever rewritten by the schedulers.
    """

    id: int
    ac: AccessCategory
    dest: int
    duration: int = 1

    def __post_init__(self):
        if self.dest < 1:
            raise ValueError("dest must be a 1-based user id")
        if self.duration < 1:
            raise ValueError("duration must be >= 1")


@dataclass(frozen=True)
class ScenarioConfig:
    """Immutable description of one simulated operating point.

    ``n_streams`` defaults to min(3, n_users) when not given.  ``beta`` is the
    traffic split knob; its legal range depends on ``n_users`` and is checked
    by the traffic model, not here.
    """

    n_users: int
    alpha: float
    beta: float = 1.0
    n_streams: int = field(default=-1)
    periods: int = 500
    runs: int = 15
    master_seed: int = 42

    def __post_init__(self):
        if self.n_streams == -1:
            object.__setattr__(self, "n_streams", min(3, self.n_users))

    @property
    def scenario(self) -> str:
        return f"{self.n_users}u"


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check ranges that do not depend on the traffic model.

    Returns the config unchanged so call sites can chain it.
    """
    if not 1 <= cfg.n_users <= 8:
        raise ConfigError("n_users out of [1, 8]")
    if not 0.0 <= cfg.alpha <= 1.0:
        raise ConfigError("alpha out of [0, 1]")
    if cfg.n_streams < 1:
        raise ConfigError("n_streams must be >= 1")
    if cfg.periods < 1:
        raise ConfigError("periods must be >= 1")
    if cfg.runs < 1:
        raise ConfigError("runs must be >= 1")
    return cfg


@dataclass(slots=True)
class TransmissionPlan:
    """One MU transmission: up to n_streams frames to distinct destinations."""

    frames: tuple[Frame, ...]
    primary_ac: AccessCategory
    period_index: int = 0

    def destinations(self) -> tuple[int, ...]:
        return tuple(f.dest for f in self.frames)


def check_plan(plan: TransmissionPlan, n_streams: int) -> None:
    """Assert the structural invariants every committed plan must satisfy."""
    if not plan.frames:
        raise SchedulerError("empty transmission plan")
    if len(plan.frames) > n_streams:
        raise SchedulerError("plan exceeds stream budget")
    dests = plan.destinations()
    if len(set(dests)) != len(dests):
        raise SchedulerError("duplicate destination in plan")
