"""Slot-level downlink MU-MIMO scheduling simulator and analytics.

Two schedulers over saturated EDCA traffic: the traditional per-AC FIFO
discipline (prone to head-of-line blocking when destinations repeat) and a
decoupled per-user queueing discipline (DEMS).  Includes exact analytics,
a seeded simulation engine, grid sweeps with CSV reports, and deterministic
trace replay of hand-written workloads.
"""
from .analytic import hol_blocking_monte_carlo, hol_blocking_probability, hol_curve
from .domain import (
    AccessCategory,
    ConfigError,
    Frame,
    PRIORITY_ORDER,
    ScenarioConfig,
    SchedulerError,
    TransmissionPlan,
    validate_config,
)
from .engine import (
    CounterStats,
    RNG_NAME,
    derive_seed,
    fifo_exact_expected,
    run_once,
    run_replications,
)
from .traffic import BetaDistribution, build_beta_distribution

__version__ = "0.1.0"

__all__ = [
    "AccessCategory",
    "BetaDistribution",
    "ConfigError",
    "CounterStats",
    "Frame",
    "PRIORITY_ORDER",
    "RNG_NAME",
    "ScenarioConfig",
    "SchedulerError",
    "TransmissionPlan",
    "__version__",
    "build_beta_distribution",
    "derive_seed",
    "fifo_exact_expected",
    "hol_blocking_monte_carlo",
    "hol_blocking_probability",
    "hol_curve",
    "run_once",
    "run_replications",
    "validate_config",
]
