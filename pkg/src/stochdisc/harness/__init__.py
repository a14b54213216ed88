"""Experiment plumbing: configuration, seeded runs, sweeps, verification, CLI."""

from .config import ConfigError, ExperimentConfig, parse_seeds
from .runner import ResultRow, SweepResult, loglog_slope, read_rows, run_experiment, sweep
from .verify import verify

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "SweepResult",
    "loglog_slope",
    "parse_seeds",
    "read_rows",
    "run_experiment",
    "sweep",
    "verify",
]
