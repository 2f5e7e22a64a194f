"""Command-line runner: configuration, experiments and exit codes."""

from .base import AssertionFailure, ConfigError, Experiment, setup_logging, worker_count, worker_pool
from .config import DEFAULTS, MODES, SUBCOMMANDS, VALIDATION_SUITES, RunConfig, coerce
from .main import ExperimentOrchestrator, build_parser, main

__all__ = [
    "AssertionFailure",
    "ConfigError",
    "Experiment",
    "setup_logging",
    "worker_count",
    "worker_pool",
    "DEFAULTS",
    "MODES",
    "SUBCOMMANDS",
    "VALIDATION_SUITES",
    "RunConfig",
    "coerce",
    "ExperimentOrchestrator",
    "build_parser",
    "main",
]
