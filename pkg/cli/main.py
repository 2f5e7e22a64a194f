"""
Command-line entry point.

    python -m cli <subcommand> [--config FILE] [--key value ...]

Exit status: 0 when every in-run check passes, 1 when one fails,
2 on a configuration error.
"""

import argparse
import logging

from reports import RunReporter
from .base import AssertionFailure, ConfigError, setup_logging, worker_count, worker_pool
from .config import DEFAULTS, MODES, SUBCOMMANDS, RunConfig
from .experiments import (
    GrowthExperiment,
    RiemannExperiment,
    SelfSimExperiment,
    SimulateExperiment,
    TalbotExperiment,
    ValidateExperiment,
)

logger = logging.getLogger(__name__)


class ExperimentOrchestrator:
    """
    Orchestrator to run one experiment by subcommand name.
    """

    EXPERIMENTS = {
        "selfsim": SelfSimExperiment,
        "simulate": SimulateExperiment,
        "talbot": TalbotExperiment,
        "riemann": RiemannExperiment,
        "growth": GrowthExperiment,
        "validate": ValidateExperiment,
    }

    @classmethod
    def run(cls, config: RunConfig, root=None):
        """
        Run the experiment named by the configuration and write its run folder.

        Args:
            config (RunConfig): Resolved configuration
            root (str, optional): Output root, overrides the config and environment

        Returns:
            RunReporter: The reporter holding the recorded checks

        Raises:
            ConfigError: If no experiment is registered for the subcommand
            AssertionFailure: If an in-run check failed
        """
        if config.subcommand not in cls.EXPERIMENTS:
            available = ", ".join(cls.EXPERIMENTS.keys())
            raise ConfigError(f"Unknown experiment: {config.subcommand}. Available experiments: {available}")

        reporter = RunReporter(config.subcommand, root=root or config.output_dir or None)
        logger.info(f"📊 {config.subcommand} ({config.mode}), seed {config.seed}")
        results = {}
        try:
            with worker_pool(worker_count(config.workers)) as map_fn:
                experiment = cls.EXPERIMENTS[config.subcommand](config, reporter, map_fn)
                results = experiment.run()
        finally:
            reporter.write_manifest(config.to_dict(), results)
            reporter.write_summary(results)
        if reporter.failures:
            raise AssertionFailure(reporter.failures)
        return reporter

    @classmethod
    def get_available_experiments(cls):
        return list(cls.EXPERIMENTS.keys())

    @classmethod
    def is_experiment_available(cls, name):
        return name in cls.EXPERIMENTS


def build_parser():
    """One subparser per subcommand; every configuration key becomes a --flag."""
    parser = argparse.ArgumentParser(prog="binormal", description="Binormal-flow and NLS numerical laboratory")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, help=f"modes: {', '.join(MODES[name])}")
        sub.add_argument("--config", help="KEY=VALUE file, or a manifest.json to replay")
        for key, default in DEFAULTS.items():
            shown = ",".join(str(v) for v in default) if isinstance(default, tuple) else default
            sub.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None, help=f"default: {shown}")
    return parser


def main(argv=None):
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    overrides = {key: getattr(args, key) for key in DEFAULTS}
    try:
        config = RunConfig.from_sources(args.subcommand, path=args.config, overrides=overrides)
        ExperimentOrchestrator.run(config)
    except ConfigError as e:
        logger.error(f"❌ Configuration error: {e}")
        return 2
    except AssertionFailure as e:
        logger.error(f"❌ {e}")
        return 1
    logger.info("🎉 All checks passed")
    return 0
