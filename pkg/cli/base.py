from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
import logging
import os

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

LOG_DIR = "logs"
LOG_FILE = "binormal.log"


class ConfigError(Exception):
    """Invalid run configuration; the CLI exits with status 2."""


class AssertionFailure(Exception):
    """An in-run numerical check failed; the CLI exits with status 1."""

    def __init__(self, invariants):
        self.invariants = list(invariants)
        super().__init__(f"Failed checks: {', '.join(self.invariants)}")


def setup_logging(level=logging.INFO):
    """File plus console logging, configured once by the entry point."""
    os.makedirs(LOG_DIR, exist_ok=True)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(LOG_DIR, LOG_FILE)),
            logging.StreamHandler()
        ]
    )


def worker_count(configured=None):
    """Configured workers, else BINORMAL_WORKERS, else 1."""
    if configured:
        return int(configured)
    raw = os.getenv("BINORMAL_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"BINORMAL_WORKERS must be an integer, got '{raw}'")
    return max(1, workers)


@contextmanager
def worker_pool(workers=1):
    """
    Yield a map-like callable: the builtin map for one worker, a process pool's map otherwise.

    Tasks handed to a pool must be picklable.
    """
    if workers <= 1:
        yield map
        return
    logger.info(f"🔄 Starting a pool of {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield executor.map


class Experiment(ABC):
    """
    One subcommand: reads its keys from the RunConfig, writes through a RunReporter.

    Subclasses implement `execute`, which returns the headline results and
    records its checks on the reporter.
    """

    name = None

    def __init__(self, config, reporter, map_fn=map):
        self.config = config
        self.reporter = reporter
        self.map_fn = map_fn

    @abstractmethod
    def execute(self):
        """
        Run the experiment.

        Returns:
            dict: Headline numbers for the manifest and the summary
        """
        pass

    def check(self, name, passed, detail=""):
        self.reporter.record(name, passed, detail)
        return passed

    def run(self):
        logger.info(f"🚀 Running experiment '{self.name}'")
        try:
            results = self.execute()
        except Exception as e:
            logger.error(f"❌ Experiment '{self.name}' failed: {e}")
            raise
        logger.info(f"✅ Experiment '{self.name}' finished")
        return results
