"""
Run folder writer: CSV tables, JSON ledgers, plots, the manifest and a plain-text summary.
"""

import json
import logging
import os
import platform
from datetime import datetime

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import scipy  # noqa: E402
import seaborn as sns  # noqa: E402

logger = logging.getLogger(__name__)

sns.set_style("whitegrid")
plt.rcParams["figure.figsize"] = (12, 6)
plt.rcParams["font.size"] = 10

CSV_FLOAT_FORMAT = "%.17g"


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return str(value)


class RunReporter:
    """
    Collects every artifact of one run under runs/<YYYYmmdd_HHMMSS>/.

    The root defaults to BINORMAL_RUNS_DIR (or `runs`). A clash with an
    existing folder of the same second gets a numeric suffix.
    """

    SAVE_LOCATION = "runs"

    def __init__(self, subcommand, root=None, stamp=None):
        """
        Args:
            subcommand (str): Experiment name, recorded in the manifest
            root (str, optional): Output root
            stamp (str, optional): Folder name, defaults to the current time
        """
        self.subcommand = subcommand
        self.root = root or os.getenv("BINORMAL_RUNS_DIR", self.SAVE_LOCATION)
        self.started = datetime.now()
        stamp = stamp or self.started.strftime("%Y%m%d_%H%M%S")
        folder = os.path.join(self.root, stamp)
        suffix = 1
        while os.path.exists(folder):
            folder = os.path.join(self.root, f"{stamp}_{suffix}")
            suffix += 1
        self.run_folder = folder
        os.makedirs(self.run_folder)
        self.artifacts = []
        self.suites = []
        self.failures = []
        logger.info(f"📁 Run artifacts will be saved to: {self.run_folder}")

    def path(self, filename):
        return os.path.join(self.run_folder, filename)

    def _save_csv(self, df, filename):
        """Save a DataFrame with full-precision floats."""
        filepath = self.path(filename)
        os.makedirs(os.path.dirname(filepath), exist_ok=True)
        df.to_csv(filepath, index=False, encoding="utf-8", float_format=CSV_FLOAT_FORMAT)
        self.artifacts.append(filename)
        logger.info(f"💾 Saved CSV: {filename}")
        return filepath

    def _save_json(self, data, filename):
        filepath = self.path(filename)
        os.makedirs(os.path.dirname(filepath), exist_ok=True)
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, default=_json_default)
        self.artifacts.append(filename)
        logger.info(f"💾 Saved JSON: {filename}")
        return filepath

    def _save_plot(self, filename):
        """Save the current matplotlib figure."""
        filepath = self.path(filename)
        plt.tight_layout()
        plt.savefig(filepath, dpi=300, bbox_inches="tight")
        plt.close()
        self.artifacts.append(filename)
        logger.info(f"💾 Saved plot: {filename}")
        return filepath

    def add_artifact(self, filepath):
        """Register a file written by a result object's own save()."""
        self.artifacts.append(os.path.relpath(filepath, self.run_folder))
        return filepath

    def record(self, name, passed, detail=""):
        """Record one in-run assertion; failed ones decide the exit status."""
        self.suites.append({"name": name, "passed": bool(passed), "detail": detail})
        if passed:
            logger.info(f"✅ {name} {detail}")
        else:
            self.failures.append(name)
            logger.error(f"❌ {name} failed {detail}")

    @staticmethod
    def versions():
        return {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        }

    def write_manifest(self, config, results=None):
        """
        manifest.json: the resolved configuration, versions, suites and artifacts.

        Args:
            config (dict): Every resolved configuration key
            results (dict, optional): Headline numbers of the run
        """
        manifest = {
            "subcommand": self.subcommand,
            "started": self.started.isoformat(timespec="seconds"),
            "finished": datetime.now().isoformat(timespec="seconds"),
            "config": config,
            "versions": self.versions(),
            "results": results or {},
            "suites": self.suites,
            "failures": self.failures,
            "artifacts": sorted(self.artifacts),
        }
        return self._save_json(manifest, "manifest.json")

    def write_summary(self, results=None):
        """RUN_SUMMARY.txt, a human-readable digest of the manifest."""
        lines = [
            "=" * 80,
            f"BINORMAL RUN: {self.subcommand.upper()}",
            "=" * 80,
            f"Started: {self.started.strftime('%Y-%m-%d %H:%M:%S')}",
            f"Folder: {self.run_folder}",
            "",
            "RESULTS",
            "-" * 80,
        ]
        for key, value in (results or {}).items():
            lines.append(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")
        if self.suites:
            lines += ["", "CHECKS", "-" * 80]
            for suite in self.suites:
                mark = "PASS" if suite["passed"] else "FAIL"
                lines.append(f"[{mark}] {suite['name']} {suite['detail']}".rstrip())
        lines += ["", "FILES", "-" * 80] + [f"  - {name}" for name in sorted(self.artifacts)] + ["=" * 80]
        summary_text = "\n".join(lines) + "\n"
        with open(self.path("RUN_SUMMARY.txt"), "w", encoding="utf-8") as f:
            f.write(summary_text)
        return summary_text
