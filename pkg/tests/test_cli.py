import glob
import json
import os
import tempfile
import unittest
from unittest import mock

import pandas as pd

from cli import (
    DEFAULTS,
    VALIDATION_SUITES,
    ConfigError,
    Experiment,
    ExperimentOrchestrator,
    RunConfig,
    coerce,
    main,
    worker_pool,
)


def run_folders(root):
    return sorted(path for path in glob.glob(os.path.join(root, "*")) if os.path.isdir(path))


class FailingExperiment(Experiment):
    name = "failing"

    def execute(self):
        self.check("always_fails", False, "(by construction)")
        return {"value": 1.0}


class TestConfig(unittest.TestCase):
    def test_coerce_by_default_type(self):
        self.assertEqual(coerce("corners", "-1, 1"), (-1, 1))
        self.assertEqual(coerce("angles", "2,2.5"), (2.0, 2.5))
        self.assertEqual(coerce("torsions", "0.5"), (0.5,))
        self.assertEqual(coerce("suites", "gauss_sum_law"), ("gauss_sum_law",))
        self.assertIs(coerce("plots", "yes"), True)
        self.assertIs(coerce("plots", "off"), False)
        self.assertEqual(coerce("n", "16"), 16)
        self.assertEqual(coerce("tol", "1e-10"), 1e-10)
        self.assertEqual(coerce("p_values", [1, 2]), (1.0, 2.0))

    def test_invalid_values_raise(self):
        with self.assertRaises(ConfigError):
            coerce("bogus", "1")
        with self.assertRaises(ConfigError):
            coerce("tol", "small")
        with self.assertRaises(ConfigError):
            coerce("plots", "maybe")

    def test_defaults_and_mode(self):
        config = RunConfig("riemann")
        self.assertEqual(config.mode, "trajectory")
        self.assertEqual(config["truncation"], DEFAULTS["truncation"])
        self.assertEqual(set(config.to_dict()), set(DEFAULTS) | {"subcommand"})
        with self.assertRaises(ConfigError):
            RunConfig("riemann", {"mode": "carpet"})
        with self.assertRaises(ConfigError):
            RunConfig("scrape")
        with self.assertRaises(ConfigError):
            RunConfig("validate", {"suites": "gauss_sum_law,unknown"})

    def test_file_then_flags(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.env")
            with open(path, "w", encoding="utf-8") as f:
                f.write("x0=1.5\ntruncation=200\n")
            config = RunConfig.from_sources("riemann", path, {"truncation": "300", "seed": None})
        self.assertEqual(config.x0, 1.5)
        self.assertEqual(config.truncation, 300)
        self.assertEqual(config.seed, 0)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_sources("riemann", "/nonexistent/run.env")

    def test_serial_pool_is_builtin_map(self):
        with worker_pool(1) as map_fn:
            self.assertIs(map_fn, map)


class TestMain(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def trajectory_args(self, root=None):
        return ["riemann", "--mode", "trajectory", "--truncation", "100", "--n-times", "33",
                "--output-dir", root or self.root]

    def test_riemann_trajectory_run(self):
        self.assertEqual(main(self.trajectory_args()), 0)
        (folder,) = run_folders(self.root)
        frame = pd.read_csv(os.path.join(folder, "riemann_trajectory.csv"))
        self.assertEqual(len(frame), 33)
        self.assertEqual(frame.loc[0, "re_R"], 0.0)
        with open(os.path.join(folder, "manifest.json"), encoding="utf-8") as f:
            manifest = json.load(f)
        self.assertEqual(manifest["config"]["truncation"], 100)
        self.assertEqual(manifest["failures"], [])
        self.assertIn("riemann_trajectory.csv", manifest["artifacts"])
        self.assertTrue(os.path.isfile(os.path.join(folder, "RUN_SUMMARY.txt")))

    def test_same_config_same_bytes(self):
        self.assertEqual(main(self.trajectory_args()), 0)
        self.assertEqual(main(self.trajectory_args()), 0)
        first, second = run_folders(self.root)
        with open(os.path.join(first, "riemann_trajectory.csv"), "rb") as a, \
                open(os.path.join(second, "riemann_trajectory.csv"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_manifest_replays_the_run(self):
        self.assertEqual(main(self.trajectory_args()), 0)
        (folder,) = run_folders(self.root)
        manifest_path = os.path.join(folder, "manifest.json")
        with open(manifest_path, encoding="utf-8") as f:
            recorded = json.load(f)["config"]
        replayed = RunConfig.from_sources("riemann", manifest_path)
        self.assertEqual(replayed.to_dict(), recorded)

    def test_configuration_errors_exit_2(self):
        self.assertEqual(main(["riemann", "--mode", "carpet", "--output-dir", self.root]), 2)
        self.assertEqual(main(["riemann", "--truncation", "many", "--output-dir", self.root]), 2)
        self.assertEqual(main(["riemann", "--no-such-flag", "1"]), 2)
        path = os.path.join(self.root, "bad.env")
        with open(path, "w", encoding="utf-8") as f:
            f.write("bogus=1\n")
        self.assertEqual(main(["riemann", "--config", path]), 2)

    def test_failed_check_exits_1(self):
        with mock.patch.dict(ExperimentOrchestrator.EXPERIMENTS, {"riemann": FailingExperiment}):
            self.assertEqual(main(["riemann", "--output-dir", self.root]), 1)
        (folder,) = run_folders(self.root)
        with open(os.path.join(folder, "manifest.json"), encoding="utf-8") as f:
            manifest = json.load(f)
        self.assertEqual(manifest["failures"], ["always_fails"])

    def test_fast_validation_suites(self):
        suites = "gauss_sum_law,riemann_series,poisson_identity"
        self.assertEqual(main(["validate", "--suites", suites, "--output-dir", self.root]), 0)
        (folder,) = run_folders(self.root)
        with open(os.path.join(folder, "manifest.json"), encoding="utf-8") as f:
            manifest = json.load(f)
        self.assertEqual([suite["name"] for suite in manifest["suites"]], suites.split(","))
        self.assertTrue(all(suite["passed"] for suite in manifest["suites"]))

    def test_available_experiments(self):
        self.assertEqual(ExperimentOrchestrator.get_available_experiments(),
                         ["selfsim", "simulate", "talbot", "riemann", "growth", "validate"])
        self.assertTrue(ExperimentOrchestrator.is_experiment_available("growth"))
        self.assertEqual(len(VALIDATION_SUITES), 12)


@unittest.skipUnless(os.getenv("BINORMAL_SLOW_TESTS") == "1", "set BINORMAL_SLOW_TESTS=1 for heavy acceptance runs")
class TestFullValidation(unittest.TestCase):
    def test_validate_on_defaults(self):
        with tempfile.TemporaryDirectory() as root:
            self.assertEqual(main(["validate", "--output-dir", root]), 0)
            (folder,) = run_folders(root)
            with open(os.path.join(folder, "manifest.json"), encoding="utf-8") as f:
                manifest = json.load(f)
        self.assertEqual([suite["name"] for suite in manifest["suites"]], list(VALIDATION_SUITES))


if __name__ == "__main__":
    unittest.main()
