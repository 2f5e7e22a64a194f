import json
import os
import tempfile
import unittest

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from reports import PlotHelper, RunReporter


class TestRunReporter(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.reporter = RunReporter("riemann", root=self.tmp.name, stamp="20260101_000000")

    def tearDown(self):
        self.tmp.cleanup()

    def test_run_folder_and_clash_suffix(self):
        self.assertTrue(os.path.isdir(self.reporter.run_folder))
        second = RunReporter("riemann", root=self.tmp.name, stamp="20260101_000000")
        self.assertEqual(os.path.basename(second.run_folder), "20260101_000000_1")

    def test_csv_keeps_full_precision(self):
        path = self.reporter._save_csv(pd.DataFrame({"t": [0.1], "value": [1.0 / 3.0]}), "table.csv")
        with open(path, encoding="utf-8") as f:
            text = f.read()
        self.assertIn("0.10000000000000001", text)
        self.assertEqual(pd.read_csv(path)["value"].iloc[0], 1.0 / 3.0)
        self.assertIn("table.csv", self.reporter.artifacts)

    def test_json_handles_numpy_and_complex(self):
        path = self.reporter._save_json({"x": np.float64(0.5), "n": np.int64(3), "a": np.arange(3), "z": 1 + 2j},
                                        "data.json")
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        self.assertEqual(data, {"x": 0.5, "n": 3, "a": [0, 1, 2], "z": [1.0, 2.0]})

    def test_failed_checks_are_collected(self):
        self.reporter.record("riemann_vanishes_at_zero", True, "(R(0) = 0)")
        self.reporter.record("flatness_increasing", False, "(F = [3.1, 3.0])")
        self.assertEqual(self.reporter.failures, ["flatness_increasing"])
        self.assertEqual(len(self.reporter.suites), 2)

    def test_manifest_and_summary(self):
        self.reporter.record("poisson_identity", True, "(max residual 1e-12)")
        path = self.reporter.write_manifest({"subcommand": "riemann", "seed": 0}, {"points": 33})
        with open(path, encoding="utf-8") as f:
            manifest = json.load(f)
        for key in ("config", "versions", "results", "suites", "failures", "artifacts"):
            self.assertIn(key, manifest)
        self.assertIn("numpy", manifest["versions"])
        self.assertEqual(manifest["results"], {"points": 33})

        summary = self.reporter.write_summary({"points": 33, "slope": 0.5})
        self.assertIn("[PASS] poisson_identity", summary)
        self.assertIn("slope: 0.5", summary)
        self.assertTrue(os.path.isfile(self.reporter.path("RUN_SUMMARY.txt")))


class TestPlotHelper(unittest.TestCase):
    def test_plots_are_saved(self):
        with tempfile.TemporaryDirectory() as tmp:
            reporter = RunReporter("talbot", root=tmp)
            x = np.linspace(-1.0, 1.0, 11)
            fig, axes = plt.subplots(1, 3)
            PlotHelper.create_path(axes[0], np.exp(1j * x), "circle", label="path")
            PlotHelper.create_fit(axes[1], [1.0, 2.0, 4.0], [1.0, 1.5, 2.0], 0.5, 0.0, "fit", "x", "y", loglog=True)
            PlotHelper.create_carpet(axes[2], x, ["1/3", "1/5"], np.abs(np.vstack([x, 2 * x])), "carpet")
            path = reporter._save_plot("panel.png")
            self.assertTrue(os.path.getsize(path) > 0)
            self.assertEqual(axes[0].get_title(), "circle")


if __name__ == "__main__":
    unittest.main()
