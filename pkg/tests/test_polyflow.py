import math
import os
import tempfile
import unittest

import numpy as np

from hasimoto import PolygonSpec, StraightLine, corner_spec
from polyflow import (
    PipelineError,
    PolygonRun,
    anchor_sweep,
    band_means,
    corner_convergence,
    corner_vs_riemann,
    CornerDeviation,
    dyadic_times,
    energy_closed_form,
    energy_density,
    polygon_trace_angles,
    reversal_consistency,
    riemann_polygon,
    riemann_reference,
    simulate_polygon,
    symmetric_grid,
    tangent_derivative,
    tangent_fourier_growth,
    trace_convergence,
    windowed_transform,
)

SLOW = os.getenv("BINORMAL_SLOW_TESTS") == "1"

T0 = 1e-3


class TestPipelineBasics(unittest.TestCase):
    def test_dyadic_times(self):
        np.testing.assert_allclose(dyadic_times(T0, 8 * T0), T0 * np.array([1.0, 2.0, 4.0, 8.0]))

    def test_symmetric_grid(self):
        x = symmetric_grid(corner_spec({-1: 2.0, 1: 2.0}))
        np.testing.assert_allclose(x, -x[::-1])
        self.assertIn(0.0, x)
        self.assertEqual(x[1] - x[0], 2.0**-7)

    def test_corner_near_grid_edge(self):
        with self.assertRaises(ValueError):
            simulate_polygon(corner_spec({3: 2.0}), t0=T0, x=np.linspace(-4.0, 4.0, 513))

    def test_run_needs_ordered_times(self):
        with self.assertRaises(ValueError):
            PolygonRun(spec=PolygonSpec.straight(), t0=1.0, T=0.5, coefficients=None, curve=None)

    def test_pipeline_error_names_stage(self):
        error = PipelineError("frames", "drift")
        self.assertEqual(error.stage, "frames")
        self.assertIn("[frames]", str(error))
        with self.assertRaises(ValueError):
            PipelineError("plotting", "nope")


class TestStraightLine(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.polygon_run = simulate_polygon(PolygonSpec.straight(), t0=T0)

    def test_stays_straight(self):
        chi = self.polygon_run.curve.chi
        np.testing.assert_allclose(chi[:, :, 0], np.broadcast_to(self.polygon_run.x, chi.shape[:2]), atol=1e-12)
        np.testing.assert_allclose(chi[:, :, 1:], 0.0, atol=1e-12)

    def test_trace_deviation_vanishes(self):
        result = trace_convergence(self.polygon_run)
        self.assertLess(result.max_deviation.max(), 1e-12)
        self.assertTrue(np.isnan(result.exponent).all())
        self.assertTrue(np.isnan(result.rate_free_exponent).all())

    def test_metadata_is_complete(self):
        for key in ("t0", "T", "times", "dx", "K", "tol", "coupling", "step_angle", "mass_drift", "residual_chi"):
            self.assertIn(key, self.polygon_run.metadata)

    def test_residual_vanishes(self):
        self.assertLess(self.polygon_run.residual.max_chi, 1e-6)
        self.assertLess(self.polygon_run.residual.max_tangent, 1e-6)

    def test_save(self):
        with tempfile.TemporaryDirectory() as folder:
            paths = self.polygon_run.save(folder)
            self.assertTrue(all(os.path.exists(p) for p in paths))
            self.assertIn(os.path.join(folder, "run.json"), paths)


class TestOneCorner(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.angle = math.pi / 2
        cls.polygon_run = simulate_polygon(corner_spec({0: cls.angle}), t0=T0)

    def test_trace_exponent(self):
        result = trace_convergence(self.polygon_run, x_samples=[0.0])
        self.assertAlmostEqual(result.exponent[0], 0.5, delta=0.1)
        self.assertAlmostEqual(result.rate_free_exponent[0], 0.5, delta=0.1)

    def test_residual_attached_on_dyadic_times(self):
        residual = self.polygon_run.residual
        self.assertIsNotNone(residual)
        np.testing.assert_allclose(residual.times, T0 * np.array([2.0, 4.0]))
        self.assertTrue(np.isfinite(residual.max_chi))
        self.assertEqual(self.polygon_run.metadata["residual_chi"], residual.max_chi)

    def test_corner_angle_recovery(self):
        angles = polygon_trace_angles(self.polygon_run)
        self.assertAlmostEqual(angles[0], self.angle, delta=1e-2)

    def test_frames_stay_orthonormal(self):
        self.assertLess(self.polygon_run.metadata["orthonormality"], 1e-8)


class TestReversal(unittest.TestCase):
    def test_mirror_is_orientation_reversing(self):
        check = reversal_consistency(corner_spec({-1: 2.0, 1: 1.5}), t0=T0, T=4 * T0)
        self.assertAlmostEqual(check.det, -1.0, places=6)
        self.assertLess(check.residual, 1e-3)


class TestAnchorSweep(unittest.TestCase):
    def test_constant_experiment(self):
        sweep = anchor_sweep(lambda t0: 2.0)
        self.assertEqual(sweep.relative_spread, 0.0)
        self.assertEqual(len(sweep.to_frame()), 3)


class TestCornerVsRiemann(unittest.TestCase):
    def test_polygon_construction(self):
        spec = riemann_polygon(8, nu=0.5, theta=1.0)
        self.assertEqual(spec.corners, (-2, -1, 0, 1, 2))
        self.assertAlmostEqual(spec.angles[0], math.pi - 1 / 8, places=14)

    def test_reference_starts_at_zero(self):
        reference = riemann_reference(np.linspace(T0, 0.5, 9), theta=1.0)
        np.testing.assert_allclose(reference[0], 0.0, atol=1e-15)
        np.testing.assert_allclose(reference[:, 0], 0.0)

    def test_flat_polygon_gives_zero_paths(self):
        trajectory = corner_vs_riemann(8, theta=0.0, n_saved=9)
        self.assertEqual(trajectory.sup_deviation, 0.0)
        np.testing.assert_allclose(trajectory.rotation, np.eye(3))

    def test_scale_floor(self):
        with self.assertRaises(ValueError):
            corner_vs_riemann(4)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 for corner trajectories")
    def test_deviation_decreases_with_scale(self):
        frame = corner_convergence((8, 16, 32))
        self.assertTrue(np.all(np.diff(frame["sup_deviation"]) < 0))
        self.assertLess(frame["relative"].iloc[-1], 0.1)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 for corner trajectories")
    def test_stable_across_anchor_times(self):
        sweep = anchor_sweep(CornerDeviation(32), t0_values=(1e-2, 1e-3))
        self.assertLess(sweep.relative_spread, 0.2)


class TestFourierGrowth(unittest.TestCase):
    def test_still_line_has_zero_transform(self):
        x = np.linspace(-9.0, 9.0, 2001)
        density = tangent_derivative(StraightLine(), 0.1, x)
        np.testing.assert_array_equal(windowed_transform(x, density, [0.0, 10.0], 8.0), 0.0)

    def test_needs_two_equal_corners(self):
        with self.assertRaises(ValueError):
            tangent_fourier_growth(corner_spec({0: 2.0}))
        with self.assertRaises(ValueError):
            tangent_fourier_growth(corner_spec({-1: 2.0, 1: 1.0}))
        with self.assertRaises(ValueError):
            tangent_fourier_growth(corner_spec({-1: 2.0, 1: 2.0}), L=4.0)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 for the Fourier growth sweep")
    def test_logarithmic_growth(self):
        growth = tangent_fourier_growth(corner_spec({-1: 2.0, 1: 2.0}))
        self.assertGreaterEqual(growth.r_squared, 0.9)
        self.assertGreater(growth.slope, 0.0)
        self.assertFalse(growth.flags["outside_unbounded"])


class TestEnergyDensity(unittest.TestCase):
    def setUp(self):
        self.spec = corner_spec({-1: 2.0, 1: 2.0})

    def test_closed_form_at_time_zero(self):
        energy = energy_density(self.spec, t=0.0, bands=[16])
        self.assertAlmostEqual(energy.values[0] / energy.closed_form, 1.0, delta=0.02)
        a = (2.0 / math.pi * -math.log(math.sin(1.0))) ** 0.5
        self.assertAlmostEqual(energy.closed_form, 8 * (1 - math.exp(-math.pi * a * a)), places=12)

    def test_instantaneous_growth(self):
        closed_form, upper = energy_closed_form(self.spec)
        self.assertLess(closed_form, upper)
        self.assertTrue(energy_density(self.spec, bands=[8, 12]).flags["instantaneous_growth"])

    def test_plateau_at_time_zero(self):
        energy = energy_density(self.spec)
        self.assertFalse(energy.flags["plateau_not_reached"])

    def test_straight_line(self):
        energy = energy_density(PolygonSpec.straight())
        np.testing.assert_array_equal(energy.values, 0.0)
        self.assertEqual(energy.closed_form, 0.0)

    def test_contract(self):
        with self.assertRaises(ValueError):
            energy_density(corner_spec({5: 2.0}), L=8.0)
        with self.assertRaises(ValueError):
            band_means(np.linspace(0.0, 10.0, 11), np.ones((11, 3)), [4])


if __name__ == "__main__":
    unittest.main()
