import math
import unittest

import numpy as np

from hasimoto import FilamentEvolution, binormal_residual
from nlscoeff import NLS_COUPLING, anchor_state, evaluate_u
from selfsim import (
    SelfSimilarField,
    calibrate_angle_law,
    cfm_integral,
    integrate_profile,
    self_similar_curve,
    selfsim_filament,
)
from seqcore import ComplexSeq


class TestSelfSimilarFilament(unittest.TestCase):
    def test_modulus_and_phase_at_origin(self):
        x = np.linspace(-5, 5, 21)
        np.testing.assert_allclose(np.abs(selfsim_filament(0.7, 0.25, x)), 1.4, rtol=1e-14)
        self.assertEqual(selfsim_filament(0.7, 0.25, 0.0).imag, 0.0)

    def test_matches_one_mode_superposition_up_to_log_phase(self):
        a, t = 0.6, 0.03
        x = np.linspace(-2, 2, 41)
        state = anchor_state(ComplexSeq.from_dict({0: a}), t)
        ratio = evaluate_u(state, x) / selfsim_filament(a, t, x)
        np.testing.assert_allclose(ratio, np.exp(1j * NLS_COUPLING * a * a * math.log(t)), atol=1e-12)

    def test_rejects_nonpositive_time(self):
        with self.assertRaises(ValueError):
            selfsim_filament(1.0, 0.0, 1.0)


class TestCfmIntegral(unittest.TestCase):
    def test_values(self):
        self.assertEqual(cfm_integral(0.8, 0.3, 0.3), 0.0)
        self.assertAlmostEqual(cfm_integral(1.0, math.exp(-1), 1.0), 1.0, places=14)
        self.assertAlmostEqual(cfm_integral(1.0, 0.1, 2.0) * 4, cfm_integral(2.0, 0.1, 2.0), places=12)


class TestProfile(unittest.TestCase):
    def test_unit_tangent_and_curvature(self):
        profile = integrate_profile(0.5)
        np.testing.assert_allclose(np.linalg.norm(profile.T, axis=1), 1.0, atol=1e-10)
        ds = profile.s[1] - profile.s[0]
        curvature = np.linalg.norm(np.gradient(profile.T, ds, axis=0), axis=1)
        np.testing.assert_allclose(curvature[1:-1], 0.5, rtol=1e-3)
        self.assertTrue(profile.saturated)

    def test_small_parameter_has_no_corner(self):
        theta = integrate_profile(0.1).theta
        self.assertGreater(theta, math.pi - 0.4)
        self.assertLess(theta, math.pi)

    def test_angle_decreases_with_parameter(self):
        angles = [integrate_profile(a).theta for a in (0.1, 0.5, 1.0, 1.5, 2.0)]
        self.assertTrue(all(later < earlier for earlier, later in zip(angles, angles[1:])))

    def test_angle_law_calibration(self):
        a_values = np.arange(0.2, 1.21, 0.2)
        calibration = calibrate_angle_law(a_values)
        self.assertGreaterEqual(calibration.r_squared, 0.999)
        self.assertAlmostEqual(calibration.c_star / (math.pi / 2), 1.0, delta=0.01)
        doubled = calibrate_angle_law(a_values, S_factor=2.0)
        self.assertAlmostEqual(doubled.c_star / calibration.c_star, 1.0, delta=0.01)

    def test_corner_at_time_zero(self):
        profile = integrate_profile(1.0)
        x = np.array([-2.0, 0.0, 3.0])
        corner = self_similar_curve(profile, 0.0, x)
        np.testing.assert_allclose(corner[2] / 3.0, profile.A_plus)
        np.testing.assert_allclose(corner[0] / -2.0, profile.A_minus)
        cos_angle = np.dot(corner[0], corner[2]) / 6.0
        self.assertAlmostEqual(math.acos(cos_angle), profile.theta, places=12)
        np.testing.assert_allclose(self_similar_curve(profile, 0.01, x)[[0, 2]], corner[[0, 2]], atol=0.05)

    def test_rejects_short_profile(self):
        with self.assertRaises(ValueError):
            integrate_profile(0.5, S=10.0)


class TestSelfSimilarEvolution(unittest.TestCase):
    def test_evolution_matches_rescaled_profile(self):
        a = 0.5
        profile = integrate_profile(a)
        x = np.arange(-512, 513) * 2.0**-7
        times = np.array([1.0, 1.05, 1.1])
        evolution = FilamentEvolution(SelfSimilarField(a), x, chi0=(0.0, 0.0, 2 * a))
        traj = evolution.run(times)
        for state in traj:
            np.testing.assert_allclose(state.chi, profile.curve(state.t, x), atol=1e-4)
        self.assertLess(traj.route_deviation, 1e-5)

    def test_residual_order(self):
        a = 0.5
        residuals = []
        for step in (0.05, 0.025):
            x = np.arange(-round(2 / step), round(2 / step) + 1) * step
            times = 1.0 + step * np.arange(5)
            evolution = FilamentEvolution(SelfSimilarField(a), x, chi0=(0.0, 0.0, 2 * a))
            residuals.append(binormal_residual(evolution.run(times, check_route=False)).max_chi)
        self.assertGreaterEqual(math.log2(residuals[0] / residuals[1]), 1.8)


if __name__ == "__main__":
    unittest.main()
