import math
import os
import unittest

import numpy as np

from riemann import (
    F_ZERO,
    GOLDEN_TIME,
    F_closed_form,
    F_kernel,
    RiemannSeries,
    dyadic_block_lp,
    eval_R,
    flatness,
    flatness_scan,
    holder_estimate,
    near_rational_expansion,
    riemann_trajectory,
    spectrum_panel,
    structure_exponents,
    torsion_series,
)
from seqcore import RationalTime

SLOW = os.getenv("BINORMAL_SLOW_TESTS") == "1"


class TestRiemannSeries(unittest.TestCase):
    def setUp(self):
        self.times = np.linspace(-7.0, 7.0, 57)

    def test_vanishes_at_time_zero(self):
        for x0 in (0.0, 1.0, 2 * math.pi / 3):
            self.assertEqual(eval_R(RiemannSeries(x0=x0, N=100), 0.0).value, 0)

    def test_periodic_in_time(self):
        series = RiemannSeries(x0=0.4, N=2000)
        np.testing.assert_allclose(series.evaluate(self.times + 2 * math.pi), series.evaluate(self.times), atol=1e-10)

    def test_value_at_half_period(self):
        value = eval_R(RiemannSeries(N=10_000), math.pi)
        self.assertLess(abs(value.value + math.pi**2 / 2), value.tail)
        self.assertEqual(value.tail, 2e-4)

    def test_conjugate_symmetry(self):
        series = RiemannSeries(N=3000)
        np.testing.assert_allclose(series.evaluate(-self.times), np.conj(series.evaluate(self.times)), atol=1e-11)

    def test_tail_certificate(self):
        for x0 in (0.0, 1.0):
            coarse, fine = RiemannSeries(x0=x0, N=500), RiemannSeries(x0=x0, N=2000)
            gap = np.abs(coarse.evaluate(self.times) - fine.evaluate(self.times))
            self.assertLessEqual(gap.max(), coarse.tail)

    def test_integer_torsion_offset_shifts_index(self):
        plain, shifted = RiemannSeries(N=2000), torsion_series(1, N=2000)
        gap = np.abs(plain.evaluate(self.times) - shifted.evaluate(self.times))
        self.assertLessEqual(gap.max(), plain.tail + shifted.tail)

    def test_fractional_torsion_offset_is_exploratory(self):
        series = torsion_series(0.5, N=1000)
        self.assertFalse(series.periodic)
        self.assertTrue(series.metadata()["exploratory"])
        self.assertAlmostEqual(series.constant().real, math.pi**2, places=12)
        self.assertEqual(eval_R(series, 0.0).value, 0)
        self.assertTrue(np.all(np.isfinite(series.evaluate(self.times))))

    def test_truncation_floor(self):
        with self.assertRaises(ValueError):
            RiemannSeries(N=4)

    def test_trajectory_frame(self):
        frame = riemann_trajectory([0.0, math.pi / 2, 2 * math.pi / 3], np.linspace(0, 2 * math.pi, 11), N=200)
        self.assertEqual(list(frame.columns), ["x0", "t", "re_R", "im_R", "tail"])
        self.assertEqual(len(frame), 33)
        self.assertEqual(frame.loc[0, "re_R"], 0.0)


class TestKernel(unittest.TestCase):
    def test_value_at_zero(self):
        self.assertAlmostEqual(complex(F_closed_form(0.0)), F_ZERO, places=13)
        self.assertLess(abs(F_kernel(0.0) - F_ZERO), 1e-7)

    def test_even(self):
        np.testing.assert_allclose(F_closed_form([-2.5, -0.3]), F_closed_form([2.5, 0.3]), atol=1e-15)
        self.assertEqual(F_kernel(-1.7), F_kernel(1.7))

    def test_quadrature_matches_closed_form(self):
        x = np.array([0.5, 1.0, 3.0, 10.0, 40.0])
        np.testing.assert_allclose(F_kernel(x, method="quad"), F_closed_form(x), atol=1e-7)

    def test_inverse_square_decay(self):
        self.assertLessEqual(abs(F_kernel(10.0)), abs(F_kernel(0.0)) / 25)
        far = np.array([100.0, 200.0, 400.0])
        scaled = np.abs(F_kernel(far)) * far**2
        np.testing.assert_allclose(scaled, 4 * math.sqrt(math.pi), rtol=1e-2)

    def test_stable_under_cut_doubling(self):
        for x in (0.0, 2.0):
            self.assertLess(abs(F_kernel(x, xi_cut=100.0) - F_kernel(x, xi_cut=50.0)), 1e-6)

    def test_method_validation(self):
        with self.assertRaises(ValueError):
            F_kernel(1.0, method="series")
        with self.assertRaises(ValueError):
            F_kernel(80.0, method="quad")


class TestNearRational(unittest.TestCase):
    def setUp(self):
        self.series = RiemannSeries(N=10_000)

    def test_scaled_increment_at_zero_tends_to_kernel(self):
        result = near_rational_expansion(self.series, RationalTime(0, 1), 1e-4)
        self.assertAlmostEqual(abs(result.actual) / math.sqrt(result.h), abs(F_ZERO), delta=1e-2)
        self.assertTrue(result.in_window)

    def test_leading_discrepancy_shrinks_faster_than_h(self):
        hs = np.array([1e-2, 4e-3, 1e-3])
        gaps = [near_rational_expansion(self.series, RationalTime(0, 1), h).discrepancy for h in hs]
        slope = np.polyfit(np.log(hs), np.log(gaps), 1)[0]
        self.assertGreaterEqual(slope, 1.0)

    def test_full_expansion_reproduces_increment(self):
        series = RiemannSeries(x0=1.0, N=10_000)
        for h in (1e-5, 1e-6):
            result = near_rational_expansion(series, RationalTime(1, 3), h)
            self.assertLess(result.full_discrepancy, 1e-6)
            self.assertLess(result.discrepancy, 10 * h)

    def test_vanishing_gauss_sum_raises_local_exponent(self):
        hs = np.array([1e-3, 1e-4, 1e-5])
        results = [near_rational_expansion(self.series, RationalTime(1, 2), h) for h in hs]
        self.assertAlmostEqual(abs(results[0].gauss), 0.0, places=12)
        slope = np.polyfit(np.log(hs), np.log([abs(r.actual) for r in results]), 1)[0]
        self.assertGreater(slope, 0.75)

    def test_window_and_contract(self):
        self.assertFalse(near_rational_expansion(RiemannSeries(N=200), RationalTime(1, 3), 0.5).in_window)
        with self.assertRaises(ValueError):
            near_rational_expansion(self.series, RationalTime(1, 3), 0.0)
        with self.assertRaises(ValueError):
            near_rational_expansion(torsion_series(1, N=200), RationalTime(1, 3), 1e-3)


class TestFlatness(unittest.TestCase):
    def test_single_frequency(self):
        result = flatness(RiemannSeries(N=10), 99)
        self.assertEqual(result.modes, 1)
        self.assertAlmostEqual(result.value, 1.0, places=12)

    def test_parseval_consistency(self):
        result = flatness(RiemannSeries(N=2000), 64)
        self.assertLess(result.parseval_defect, 1e-6)

    def test_mode_cut_is_recorded(self):
        self.assertEqual(flatness(RiemannSeries(N=2000), 64).mode_cut, 160)
        self.assertEqual(flatness(RiemannSeries(N=10), 99).mode_cut, 10)
        frame = flatness_scan(RiemannSeries(N=2000), cuts=(16, 64))
        self.assertEqual(frame["mode_cut"].tolist(), [80, 160])

    def test_increasing_at_rational_location(self):
        frame = flatness_scan(RiemannSeries(N=2000))
        self.assertTrue(np.all(np.diff(frame["flatness"]) > 0))
        self.assertFalse(frame["exploratory"].any())

    def test_irrational_location_is_labeled(self):
        self.assertTrue(flatness(RiemannSeries(x0=1.0, N=500), 16).exploratory)

    def test_contract(self):
        with self.assertRaises(ValueError):
            flatness(RiemannSeries(N=100), 1)
        with self.assertRaises(ValueError):
            flatness(torsion_series(0.5, N=100), 16)


class TestDyadicBlocks(unittest.TestCase):
    def test_l2_matches_parseval(self):
        x0 = 0.7
        j = np.arange(32, 64)
        parseval = math.sqrt(np.sum((2 * np.cos(j * x0)) ** 2))
        self.assertAlmostEqual(dyadic_block_lp(RiemannSeries(x0=x0, N=100), 5, 2), parseval, delta=1e-6)

    def test_single_term_block(self):
        series = RiemannSeries(x0=0.7, N=50)
        for p in (1, 3, 8):
            self.assertAlmostEqual(dyadic_block_lp(series, 0, p), abs(2 * math.cos(0.7)), places=10)

    def test_exponents_nondecreasing_in_p(self):
        frame = structure_exponents(RiemannSeries(N=1000), blocks=range(4, 8))
        self.assertTrue(np.all(np.diff(frame["eta_hat"]) >= -1e-9))
        row = frame.set_index("p").loc[2]
        self.assertAlmostEqual(row["eta_hat"], 1.5, delta=0.1)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 for the full block range")
    def test_exponents_full_range(self):
        frame = structure_exponents(RiemannSeries(N=2000))
        self.assertTrue(np.all(np.diff(frame["eta_hat"]) >= -1e-9))

    def test_contract(self):
        series = RiemannSeries(N=100)
        with self.assertRaises(ValueError):
            dyadic_block_lp(series, 3, 0.5)
        with self.assertRaises(ValueError):
            dyadic_block_lp(series, 7, 2)


class TestHolder(unittest.TestCase):
    def setUp(self):
        self.series = RiemannSeries(N=10_000)

    def test_exponent_at_zero(self):
        estimate = holder_estimate(self.series, 0.0)
        self.assertAlmostEqual(estimate.alpha, 0.5, delta=0.05)
        self.assertGreaterEqual(estimate.r_squared, 0.9)
        self.assertEqual(estimate.mu, float("inf"))
        self.assertEqual(estimate.predicted_alpha, 0.5)

    def test_invariant_under_period_shift(self):
        here = holder_estimate(self.series, 1.0)
        shifted = holder_estimate(self.series, 1.0 + 2 * math.pi)
        self.assertAlmostEqual(here.alpha, shifted.alpha, places=6)

    def test_scales_must_span_three_decades(self):
        with self.assertRaises(ValueError):
            holder_estimate(self.series, 0.0, scales=np.logspace(-5, -3, 9))

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 for the Holder panel")
    def test_exponent_at_golden_time(self):
        estimate = holder_estimate(self.series, GOLDEN_TIME)
        self.assertAlmostEqual(estimate.alpha, 0.75, delta=0.07)
        self.assertGreaterEqual(estimate.r_squared, 0.9)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 for the Holder panel")
    def test_spectrum_panel_slope(self):
        panel = spectrum_panel(self.series)
        self.assertAlmostEqual(panel.slope, 1.0, delta=0.15)


if __name__ == "__main__":
    unittest.main()
