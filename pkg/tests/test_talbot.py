import math
import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from seqcore import ComplexSeq, RationalTime, gauss_sum
from talbot import (
    BumpProfile,
    CoefficientProfile,
    SupportError,
    concentration_family,
    concentration_scan,
    dirac_comb_evolution,
    free_evolution_direct,
    gaussian_truncation,
    linear_talbot_eval,
    poisson_identity_check,
    support_mask,
    talbot_carpet,
)

TALBOT_TIMES = [RationalTime(1, 3), RationalTime(1, 5), RationalTime(3, 5), RationalTime(1, 7)]


def talbot_bump(rt, eta=0.45):
    return BumpProfile(radius=eta * math.pi / rt.p)


class TestDiracComb(unittest.TestCase):
    def test_identity_at_time_zero(self):
        comb = dirac_comb_evolution(RationalTime(0, 1))
        self.assertEqual(comb.atoms(range(-1, 2)), [(-1.0, 1 + 0j), (0.0, 1 + 0j), (1.0, 1 + 0j)])

    def test_half_period_drops_one_atom(self):
        comb = dirac_comb_evolution(RationalTime(1, 2))
        np.testing.assert_allclose(comb.weights, [0.0, 1.0], atol=1e-14)

    def test_odd_q_has_equal_moduli(self):
        comb = dirac_comb_evolution(RationalTime(1, 3))
        np.testing.assert_allclose(np.abs(comb.weights), 1 / math.sqrt(3), atol=1e-14)

    def test_weights_match_direct_gauss_sums(self):
        for p, q in [(1, 4), (3, 8), (5, 9), (2, 11)]:
            comb = dirac_comb_evolution(RationalTime(p, q))
            expected = [gauss_sum(-p, m, q) / q for m in range(q)]
            np.testing.assert_allclose(comb.weights, expected, atol=1e-12)

    def test_plancherel_per_cell(self):
        for q in range(1, 100):
            for p in {1, max(1, q - 1), (q // 2) | 1}:
                if math.gcd(p, q) != 1:
                    continue
                comb = dirac_comb_evolution(RationalTime(p, q))
                self.assertAlmostEqual(comb.cell_mass(), 1.0, places=10)
                self.assertAlmostEqual(comb.mean_mass(), 1.0 / q, places=12)

    def test_frame_columns(self):
        frame = dirac_comb_evolution(RationalTime(2, 5)).to_frame()
        self.assertEqual(list(frame.columns), ["location", "re_weight", "im_weight", "abs_weight"])
        self.assertEqual(len(frame), 5)


class TestBumpProfile(unittest.TestCase):
    def test_peak_and_support(self):
        profile = BumpProfile(radius=0.5)
        self.assertEqual(profile(0.0), 1.0)
        self.assertEqual(profile(0.5), 0.0)
        self.assertEqual(profile(2 * math.pi), 1.0)
        self.assertEqual(profile.validate_support(), 0.0)

    def test_coefficients_are_real_and_even(self):
        alpha = BumpProfile(radius=1.0).coefficients(40)
        np.testing.assert_allclose(alpha.values.imag, 0.0, atol=1e-13)
        np.testing.assert_allclose(alpha.values, alpha.values[::-1], atol=1e-13)
        self.assertAlmostEqual(alpha[0].real, BumpProfile(radius=1.0).mass(), places=12)

    def test_tail_rule(self):
        profile = BumpProfile(radius=1.0)
        alpha = profile.coefficients(tail_tol=1e-9)
        self.assertLess(profile.tail_bound(alpha.K), 1e-9)
        self.assertGreaterEqual(profile.tail_bound(alpha.K - 1), 1e-9)

    def test_coefficients_resynthesize_profile(self):
        profile = BumpProfile(radius=1.2)
        alpha = profile.coefficients()
        xi = np.linspace(-math.pi, math.pi, 101)
        np.testing.assert_allclose(CoefficientProfile(alpha)(xi), profile(xi), atol=1e-9)

    def test_declared_radius_too_small(self):
        profile = CoefficientProfile(ComplexSeq.from_dict({0: 1.0, 1: 0.5}), radius=0.3)
        with self.assertRaises(SupportError):
            profile.validate_support()


class TestLinearTalbot(unittest.TestCase):
    def setUp(self):
        self.x = np.random.default_rng(7).uniform(-1.0, 1.0, 200)

    def test_closed_form_matches_direct_summation(self):
        for rt in TALBOT_TIMES:
            profile = talbot_bump(rt)
            alpha = profile.coefficients()
            closed = linear_talbot_eval(profile, rt, self.x)
            direct = free_evolution_direct(alpha, rt.t, self.x)
            self.assertLess(np.max(np.abs(closed - direct)), 1e-8, str(rt))

    def test_modulus_is_periodic(self):
        for rt in TALBOT_TIMES:
            profile = talbot_bump(rt)
            here = np.abs(linear_talbot_eval(profile, rt, self.x))
            shifted = np.abs(linear_talbot_eval(profile, rt, self.x + 1.0 / rt.q))
            np.testing.assert_allclose(shifted, here, atol=1e-12)

    def test_vanishes_off_support(self):
        for rt in TALBOT_TIMES:
            profile = talbot_bump(rt)
            mask = support_mask(profile, rt, self.x)
            self.assertTrue(mask.any())
            values = linear_talbot_eval(profile, rt, self.x)
            self.assertLess(np.max(np.abs(values[mask])), 1e-10)

    def test_modulus_on_support(self):
        for rt in TALBOT_TIMES:
            profile = talbot_bump(rt)
            xi = (math.pi / rt.p) * (rt.q * self.x - np.round(rt.q * self.x))
            expected = math.sqrt(math.pi * rt.q) / rt.p * np.abs(profile(xi))
            np.testing.assert_allclose(np.abs(linear_talbot_eval(profile, rt, self.x)), expected, atol=1e-12)

    def test_contract_violations(self):
        with self.assertRaises(ValueError):
            linear_talbot_eval(BumpProfile(radius=0.5), RationalTime(1, 4), self.x)
        with self.assertRaises(SupportError):
            linear_talbot_eval(BumpProfile(radius=1.2), RationalTime(3, 5), self.x)

    def test_cell_masses_follow_atom_weights(self):
        rt = RationalTime(1, 4)
        alpha = BumpProfile(radius=0.45 * math.pi).coefficients()
        x = (np.arange(4000) + 0.5) / 4000
        density = np.abs(free_evolution_direct(alpha, rt.t, x)) ** 2
        cells = np.round(rt.q * x).astype(int) % rt.q
        shares = np.array([density[cells == m].sum() for m in range(rt.q)]) / density.sum()
        weights = dirac_comb_evolution(rt).weights
        np.testing.assert_allclose(shares, np.abs(weights) ** 2, atol=1e-6)


class TestFreeEvolution(unittest.TestCase):
    def test_single_mode_has_flat_modulus(self):
        x = np.linspace(-3, 3, 31)
        u = free_evolution_direct(ComplexSeq.from_dict({0: 0.8 - 0.6j}), 0.25, x)
        np.testing.assert_allclose(np.abs(u), 2.0, atol=1e-14)

    def test_linear_in_coefficients(self):
        x = np.linspace(-2, 2, 17)
        a = ComplexSeq.from_dict({-1: 1.0, 2: 0.5j})
        b = ComplexSeq.from_dict({0: -0.3, 1: 2.0})
        combined = free_evolution_direct(a.scale(2.0) + b, 0.4, x)
        separate = 2.0 * free_evolution_direct(a, 0.4, x) + free_evolution_direct(b, 0.4, x)
        np.testing.assert_allclose(combined, separate, atol=1e-13)

    def test_rejects_nonpositive_time(self):
        with self.assertRaises(ValueError):
            free_evolution_direct(ComplexSeq.zeros(1), 0.0, [0.0])

    def test_carpet_export(self):
        alpha = BumpProfile(radius=0.4).coefficients(30)
        times = [RationalTime(1, 3), RationalTime(2, 5)]
        carpet = talbot_carpet(alpha, times, np.linspace(0, 1, 11))
        with tempfile.TemporaryDirectory() as tmp:
            frame = pd.read_csv(carpet.save(os.path.join(tmp, "carpet.csv")))
        self.assertEqual(frame.columns[0], "p/q")
        self.assertEqual(list(frame["p/q"]), ["1/3", "2/5"])
        self.assertEqual(frame.shape, (2, 12))


class TestConcentration(unittest.TestCase):
    def test_ratio_grows_linearly(self):
        rt = RationalTime(1, 3)
        frame = concentration_scan([8, 16, 32, 64], rt)
        for doubling in frame["doubling"].iloc[:3]:
            self.assertGreaterEqual(doubling, 1.9)
            self.assertLessEqual(doubling, 2.1)
        self.assertTrue(np.isnan(frame["doubling"].iloc[3]))

    def test_numerator_and_denominator(self):
        rt = RationalTime(1, 5)
        small, large = concentration_family(8, rt), concentration_family(16, rt)
        self.assertAlmostEqual(small.numerator / small.predicted, 1.0, places=6)
        self.assertAlmostEqual(small.predicted, math.sqrt(5 * math.pi) * 8, places=10)
        self.assertAlmostEqual(large.denominator / small.denominator, 1.0, places=8)

    def test_scale_must_exceed_p(self):
        with self.assertRaises(ValueError):
            concentration_family(2, RationalTime(3, 5))


class TestPoissonIdentity(unittest.TestCase):
    def test_residual_at_reference_times(self):
        for t in (0.3, 0.7, 1.3):
            check = poisson_identity_check(t)
            self.assertLess(check.residual, 1e-6, t)

    def test_agreement_along_a_grid(self):
        for t in np.linspace(0.21, 1.57, 9):
            self.assertLess(poisson_identity_check(t).residual, 1e-6)

    def test_truncation_bounds_tail(self):
        N = gaussian_truncation(0.01, 1e-10)
        n = np.arange(N + 1, N + 2000)
        self.assertLess(2 * np.sum(np.exp(-0.01 * n * n)), 1e-10)
        self.assertLess(gaussian_truncation(0.1), N)


if __name__ == "__main__":
    unittest.main()
