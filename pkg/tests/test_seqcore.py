import math
import unittest
from fractions import Fraction

import numpy as np

from seqcore import (
    ComplexSeq,
    RationalTime,
    continued_fraction,
    gauss_sum,
    gauss_sum_table,
    liouville_time,
    weighted_norm,
)


class TestComplexSeq(unittest.TestCase):
    def test_values_outside_band_are_zero(self):
        seq = ComplexSeq.from_dict({-2: 1.0, 1: 2j})
        self.assertEqual(seq.K, 2)
        self.assertEqual(seq[5], 0j)
        self.assertEqual(seq[1], 2j)
        np.testing.assert_array_equal(seq.take([-3, -2, 3]), [0, 1, 0])

    def test_frozen_values(self):
        seq = ComplexSeq.from_dict({0: 1.0})
        with self.assertRaises(ValueError):
            seq.values[0] = 3.0

    def test_reversed_and_band_padding(self):
        seq = ComplexSeq.from_dict({-1: 1.0, 2: 3.0})
        rev = seq.reversed()
        self.assertEqual(rev[1], 1.0)
        self.assertEqual(rev[-2], 3.0)
        padded = seq.with_band(5)
        self.assertEqual(padded.K, 5)
        self.assertEqual(padded[2], 3.0)
        with self.assertRaises(ValueError):
            seq.with_band(1)


class TestWeightedNorm(unittest.TestCase):
    def test_zero_sequence(self):
        self.assertEqual(weighted_norm(ComplexSeq.zeros(4), 2.5), 0.0)

    def test_single_mode_at_origin(self):
        self.assertAlmostEqual(weighted_norm(ComplexSeq.from_dict({0: 1.0}), 3), 1.0, places=15)

    def test_three_ones(self):
        seq = ComplexSeq.from_dict({-1: 1.0, 0: 1.0, 1: 1.0})
        self.assertAlmostEqual(weighted_norm(seq, 1), math.sqrt(5.0), places=14)

    def test_s_zero_is_mass(self):
        rng = np.random.default_rng(3)
        seq = ComplexSeq.from_array(rng.normal(size=9) + 1j * rng.normal(size=9))
        self.assertAlmostEqual(weighted_norm(seq, 0) ** 2, seq.mass(), places=12)

    def test_negative_s_rejected(self):
        with self.assertRaises(ValueError):
            weighted_norm(ComplexSeq.zeros(1), -0.5)


class TestGaussSum(unittest.TestCase):
    def test_trivial_values(self):
        self.assertAlmostEqual(gauss_sum(7, 3, 1), 1.0)
        self.assertAlmostEqual(abs(gauss_sum(0, 0, 12) - 12), 0.0, places=12)

    def test_three_term_oracle(self):
        direct = sum(np.exp(2j * np.pi * l * l / 3) for l in range(3))
        self.assertAlmostEqual(abs(gauss_sum(1, 0, 3)), math.sqrt(3), places=12)
        self.assertAlmostEqual(abs(gauss_sum(1, 0, 3) - direct), 0.0, places=12)

    def test_size_law_for_odd_moduli(self):
        worst = 0.0
        for q in range(1, 100, 2):
            for p in range(q):
                if math.gcd(p, q) != 1:
                    continue
                table = gauss_sum_table(-p, q)
                worst = max(worst, float(np.max(np.abs(np.abs(table) - math.sqrt(q)))))
        self.assertLess(worst, 1e-9)

    def test_table_matches_direct_sum(self):
        table = gauss_sum_table(-3, 10)
        for m in range(10):
            self.assertAlmostEqual(abs(table[m] - gauss_sum(-3, m, 10)), 0.0, places=10)

    def test_cap_enforced(self):
        with self.assertRaises(ValueError):
            gauss_sum(1, 0, 0)
        with self.assertRaises(ValueError):
            gauss_sum(1, 0, 10**5)


class TestRationalTime(unittest.TestCase):
    def test_clocks(self):
        rt = RationalTime(1, 3)
        self.assertAlmostEqual(rt.t, 1 / (6 * math.pi))
        self.assertAlmostEqual(rt.period_time, 2 * math.pi / 3)

    def test_validation(self):
        with self.assertRaises(ValueError):
            RationalTime(2, 4)
        with self.assertRaises(ValueError):
            RationalTime(1, 0)

    def test_from_fraction(self):
        rt = RationalTime.from_fraction(Fraction(6, 10))
        self.assertEqual((rt.p, rt.q), (3, 5))


class TestContinuedFraction(unittest.TestCase):
    def test_one_third_terminates(self):
        cf = continued_fraction(1 / 3, depth=10)
        self.assertEqual(cf.partial_quotients, (0, 3))
        self.assertTrue(cf.terminated)

    def test_golden_ratio_gives_fibonacci_ratios(self):
        phi = (1 + math.sqrt(5)) / 2
        cf = continued_fraction(phi, depth=20)
        fib = [1, 1]
        while len(fib) < 25:
            fib.append(fib[-1] + fib[-2])
        for n, (p, q) in enumerate(cf.convergents):
            self.assertEqual((p, q), (fib[n + 1], fib[n]))
            self.assertLess(abs(phi - p / q), 1.0 / q**2)

    def test_sqrt2_quotients(self):
        cf = continued_fraction(math.sqrt(2), depth=15)
        self.assertEqual(cf.partial_quotients, (1,) + (2,) * 14)
        for p, q in cf.convergents:
            self.assertLess(abs(math.sqrt(2) - p / q), 1.0 / q**2)

    def test_convergents_lowest_terms_and_alternating(self):
        cf = continued_fraction(math.pi, depth=10)
        signs = []
        for (p, q), (_, q_next) in zip(cf.convergents, cf.convergents[1:]):
            self.assertEqual(math.gcd(p, q), 1)
            self.assertLess(q, q_next)
            err = cf.surrogate - Fraction(p, q)
            self.assertLessEqual(abs(err), Fraction(1, q * q_next))
            signs.append(err > 0)
        self.assertTrue(all(a != b for a, b in zip(signs, signs[1:])))

    def test_rejects_bad_input(self):
        with self.assertRaises(ValueError):
            continued_fraction(float("nan"), 5)
        with self.assertRaises(ValueError):
            continued_fraction(0.5, 0)

    def test_liouville_construction_reaches_target_exponent(self):
        t, cf = liouville_time(3.0, q_max=10**6)
        mus = [
            mu for mu, (_, q) in zip(cf.exponents, cf.convergents)
            if 10 < q < 10**5 and math.isfinite(mu)
        ]
        self.assertTrue(mus)
        self.assertGreater(max(mus), 2.6)


if __name__ == "__main__":
    unittest.main()
