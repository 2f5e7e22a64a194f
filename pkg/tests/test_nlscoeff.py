import json
import math
import os
import tempfile
import unittest

import numpy as np

from nlscoeff import (
    CoefficientIntegrator,
    CoeffState,
    CoeffTrajectory,
    SmallnessError,
    SupportViolation,
    anchor_state,
    check_support,
    evaluate_u,
    evolve_coeffs,
    evolve_dual,
    nonlinear_talbot_profile,
    pseudo_conformal,
    resonant_partition,
    system_rhs,
    system_rhs_direct,
)
from seqcore import ComplexSeq, RationalTime, weighted_norm
from talbot import BumpProfile

SLOW = os.getenv("BINORMAL_SLOW_TESTS") == "1"


def random_seq(K, amplitude, seed):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
    return ComplexSeq(K, amplitude * values / np.max(np.abs(values)))


def scaled_bump(K, epsilon, eta=0.45, p=1):
    alpha = BumpProfile(radius=eta * math.pi / p).coefficients(K)
    return alpha.scale(epsilon / weighted_norm(alpha, 1.0))


class TestResonantPartition(unittest.TestCase):
    def test_single_index_band(self):
        resonant, nonresonant = resonant_partition(0, [0])
        self.assertEqual(resonant, [(0, 0, 0)])
        self.assertEqual(nonresonant, [])

    def test_partition_matches_brute_force(self):
        band = [-1, 0, 1]
        resonant, nonresonant = resonant_partition(0, band)
        expected_res, expected_nr = set(), set()
        for j1 in band:
            for j2 in band:
                for j3 in band:
                    if 0 - j1 + j2 - j3 != 0:
                        continue
                    omega = 0 - j1**2 + j2**2 - j3**2
                    (expected_res if omega == 0 else expected_nr).add((j1, j2, j3))
        self.assertIn((1, 1, 0), set(resonant))
        self.assertEqual(set(resonant), expected_res)
        self.assertEqual({tri.as_tuple() for tri in nonresonant}, expected_nr)

    def test_trivial_triples_are_resonant(self):
        K = 4
        for k in range(-K, K + 1):
            resonant, _ = resonant_partition(k, K)
            for j in range(-K, K + 1):
                self.assertIn((k, j, j), resonant)
                self.assertIn((j, j, k), resonant)

    def test_phase_factorization(self):
        for K in range(1, 9):
            for k in range(-K, K + 1):
                resonant, nonresonant = resonant_partition(k, K)
                for tri in nonresonant:
                    self.assertNotEqual(tri.omega, 0)
                    self.assertEqual(tri.omega, 2 * (tri.k - tri.j1) * (tri.j1 - tri.j2))
                    self.assertEqual(tri.omega, 2 * tri.m)
                for j1, j2, j3 in resonant:
                    self.assertTrue(j1 == k or j1 == j2)


class TestSystemRhs(unittest.TestCase):
    def test_single_mode(self):
        alpha = 0.7 - 0.2j
        state = CoeffState(0.4, ComplexSeq.from_dict({0: alpha}, K=3))
        rhs = system_rhs(state)
        self.assertAlmostEqual(abs(rhs[0] - 0.5j * abs(alpha) ** 2 * alpha / 0.4), 0.0, places=13)
        for k in (-3, -1, 1, 2):
            self.assertAlmostEqual(abs(rhs[k]), 0.0, places=14)

    def test_quarter_coupling_magnitude(self):
        state = CoeffState(2.0, ComplexSeq.from_dict({0: 1.5}))
        rhs = system_rhs(state, coupling=0.25)
        self.assertAlmostEqual(abs(rhs[0]), 1.5**3 / (4 * 2.0), places=13)

    def test_zero_state(self):
        rhs = system_rhs(CoeffState(1.0, ComplexSeq.zeros(5)))
        np.testing.assert_array_equal(rhs.values, np.zeros(11))

    def test_rejects_nonpositive_time(self):
        with self.assertRaises(ValueError):
            CoeffState(0.0, ComplexSeq.zeros(1))

    def test_two_symmetric_modes_against_direct_sum(self):
        alpha = 0.3 + 0.4j
        state = CoeffState(0.15, ComplexSeq.from_dict({-1: alpha, 1: alpha}, K=1))
        fast, direct = system_rhs(state), system_rhs_direct(state)
        self.assertGreater(abs(direct[0]), 0.0)
        np.testing.assert_allclose(fast.values, direct.values, rtol=0, atol=1e-12)

    def test_factorized_bracket_matches_direct_sum(self):
        for K, t, seed in [(2, 0.05, 1), (4, 0.3, 2), (6, 1.7, 3)]:
            state = CoeffState(t, random_seq(K, 1.0, seed))
            np.testing.assert_allclose(
                system_rhs(state).values, system_rhs_direct(state).values, rtol=0, atol=1e-10
            )


class TestEvolveCoeffs(unittest.TestCase):
    def test_single_mode_closed_form(self):
        alpha = ComplexSeq.from_dict({0: 1.0}, K=2)
        traj = evolve_coeffs(alpha, 1.0, 0.1, tol=1e-11)
        closed = np.exp(0.5j * np.log(traj.times))
        np.testing.assert_allclose(traj.values[:, 2], closed, rtol=0, atol=1e-8)
        np.testing.assert_allclose(np.delete(traj.values, 2, axis=1), 0.0, atol=1e-14)

    def test_zero_data_stays_zero(self):
        traj = evolve_coeffs(ComplexSeq.zeros(3), 0.5, 2.0)
        np.testing.assert_array_equal(traj.values, np.zeros_like(traj.values))

    def test_mass_conservation(self):
        alpha = random_seq(6, 0.3, seed=11)
        traj = evolve_coeffs(alpha, 1.0, 0.05, tol=1e-11)
        self.assertLess(traj.mass_drift(), 1e-8)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 to run")
    def test_mass_conservation_wide_band(self):
        alpha = random_seq(32, 0.05, seed=5)
        traj = evolve_coeffs(alpha, 1.0, 1e-2, tol=1e-11, n_save=9)
        self.assertLess(traj.mass_drift(), 1e-8)

    def test_gauge_covariance(self):
        alpha = random_seq(3, 0.5, seed=7)
        theta = 0.83
        base = evolve_coeffs(alpha, 1.0, 0.2, tol=1e-11)
        rotated = evolve_coeffs(alpha.scale(np.exp(1j * theta)), 1.0, 0.2, tol=1e-11)
        np.testing.assert_allclose(rotated.values, base.values * np.exp(1j * theta), atol=1e-9)

    def test_weighted_norm_stays_bounded(self):
        alpha = random_seq(4, 0.4, seed=9)
        traj = evolve_coeffs(alpha, 0.01, 1.0, tol=1e-10)
        norms = traj.weighted_norms(1.0)
        self.assertLess(np.max(norms) / norms[0], 2.0)
        self.assertGreater(np.min(norms) / norms[0], 0.5)

    def test_anchor_phase(self):
        alpha = ComplexSeq.from_dict({0: 1.0, 1: 0.5})
        state = anchor_state(alpha, 1e-3)
        expected = np.exp(0.5j * (2 * 1.25 - 1.0) * np.log(1e-3))
        self.assertAlmostEqual(abs(state.A[0] - expected), 0.0, places=13)
        self.assertAlmostEqual(state.M, alpha.mass(), places=13)

    def test_integrator_matches_direct_run(self):
        start = anchor_state(random_seq(3, 0.4, seed=4), 0.05)
        times = np.array([0.9, 0.1, 0.05, 0.4, 2.0])
        integrator = CoefficientIntegrator(start, tol=1e-11, chunk_tau=0.7)
        chunked = integrator.coefficients(times)
        for t, row in zip(times, chunked):
            reference = evolve_coeffs(start, start.t, t, tol=1e-11, save_times=[t]).values[-1]
            np.testing.assert_allclose(row, reference, atol=1e-8)

    def test_trajectory_dump(self):
        traj = evolve_coeffs(ComplexSeq.from_dict({-1: 0.2, 1: 0.1j}), 0.5, 1.0, n_save=4)
        with tempfile.TemporaryDirectory() as tmp:
            csv_path, json_path = traj.save(os.path.join(tmp, "coeffs.csv"))
            with open(json_path) as f:
                meta = json.load(f)
            loaded = CoeffTrajectory.load(csv_path)
        self.assertEqual(meta["K"], 1)
        self.assertIn("tol", meta)
        self.assertEqual(loaded.values.shape, (4, 3))
        np.testing.assert_array_equal(loaded.values, traj.values)


class TestEvaluateU(unittest.TestCase):
    def test_zero_coefficients(self):
        u = evaluate_u(CoeffState(0.3, ComplexSeq.zeros(2)), np.linspace(-3, 3, 7))
        np.testing.assert_array_equal(u, np.zeros(7))

    def test_single_mode_modulus(self):
        state = CoeffState(0.25, ComplexSeq.from_dict({0: 0.8}))
        x = np.linspace(-5, 5, 41)
        np.testing.assert_allclose(np.abs(evaluate_u(state, x)), 0.8 / 0.5, rtol=1e-14)

    def test_two_symmetric_modes_against_direct_sum(self):
        state = CoeffState(0.3, ComplexSeq.from_dict({-2: 1.0, 2: 1.0}))
        x = np.random.default_rng(0).uniform(-4, 4, 25)
        direct = sum(np.exp(1j * (x - k) ** 2 / 1.2) for k in (-2, 2)) / np.sqrt(0.3)
        np.testing.assert_allclose(evaluate_u(state, x), direct, atol=1e-12)
        self.assertAlmostEqual(abs(evaluate_u(state, np.array([0.0]))[0]), 2 / np.sqrt(0.3), places=12)

    def test_derivative_matches_finite_difference(self):
        state = CoeffState(0.7, random_seq(2, 1.0, seed=2))
        x, h = np.array([-0.4, 0.3, 1.9]), 1e-5
        _, ux = evaluate_u(state, x, derivative=True)
        fd = (evaluate_u(state, x + h) - evaluate_u(state, x - h)) / (2 * h)
        np.testing.assert_allclose(ux, fd, atol=1e-6)


class TestPseudoConformal(unittest.TestCase):
    def test_involution_and_mass(self):
        state = CoeffState(0.37, random_seq(3, 1.0, seed=8))
        dual = pseudo_conformal(state)
        self.assertAlmostEqual(dual.t, 1 / 0.37)
        self.assertAlmostEqual(dual.M, state.M, places=13)
        back = pseudo_conformal(dual)
        self.assertAlmostEqual(back.t, state.t, places=15)
        np.testing.assert_array_equal(back.values, state.values)

    def test_dual_system_oracle(self):
        alpha = random_seq(2, 0.5, seed=21)
        times = np.array([1.0, 0.7, 0.4, 0.25])
        direct = evolve_coeffs(alpha, 1.0, 0.25, tol=1e-12, save_times=times)
        dual = evolve_dual(alpha.conjugate(), 1.0, 4.0, tol=1e-12, save_times=1 / times)
        np.testing.assert_allclose(dual.values, np.conj(direct.values), atol=1e-7)


class TestNonlinearTalbot(unittest.TestCase):
    def test_zero_data(self):
        result = nonlinear_talbot_profile(ComplexSeq.zeros(4), RationalTime(1, 3))
        self.assertEqual(result.off_lattice_max, 0.0)
        np.testing.assert_array_equal(result.modulus, np.zeros_like(result.modulus))

    def test_linear_surrogate_vanishes_off_lattice(self):
        alpha = scaled_bump(60, 0.05)
        result = nonlinear_talbot_profile(alpha, RationalTime(1, 3), linear=True)
        self.assertLess(result.off_lattice_max, 1e-3 * np.max(result.modulus))

    def test_smallness_violation_reported(self):
        alpha = scaled_bump(8, 1.0)
        with self.assertRaises(SmallnessError):
            nonlinear_talbot_profile(alpha, RationalTime(1, 5))

    def test_data_outside_support_rejected(self):
        alpha = ComplexSeq.from_dict({3: 0.01}, K=3)
        with self.assertRaises(SupportViolation):
            nonlinear_talbot_profile(alpha, RationalTime(1, 3))
        with self.assertRaises(SupportViolation):
            nonlinear_talbot_profile(alpha, RationalTime(1, 3), linear=True)

    def test_support_radius_follows_p(self):
        alpha = scaled_bump(24, 0.05)
        self.assertLess(check_support(alpha, 0.45 * math.pi), 0.05)
        with self.assertRaises(SupportViolation):
            check_support(alpha, 0.45 * math.pi / 2)
        self.assertEqual(check_support(ComplexSeq.zeros(4), 0.1), 0.0)

    @unittest.skipUnless(SLOW, "set BINORMAL_SLOW_TESTS=1 to run")
    def test_small_data_off_lattice_bound(self):
        epsilon = 0.05
        for q in (3, 5, 7):
            with self.subTest(q=q):
                result = nonlinear_talbot_profile(scaled_bump(24, epsilon), RationalTime(1, q), tol=1e-9)
                self.assertLessEqual(result.off_lattice_max, 2 * epsilon)
                self.assertLess(result.support_leak, 0.05)


if __name__ == "__main__":
    unittest.main()
