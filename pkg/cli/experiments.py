"""
One Experiment per subcommand. Each reads its keys from the RunConfig, writes
tables through the RunReporter and records the checks that decide the exit status.
"""

import logging
import math

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from hasimoto import FilamentEvolution, PolygonSpec, SmokeRing, Soliton, corner_spec, filament_function
from nlscoeff import evolve_coeffs, nonlinear_talbot_profile
from polyflow import (
    corner_vs_riemann,
    energy_density,
    polygon_trace_angles,
    simulate_polygon,
    tangent_fourier_growth,
    trace_convergence,
)
from reports import PlotHelper
from riemann import (
    RiemannSeries,
    eval_R,
    flatness_scan,
    holder_estimate,
    riemann_trajectory,
    spectrum_panel,
    structure_exponents,
)
from selfsim import calibrate_angle_law, integrate_profile
from selfsim.profile import default_half_length
from seqcore import ComplexSeq, RationalTime, gauss_sum_table, weighted_norm
from talbot import (
    BumpProfile,
    concentration_scan,
    dirac_comb_evolution,
    free_evolution_direct,
    linear_talbot_eval,
    poisson_identity_check,
    support_mask,
    talbot_carpet,
)

from .base import Experiment

logger = logging.getLogger(__name__)

FRAME_TOL = 1e-8
ANGLE_TOL = 1e-2
TRACE_EXPONENT = 0.5
TRACE_EXPONENT_TOL = 0.1
ANGLE_LAW_R2 = 0.999
ANGLE_LAW_STABILITY = 0.01
TALBOT_CLOSED_TOL = 1e-8
OFF_SUPPORT_TOL = 1e-10
DOUBLING_RANGE = (1.9, 2.1)
POISSON_TOL = 1e-6
SOLITON_MODULUS_TOL = 5e-3
ENERGY_RTOL = 0.02
GROWTH_R2 = 0.9


def _bump(config):
    return BumpProfile(radius=config.eta * math.pi / config.p)


class SelfSimExperiment(Experiment):
    """Self-similar profile for one parameter, or the angle-law calibration."""

    name = "selfsim"

    def execute(self):
        config = self.config
        if config.mode == "profile":
            profile = integrate_profile(config.a, S=config.s_factor * default_half_length(config.a))
            self.reporter._save_csv(profile.to_frame(), "selfsim_profile.csv")
            self.reporter._save_json(profile.metadata(), "selfsim.json")
            self.check("tangent_saturation", profile.saturated, f"(oscillation {profile.oscillation:.3g})")
            if config.plots:
                fig, axes = plt.subplots(1, 2, figsize=(14, 6))
                PlotHelper.create_path(axes[0], profile.G[:, 1] + 1j * profile.G[:, 2],
                                       f"Profile G (a={config.a}), normal plane")
                PlotHelper.create_lines(axes[1], profile.s, {f"T{i + 1}": profile.T[:, i] for i in range(3)},
                                        "Tangent along the profile", "s", "T")
                self.reporter._save_plot("selfsim_profile.png")
            return {"a": profile.a, "theta": profile.theta, "c_star": profile.c_star}

        calibration = calibrate_angle_law(config.a_values, S_factor=config.s_factor, map_fn=self.map_fn)
        doubled = calibrate_angle_law(config.a_values, S_factor=2.0 * config.s_factor, map_fn=self.map_fn)
        self.reporter._save_csv(calibration.to_frame(), "angle_law.csv")
        self.reporter._save_json({"base": calibration.metadata(), "doubled": doubled.metadata()}, "angle_law.json")
        drift = abs(doubled.c_star - calibration.c_star) / abs(calibration.c_star)
        self.check("angle_law_linearity", calibration.r_squared >= ANGLE_LAW_R2, f"(R^2 {calibration.r_squared:.6f})")
        self.check("angle_law_stability", drift < ANGLE_LAW_STABILITY, f"(drift {drift:.2e} under S -> 2S)")
        return {"c_star": calibration.c_star, "r_squared": calibration.r_squared, "c_star_drift": drift}


class SimulateExperiment(Experiment):
    """Polygon evolution with its trace diagnostics, or one corner trajectory against the Riemann reference."""

    name = "simulate"

    def _spec(self):
        config = self.config
        torsions = config.torsions if config.torsions else None
        return PolygonSpec(corners=tuple(int(k) for k in config.corners), angles=config.angles, torsions=torsions)

    def execute(self):
        config = self.config
        if config.mode == "corner":
            trajectory = corner_vs_riemann(
                config.n, nu=config.nu, theta=config.theta, x0=config.x0, T=config.corner_horizon, t0=config.t0,
                n_saved=config.corner_saved, tol=config.tol, coupling=config.nls_coupling,
                step_angle=config.step_angle,
            )
            self.reporter._save_csv(trajectory.to_frame(), "corner_trajectory.csv")
            self.reporter._save_json({**trajectory.metadata, "sup_deviation": trajectory.sup_deviation,
                                      "rotation": trajectory.rotation}, "corner_trajectory.json")
            if config.plots:
                fig, ax = plt.subplots(figsize=(8, 8))
                PlotHelper.create_path(ax, trajectory.rescaled[:, 1] + 1j * trajectory.rescaled[:, 2],
                                       f"Corner path, n={config.n}", label="rescaled corner")
                PlotHelper.create_path(ax, trajectory.reference[:, 1] + 1j * trajectory.reference[:, 2],
                                       f"Corner path, n={config.n}", label="Riemann reference")
                self.reporter._save_plot("corner_trajectory.png")
            return {"n": config.n, "sup_deviation": trajectory.sup_deviation}

        spec = self._spec()
        run = simulate_polygon(
            spec, t0=config.t0, T=config.horizon or None, dx=config.dx, tol=config.tol,
            coupling=config.nls_coupling, step_angle=config.step_angle, map_fn=self.map_fn,
        )
        for path in run.save(self.reporter.path("polygon")):
            self.reporter.add_artifact(path)
        trace = trace_convergence(run)
        self.reporter._save_csv(trace.to_frame(), "trace_convergence.csv")
        angles = polygon_trace_angles(run)
        self.reporter._save_json({str(k): v for k, v in angles.items()}, "trace_angles.json")

        self.check("frame_integrity", run.metadata["orthonormality"] < FRAME_TOL,
                   f"(defect {run.metadata['orthonormality']:.2e})")
        residual = run.residual
        self.reporter._save_csv(residual.to_frame(), "binormal_residual.csv")
        self.check("binormal_residual", np.isfinite([residual.max_chi, residual.max_tangent]).all(),
                   f"(max chi residual {residual.max_chi:.2e}, max T residual {residual.max_tangent:.2e})")
        exponents = np.concatenate([trace.exponent, trace.rate_free_exponent])
        fitted = exponents[np.isfinite(exponents)]
        if fitted.size:
            worst = float(np.max(np.abs(fitted - TRACE_EXPONENT)))
            self.check("trace_rate", worst <= TRACE_EXPONENT_TOL,
                       f"(exponents {np.round(trace.exponent, 3).tolist()}, "
                       f"rate-free {np.round(trace.rate_free_exponent, 3).tolist()})")
        if len(spec.corners) == 1:
            k = spec.corners[0]
            error = abs(angles[k] - spec.angles[0])
            self.check("corner_angle_recovery", error < ANGLE_TOL, f"(error {error:.2e} rad)")
        if config.plots:
            final = run.curve[-1]
            fig, ax = plt.subplots(figsize=(12, 6))
            PlotHelper.create_lines(ax, final.x, {f"chi{i + 1}": final.chi[:, i] for i in range(3)},
                                    f"Curve at t={final.t:g}", "x", "chi")
            self.reporter._save_plot("polygon_curve.png")
        return {"mass_drift": run.metadata["mass_drift"], "orthonormality": run.metadata["orthonormality"],
                "max_trace_deviation": float(trace.max_deviation.max()),
                "residual_chi": residual.max_chi, "residual_tangent": residual.max_tangent}


class TalbotExperiment(Experiment):
    """Linear and nonlinear Talbot scans, carpets, concentration and the Poisson identity."""

    name = "talbot"

    def _grid(self):
        return np.linspace(-1.0, 1.0, self.config.x_points)

    def execute(self):
        handler = getattr(self, f"_{self.config.mode}")
        return handler()

    def _linear(self):
        config = self.config
        rt = RationalTime(config.p, config.q)
        profile = _bump(config)
        x = self._grid()
        closed = linear_talbot_eval(profile, rt, x)
        direct = free_evolution_direct(profile.coefficients(), rt.t, x)
        off_support = support_mask(profile, rt, x)
        self.reporter._save_csv(pd.DataFrame({
            "x": x, "re_u": closed.real, "im_u": closed.imag, "modulus": np.abs(closed),
            "direct_deviation": np.abs(closed - direct), "off_support": off_support,
        }), f"talbot_linear_{rt.p}_{rt.q}.csv")
        self.reporter._save_csv(dirac_comb_evolution(rt).to_frame(), f"dirac_comb_{rt.p}_{rt.q}.csv")
        deviation = float(np.max(np.abs(closed - direct)))
        off_support_max = float(np.max(np.abs(closed[off_support]), initial=0.0))
        self.check("linear_talbot_closed_form", deviation < TALBOT_CLOSED_TOL, f"(max deviation {deviation:.2e})")
        self.check("linear_talbot_off_support", off_support_max < OFF_SUPPORT_TOL, f"(max {off_support_max:.2e})")
        return {"max_deviation": deviation, "off_support_max": off_support_max}

    def _nonlinear(self):
        config = self.config
        rt = RationalTime(config.p, config.q)
        alpha = _bump(config).coefficients(config.coefficients)
        alpha = alpha.scale(config.epsilon / weighted_norm(alpha, 1.0))
        result = nonlinear_talbot_profile(alpha, rt, x=self._grid(), eta=config.eta,
                                          coupling=config.nls_coupling, tol=config.tol)
        self.reporter._save_csv(pd.DataFrame({
            "x": result.x, "modulus": result.modulus, "off_lattice": result.off_lattice,
        }), f"talbot_nonlinear_{rt.p}_{rt.q}.csv")
        self.reporter._save_json(result.metadata(), f"talbot_nonlinear_{rt.p}_{rt.q}.json")
        self.check("nonlinear_talbot_off_lattice", result.off_lattice_max <= 2 * config.epsilon,
                   f"(max {result.off_lattice_max:.3g} vs 2*eps = {2 * config.epsilon:g})")
        return {"off_lattice_max": result.off_lattice_max, "epsilon": config.epsilon}

    def _carpet(self):
        config = self.config
        x = self._grid()
        times = [RationalTime(1, int(q)) for q in config.carpet_q]
        carpet = talbot_carpet(_bump(config).coefficients(), times, x)
        self.reporter._save_csv(carpet.to_frame(), "talbot_carpet.csv")
        if config.plots:
            fig, ax = plt.subplots(figsize=(12, 6))
            PlotHelper.create_carpet(ax, x, [str(rt) for rt in times], carpet.modulus, "|u| at rational times")
            self.reporter._save_plot("talbot_carpet.png")
        return {"rows": len(times), "points": int(x.size)}

    def _concentration(self):
        config = self.config
        frame = concentration_scan(config.lambdas, RationalTime(config.p, config.q))
        self.reporter._save_csv(frame, "concentration.csv")
        doubling = frame["doubling"].dropna()
        low, high = DOUBLING_RANGE
        passed = bool(doubling.size) and bool(doubling.between(low, high).all())
        self.check("concentration_linear", passed, f"(doubling ratios {np.round(doubling, 4).tolist()})")
        return {"max_ratio": float(frame["ratio"].max())}

    def _poisson(self):
        checks = [poisson_identity_check(t) for t in self.config.poisson_times]
        frame = pd.DataFrame([c.metadata() for c in checks]).drop(columns=["lhs", "rhs"])
        self.reporter._save_csv(frame, "poisson_identity.csv")
        worst = float(frame["residual"].max())
        self.check("poisson_identity", worst < POISSON_TOL, f"(max residual {worst:.2e})")
        return {"max_residual": worst}


class RiemannExperiment(Experiment):
    """Trajectories, flatness, Holder exponents and dyadic blocks of the Riemann-type series."""

    name = "riemann"

    def _series(self, N=None):
        config = self.config
        return RiemannSeries(x0=config.x0, omega0=config.omega0, N=N or config.truncation)

    def execute(self):
        handler = getattr(self, f"_{self.config.mode}")
        return handler()

    def _trajectory(self):
        config = self.config
        times = np.linspace(0.0, config.tmax, config.n_times)
        frame = riemann_trajectory([config.x0], times, N=config.truncation, omega0=config.omega0)
        self.reporter._save_csv(frame, "riemann_trajectory.csv")
        origin = eval_R(self._series(), 0.0).value
        self.check("riemann_vanishes_at_zero", origin == 0, f"(R(0) = {origin})")
        if config.plots:
            fig, ax = plt.subplots(figsize=(8, 8))
            PlotHelper.create_path(ax, frame["re_R"] + 1j * frame["im_R"], f"R(t) at x0={config.x0:g}")
            self.reporter._save_plot("riemann_trajectory.png")
        return {"points": int(times.size), "tail": float(frame["tail"].iloc[0])}

    def _flatness(self):
        config = self.config
        frame = flatness_scan(self._series(config.flatness_truncation), cuts=config.flatness_n)
        self.reporter._save_csv(frame, "flatness.csv")
        increasing = bool(np.all(np.diff(frame["flatness"]) > 0))
        if not frame["exploratory"].any():
            self.check("flatness_increasing", increasing, f"(F = {np.round(frame['flatness'], 4).tolist()})")
        if config.plots:
            fig, ax = plt.subplots(figsize=(10, 6))
            PlotHelper.create_lines(ax, frame["N"], {"flatness": frame["flatness"]}, "Flatness of P_N R", "N", "F")
            ax.set_xscale("log")
            self.reporter._save_plot("flatness.png")
        return {"max_flatness": float(frame["flatness"].max()), "increasing": increasing}

    def _holder(self):
        config = self.config
        series = self._series()
        estimate = holder_estimate(series, config.holder_t, seed=config.seed)
        self.reporter._save_csv(pd.DataFrame({"delta": estimate.scales, "oscillation": estimate.oscillation}),
                                "holder_scales.csv")
        self.reporter._save_json(estimate.metadata(), "holder.json")
        self.check("holder_fit", not estimate.flags["poor_fit"], f"(R^2 {estimate.r_squared:.4f})")
        results = {"alpha": estimate.alpha, "mu": estimate.mu}
        if config.holder_panel:
            panel = spectrum_panel(series, map_fn=self.map_fn, seed=config.seed)
            self.reporter._save_csv(panel.to_frame(), "holder_panel.csv")
            self.reporter._save_json(panel.metadata(), "holder_panel.json")
            results["panel_slope"] = panel.slope
            if config.plots:
                frame = panel.to_frame()
                fig, ax = plt.subplots(figsize=(8, 6))
                PlotHelper.create_fit(ax, frame["inverse_mu"], frame["alpha"] - 0.5, panel.slope, panel.intercept,
                                      "Holder exponent against irrationality", "1/(2 mu)", "alpha - 1/2")
                self.reporter._save_plot("holder_panel.png")
        return results

    def _blocks(self):
        config = self.config
        blocks = range(config.blocks_min, config.blocks_max + 1)
        frame = structure_exponents(self._series(), p_values=config.p_values, blocks=blocks)
        self.reporter._save_csv(frame, "structure_exponents.csv")
        monotone = bool(np.all(np.diff(frame["eta_hat"]) >= -1e-9))
        self.check("structure_exponents_monotone", monotone, f"(eta = {np.round(frame['eta_hat'], 3).tolist()})")
        return {"eta_at_2": float(frame.set_index("p")["eta_hat"].get(2.0, np.nan))}


class GrowthExperiment(Experiment):
    """Fourier growth of T_x and the energy density, for two equal corners at -1 and 1."""

    name = "growth"

    def execute(self):
        config = self.config
        spec = corner_spec({-1: config.growth_angle, 1: config.growth_angle})
        results = {}
        if config.mode in ("both", "energy"):
            energy = energy_density(spec, t=config.energy_t, bands=config.bands, L=config.window, t0=None,
                                    tol=config.tol, coupling=config.nls_coupling, step_angle=config.step_angle)
            self.reporter._save_csv(energy.to_frame(), "energy_density.csv")
            self.reporter._save_json(energy.metadata(), "energy_density.json")
            self.check("energy_instantaneous_growth", energy.flags["instantaneous_growth"],
                       f"({energy.closed_form:.6g} < {energy.upper:.6g})")
            if config.energy_t == 0:
                error = float(np.max(np.abs(energy.values / energy.closed_form - 1.0)))
                self.check("energy_closed_form", error < ENERGY_RTOL, f"(max relative error {error:.2e})")
            results.update({"energy_plateau": energy.plateau, "energy_closed_form": energy.closed_form})
        if config.mode in ("both", "fourier"):
            growth = tangent_fourier_growth(
                spec, times=config.growth_times, L=config.window, second_L=config.second_window, t0=None,
                tol=config.tol, coupling=config.nls_coupling, step_angle=config.step_angle, map_fn=self.map_fn,
            )
            self.reporter._save_csv(growth.to_frame(), "fourier_growth.csv")
            self.reporter._save_json(growth.metadata(), "fourier_growth.json")
            self.check("fourier_growth_log_fit", growth.r_squared >= GROWTH_R2, f"(R^2 {growth.r_squared:.4f})")
            self.check("fourier_outside_bounded", not growth.flags["outside_unbounded"],
                       f"(max {growth.outside_values.max():.4g})")
            if config.plots:
                frame = growth.to_frame()
                fig, ax = plt.subplots(figsize=(10, 6))
                PlotHelper.create_fit(ax, frame["log_inverse_t"], frame["sup_window"], growth.slope, growth.intercept,
                                      "Windowed sup of |w_hat| near 1/t", "log(1/t)", "sup |w_hat|")
                self.reporter._save_plot("fourier_growth.png")
            results.update({"growth_slope": growth.slope, "growth_r_squared": growth.r_squared})
        return results


class ValidateExperiment(Experiment):
    """The fast invariant suites, each recorded as one named check."""

    name = "validate"

    def execute(self):
        results = {}
        for suite in self.config.suites:
            logger.info(f"🔄 Validation suite: {suite}")
            passed, detail, value = getattr(self, f"_suite_{suite}")()
            self.check(suite, passed, detail)
            results[suite] = value
        return results

    def _suite_gauss_sum_law(self):
        worst = 0.0
        for q in range(1, 100, 2):
            for p in range(1, q + 1):
                if math.gcd(p, q) == 1:
                    worst = max(worst, float(np.max(np.abs(np.abs(gauss_sum_table(-p, q)) - math.sqrt(q)))))
        return worst < 1e-9, f"(max ||G| - sqrt(q)| = {worst:.2e})", worst

    def _suite_single_mode(self):
        alpha = ComplexSeq.from_dict({0: 1.0}, K=2)
        trajectory = evolve_coeffs(alpha, 1.0, 1e-2, tol=1e-11, coupling=self.config.nls_coupling)
        closed = np.exp(1j * self.config.nls_coupling * np.log(trajectory.times))
        error = float(np.max(np.abs(trajectory.values[:, alpha.K] - closed)))
        return error < 1e-8, f"(max error {error:.2e})", error

    def _suite_mass_conservation(self):
        rng = np.random.default_rng(self.config.seed)
        values = rng.normal(size=17) + 1j * rng.normal(size=17)
        alpha = ComplexSeq(8, 0.1 * values / np.max(np.abs(values)))
        drift = evolve_coeffs(alpha, 1.0, 1e-2, tol=1e-11, n_save=9, coupling=self.config.nls_coupling).mass_drift()
        return drift < 1e-8, f"(relative drift {drift:.2e})", drift

    def _smoke_ring(self):
        x = np.arange(-512, 513) * 2.0**-7
        return x, FilamentEvolution(SmokeRing(), x).run(np.linspace(0.0, 1.0, 5))

    def _suite_frame_integrity(self):
        _, trajectory = self._smoke_ring()
        return trajectory.orthonormality < FRAME_TOL, f"(defect {trajectory.orthonormality:.2e})", \
            trajectory.orthonormality

    def _suite_explicit_solutions(self):
        x, trajectory = self._smoke_ring()
        error = 0.0
        for state in trajectory:
            exact = np.stack([np.sin(x), 1.0 - np.cos(x), np.full_like(x, state.t)], axis=1)
            error = max(error, float(np.max(np.linalg.norm(state.chi - exact, axis=1))))
        x = np.arange(-1024, 1025) * 2.0**-7
        soliton = Soliton(0.5)
        interior = slice(4, -4)
        modulus_error = drift = 0.0
        for state in FilamentEvolution(soliton, x).run([0.0, 0.5, 1.0]):
            u, _ = filament_function(state.chi, x)
            expected = 2.0 / np.cosh(x - 2 * soliton.alpha * state.t)
            modulus_error = max(modulus_error, float(np.max(np.abs(np.abs(u) - expected)[interior])))
            drift = max(drift, abs(x[np.argmax(np.abs(u))] - 2 * soliton.alpha * state.t))
        passed = error < 1e-4 and modulus_error < SOLITON_MODULUS_TOL and drift <= 2 * 2.0**-7
        detail = f"(smoke ring {error:.2e}, soliton modulus {modulus_error:.2e}, peak drift {drift:.2e})"
        return passed, detail, error

    def _suite_straight_line(self):
        run = simulate_polygon(PolygonSpec.straight(), t0=self.config.t0)
        bend = float(np.max(np.abs(run.curve.chi[:, :, 1:])))
        return bend < 1e-12, f"(max transverse displacement {bend:.1e})", bend

    def _suite_linear_talbot(self):
        worst = 0.0
        x = np.random.default_rng(self.config.seed).uniform(-1.0, 1.0, 257)
        for p, q in ((1, 3), (1, 5), (3, 5), (1, 7)):
            rt = RationalTime(p, q)
            profile = BumpProfile(radius=0.45 * math.pi / p)
            closed = linear_talbot_eval(profile, rt, x)
            worst = max(worst, float(np.max(np.abs(closed - free_evolution_direct(profile.coefficients(), rt.t, x)))))
        return worst < TALBOT_CLOSED_TOL, f"(max deviation {worst:.2e})", worst

    def _suite_concentration(self):
        frame = concentration_scan((8.0, 16.0, 32.0), RationalTime(1, 3))
        doubling = frame["doubling"].dropna()
        low, high = DOUBLING_RANGE
        return bool(doubling.between(low, high).all()), f"(doubling {np.round(doubling, 4).tolist()})", \
            float(doubling.mean())

    def _suite_riemann_series(self):
        series = RiemannSeries(N=10_000)
        at_pi = eval_R(series, math.pi)
        gap = abs(at_pi.value + math.pi**2 / 2)
        passed = eval_R(series, 0.0).value == 0 and gap < at_pi.tail
        return passed, f"(|R(pi) + pi^2/2| = {gap:.2e}, tail {at_pi.tail:.1e})", gap

    def _suite_intermittency(self):
        frame = flatness_scan(RiemannSeries(N=2000))
        increasing = bool(np.all(np.diff(frame["flatness"]) > 0))
        return increasing, f"(F = {np.round(frame['flatness'], 4).tolist()})", float(frame["flatness"].iloc[-1])

    def _suite_energy_density(self):
        energy = energy_density(corner_spec({-1: 2.0, 1: 2.0}), bands=[16])
        error = abs(energy.values[0] / energy.closed_form - 1.0)
        passed = error < ENERGY_RTOL and energy.flags["instantaneous_growth"]
        return passed, f"(relative error {error:.2e})", float(error)

    def _suite_poisson_identity(self):
        worst = max(poisson_identity_check(t).residual for t in (0.3, 0.7, 1.3))
        return worst < POISSON_TOL, f"(max residual {worst:.2e})", worst
