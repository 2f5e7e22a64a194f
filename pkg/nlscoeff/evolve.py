"""
Time integration of the coefficient system in log-time with modulated unknowns.

With tau = log t the system reads dA/dtau = i*c0*bracket(A; w(tau)). The
leading log-phase of each mode is factored out,

    B_k = A_k * exp(-i*phi_k),   phi_k = c0*(2M - |a_k|^2)*(tau - tau_start),

where a_k are the coefficients at the start of the integration, so a single
mode is integrated as a constant and the integrator only resolves the slow
remainder plus the nonresonant oscillations.
"""

import json
import logging
import os

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from seqcore import ComplexSeq
from .base import NLS_COUPLING, CoeffState, IntegrationError
from .system import nonlinear_bracket

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MASS_DRIFT_WARN = 1e-8


def _direct_weight(tau):
    return 0.25 * np.exp(-tau)


def _dual_weight(tau):
    return -0.25 * np.exp(tau)


class _ModulatedSystem:
    """Right-hand side in (tau, B) variables plus the map back to A."""

    def __init__(self, a_start, tau_start, coupling, weight):
        self.tau_start = tau_start
        self.coupling = coupling
        self.weight = weight
        mass = float(np.sum(np.abs(a_start) ** 2))
        self.rate = coupling * (2.0 * mass - np.abs(a_start) ** 2)

    def phase(self, tau):
        return np.exp(1j * np.multiply.outer(self.rate, np.asarray(tau) - self.tau_start))

    def __call__(self, tau, y):
        rot = np.exp(1j * self.rate * (tau - self.tau_start))
        bracket = nonlinear_bracket(y * rot, self.weight(tau))
        return np.conj(rot) * (1j * self.coupling * bracket) - 1j * self.rate * y

    def unwrap(self, tau, y):
        """A = B * exp(i*phi); y has shape (modes,) or (modes, len(tau))."""
        return y * self.phase(tau)


def _solve(system, y0, tau_span, tol, t_eval=None, dense_output=False):
    scale = max(float(np.max(np.abs(y0))) if y0.size else 0.0, 1e-12)
    sol = solve_ivp(
        system,
        tau_span,
        np.asarray(y0, dtype=complex),
        method="DOP853",
        t_eval=t_eval,
        dense_output=dense_output,
        rtol=tol,
        atol=tol * scale,
    )
    if sol.status != 0:
        t_fail = float(np.exp(sol.t[-1])) if sol.t.size else float(np.exp(tau_span[0]))
        raise IntegrationError(f"Coefficient integration failed: {sol.message}", t=t_fail)
    return sol


def anchor_state(alpha: ComplexSeq, t0: float, coupling: float = NLS_COUPLING) -> CoeffState:
    """
    Leading-order coefficients at a small anchor time t0.

    A_k(t0) = exp(i*c0*(2M - |alpha_k|^2)*log t0) * alpha_k; the remainder term is dropped.
    """
    if not t0 > 0:
        raise ValueError(f"Anchor time must be positive, got {t0}")
    values = np.asarray(alpha.values)
    mass = alpha.mass()
    phase = np.exp(1j * coupling * (2.0 * mass - np.abs(values) ** 2) * np.log(t0))
    return CoeffState(float(t0), ComplexSeq(alpha.K, values * phase))


class CoeffTrajectory:
    """
    Coefficients saved at a list of times, with the run metadata.

    Dumps as CSV (one row per time: t, re_A<k>, im_A<k> for every k, mass) plus a
    JSON sidecar holding K, c0, tol and the anchor time.
    """

    def __init__(self, times, values, coupling=NLS_COUPLING, tol=DEFAULT_TOL, t_anchor=None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.atleast_2d(np.asarray(values, dtype=complex))
        if self.values.shape[0] != self.times.size:
            raise ValueError(
                f"Got {self.values.shape[0]} coefficient rows for {self.times.size} times"
            )
        self.coupling = coupling
        self.tol = tol
        self.t_anchor = t_anchor

    @property
    def K(self):
        return (self.values.shape[1] - 1) // 2

    def __len__(self):
        return self.times.size

    def __getitem__(self, i):
        return CoeffState.from_values(self.times[i], self.values[i])

    def states(self):
        return [self[i] for i in range(len(self))]

    def masses(self):
        return np.sum(np.abs(self.values) ** 2, axis=1)

    def mass_drift(self):
        """Largest relative deviation of the mass from its first saved value."""
        masses = self.masses()
        if masses[0] == 0:
            return float(np.max(masses))
        return float(np.max(np.abs(masses - masses[0])) / masses[0])

    def weighted_norms(self, s):
        weights = (1.0 + np.arange(-self.K, self.K + 1, dtype=float) ** 2) ** s
        return np.sqrt(np.sum(weights[None, :] * np.abs(self.values) ** 2, axis=1))

    def metadata(self):
        return {
            "K": self.K,
            "c0": self.coupling,
            "t0": self.t_anchor,
            "tol": self.tol,
            "times": len(self),
        }

    def to_frame(self):
        data = {"t": self.times}
        for pos, k in enumerate(range(-self.K, self.K + 1)):
            data[f"re_A{k}"] = self.values[:, pos].real
            data[f"im_A{k}"] = self.values[:, pos].imag
        data["mass"] = self.masses()
        return pd.DataFrame(data)

    def save(self, path):
        """
        Write the CSV dump and its JSON sidecar.

        Args:
            path (str): CSV path; the sidecar gets the same stem with .json

        Returns:
            tuple: (csv_path, json_path)
        """
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        sidecar = os.path.splitext(path)[0] + ".json"
        with open(sidecar, "w", encoding="utf-8") as f:
            json.dump(self.metadata(), f, indent=2)
        logger.info(f"💾 Saved coefficient trajectory: {path}")
        return path, sidecar

    @classmethod
    def load(cls, path):
        frame = pd.read_csv(path)
        sidecar = os.path.splitext(path)[0] + ".json"
        meta = {}
        if os.path.exists(sidecar):
            with open(sidecar, encoding="utf-8") as f:
                meta = json.load(f)
        K = (len(frame.columns) - 2) // 4
        values = np.stack(
            [frame[f"re_A{k}"].to_numpy() + 1j * frame[f"im_A{k}"].to_numpy() for k in range(-K, K + 1)],
            axis=1,
        )
        return cls(
            frame["t"].to_numpy(),
            values,
            coupling=meta.get("c0", NLS_COUPLING),
            tol=meta.get("tol", DEFAULT_TOL),
            t_anchor=meta.get("t0"),
        )


def _check_mass(trajectory):
    drift = trajectory.mass_drift()
    if drift > MASS_DRIFT_WARN:
        logger.warning(f"⚠️ Mass drift {drift:.3e} exceeds {MASS_DRIFT_WARN:.0e}")
    return drift


def _evolve(start, t_end, tol, save_times, n_save, coupling, weight):
    t_start = start.t
    if not t_end > 0:
        raise ValueError(f"End time must be positive, got {t_end}")
    if save_times is None:
        save_times = np.geomspace(t_start, t_end, n_save)
    save_times = np.asarray(save_times, dtype=float)
    lo, hi = sorted((t_start, t_end))
    if np.any((save_times < lo * (1 - 1e-12)) | (save_times > hi * (1 + 1e-12))):
        raise ValueError(f"Save times must lie between {t_start} and {t_end}")

    tau_start, tau_end = np.log(t_start), np.log(t_end)
    tau_eval = np.clip(np.log(save_times), min(tau_start, tau_end), max(tau_start, tau_end))
    y0 = np.array(start.values, dtype=complex)
    system = _ModulatedSystem(y0, tau_start, coupling, weight)

    if tau_start == tau_end:
        values = np.repeat(y0[None, :], save_times.size, axis=0)
    else:
        sol = _solve(system, y0, (tau_start, tau_end), tol, t_eval=tau_eval)
        values = system.unwrap(sol.t, sol.y).T
    trajectory = CoeffTrajectory(save_times, values, coupling=coupling, tol=tol)
    drift = _check_mass(trajectory)
    logger.debug(f"Integrated {start.K * 2 + 1} modes {t_start:.3g} -> {t_end:.3g}, mass drift {drift:.2e}")
    return trajectory


def evolve_coeffs(alpha, t_start, t_end, tol=DEFAULT_TOL, save_times=None, n_save=33,
                  coupling=NLS_COUPLING):
    """
    Integrate the coefficient system between two positive times.

    Args:
        alpha (ComplexSeq or CoeffState): Coefficients at t_start
        t_start (float): Initial time (> 0)
        t_end (float): Final time (> 0), before or after t_start
        tol (float): Local error tolerance per step
        save_times (array-like, optional): Output times between t_start and t_end
        n_save (int): Number of log-spaced output times when save_times is omitted
        coupling (float): Coupling c0

    Returns:
        CoeffTrajectory: The saved states

    Raises:
        IntegrationError: If the step size underflows
    """
    if isinstance(alpha, CoeffState):
        start = alpha
        t_start = alpha.t
    else:
        if not t_start > 0:
            raise ValueError(f"Start time must be positive, got {t_start}")
        start = CoeffState(float(t_start), alpha)
    return _evolve(start, t_end, tol, save_times, n_save, coupling, _direct_weight)


def evolve_dual(beta, s_start, s_end, tol=DEFAULT_TOL, save_times=None, n_save=33,
                coupling=NLS_COUPLING):
    """Integrate the pseudo-conformal dual system dB/ds = i*c0/s * bracket(B; -s/4)."""
    start = beta if isinstance(beta, CoeffState) else CoeffState(float(s_start), beta)
    return _evolve(start, s_end, tol, save_times, n_save, coupling, _dual_weight)


class CoefficientIntegrator:
    """
    Forward integrator with chunked dense output.

    The log-time axis is cut into chunks of length `chunk_tau`; only the dense
    interpolant of the current chunk is kept, so arbitrarily many coefficient
    queries at increasing times use bounded memory.
    """

    CHUNK_TAU = 0.5

    def __init__(self, start: CoeffState, coupling=NLS_COUPLING, tol=DEFAULT_TOL, chunk_tau=None):
        self.start = start
        self.coupling = coupling
        self.tol = tol
        self.chunk_tau = chunk_tau or self.CHUNK_TAU
        self.tau_start = float(np.log(start.t))
        self.y_start = np.array(start.values, dtype=complex)
        self.system = _ModulatedSystem(self.y_start, self.tau_start, coupling, _direct_weight)
        self._reset()

    @property
    def K(self):
        return self.start.K

    def _reset(self):
        self._chunk_start = self.tau_start
        self._chunk_end = self.tau_start
        self._chunk_y = self.y_start
        self._dense = None

    def _advance(self):
        a = self._chunk_end
        b = a + self.chunk_tau
        sol = _solve(self.system, self._chunk_y, (a, b), self.tol, dense_output=True)
        self._chunk_start, self._chunk_end = a, b
        self._chunk_y = sol.y[:, -1]
        self._dense = sol.sol

    def coefficients(self, t):
        """
        Coefficients A_k at the requested times.

        Args:
            t (float or array-like): Times >= the start time

        Returns:
            np.ndarray: Shape (len(t), 2K+1)
        """
        times = np.atleast_1d(np.asarray(t, dtype=float))
        tau = np.log(times)
        if np.any(tau < self.tau_start - 1e-12):
            raise ValueError(f"Requested time {times.min():.6g} precedes the start {self.start.t:.6g}")
        tau = np.maximum(tau, self.tau_start)
        order = np.argsort(tau, kind="stable")
        sorted_tau = tau[order]
        out = np.empty((times.size, self.y_start.size), dtype=complex)

        i = 0
        while i < sorted_tau.size:
            current = sorted_tau[i]
            if current == self.tau_start:
                out[order[i]] = self.y_start
                i += 1
                continue
            if current < self._chunk_start:
                self._reset()
            while current > self._chunk_end:
                self._advance()
            j = int(np.searchsorted(sorted_tau, self._chunk_end, side="right"))
            block = sorted_tau[i:j]
            y = self._dense(block).reshape(self.y_start.size, -1)
            out[order[i:j]] = self.system.unwrap(block, y).T
            i = j
        return out

    def state(self, t):
        return CoeffState.from_values(t, self.coefficients(t)[0])

    def trajectory(self, times):
        values = self.coefficients(times)
        trajectory = CoeffTrajectory(times, values, coupling=self.coupling, tol=self.tol,
                                     t_anchor=self.start.t)
        _check_mass(trajectory)
        return trajectory
