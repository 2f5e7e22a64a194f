import logging
import math
from dataclasses import dataclass

import numpy as np

from seqcore import ComplexSeq, RationalTime, weighted_norm
from .base import NLS_COUPLING, SmallnessError, SupportViolation
from .evolve import DEFAULT_TOL, anchor_state, evolve_coeffs
from .field import superpose

logger = logging.getLogger(__name__)

# Anchor at this fraction of the target Talbot time.
ANCHOR_FRACTION = 0.1

# Upper bound on eps^2 * sqrt(q) * log(q) for the small-data regime.
SMALLNESS_BOUND = 0.5

# Largest |u0_hat| outside B(0, eta*pi/p), relative to its peak, still read as
# supported; a band-limited bump leaks its truncated tail there.
SUPPORT_RTOL = 0.05
SUPPORT_SAMPLES = 4096


@dataclass
class NonlinearTalbotResult:
    """
    |u(t_pq, x)| on a grid together with the off-lattice maximum.

    Off-lattice points are those with d(x, Z/q) > eta/q.
    """

    rt: RationalTime
    x: np.ndarray
    modulus: np.ndarray
    off_lattice: np.ndarray
    epsilon: float
    eta: float
    linear: bool
    t_anchor: float = None
    support_leak: float = 0.0

    @property
    def off_lattice_max(self):
        if not np.any(self.off_lattice):
            return 0.0
        return float(np.max(self.modulus[self.off_lattice]))

    def metadata(self):
        return {
            "p": self.rt.p,
            "q": self.rt.q,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "linear": self.linear,
            "t0": self.t_anchor,
            "off_lattice_max": self.off_lattice_max,
            "support_leak": self.support_leak,
        }


def lattice_distance(x, q):
    """d(x, Z/q) = |x - round(q*x)/q|."""
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.round(q * x) / q)


def check_smallness(epsilon, q):
    """Raise SmallnessError unless eps^2 * sqrt(q) * log(q) < 1/2."""
    measure = epsilon**2 * math.sqrt(q) * math.log(q) if q > 1 else 0.0
    if measure >= SMALLNESS_BOUND:
        raise SmallnessError(
            f"eps^2*sqrt(q)*log(q) = {measure:.4g} violates the bound {SMALLNESS_BOUND} "
            f"(eps={epsilon:.4g}, q={q})"
        )
    return measure


def check_support(alpha: ComplexSeq, radius, rtol=SUPPORT_RTOL, n_samples=SUPPORT_SAMPLES):
    """
    Check that sum_k alpha_k exp(-i*k*xi) is supported mod 2*pi in B(0, radius).

    Returns:
        float: Largest |u0_hat| outside the ball relative to its peak

    Raises:
        SupportViolation: If that ratio exceeds rtol
    """
    n_samples = max(n_samples, 8 * (alpha.K + 1))
    xi = -np.pi + 2.0 * np.pi * np.arange(n_samples) / n_samples
    values = np.abs(np.exp(-1j * np.multiply.outer(xi, alpha.indices)) @ alpha.values)
    peak = float(values.max(initial=0.0))
    if peak == 0.0:
        return 0.0
    leak = float(np.max(values[np.abs(xi) > radius], initial=0.0)) / peak
    if leak > rtol:
        raise SupportViolation(
            f"Fourier profile reaches {leak:.3g} of its peak outside B(0, {radius:.4g}) mod 2*pi"
        )
    return leak


def nonlinear_talbot_profile(alpha: ComplexSeq, rt: RationalTime, x=None, s=1.0, eta=0.45,
                             t_anchor=None, linear=False, coupling=NLS_COUPLING, tol=DEFAULT_TOL):
    """
    Evolve small Dirac-comb data to the Talbot time t_pq = p/(2*pi*q) and measure |u|.

    Args:
        alpha (ComplexSeq): Data coefficients; eps is their l^{2,s} norm
        rt (RationalTime): Target rational time
        x (array-like, optional): Evaluation grid, defaults to [-1, 1]
        s (float): Weight index of the smallness norm
        eta (float): Support fraction of the Fourier profile, in (0, 1)
        t_anchor (float, optional): Anchor time, defaults to t_pq / 10
        linear (bool): Switch the nonlinearity off (A_k = alpha_k for all t)
        coupling (float): Coupling c0
        tol (float): Integrator tolerance

    Returns:
        NonlinearTalbotResult

    Raises:
        SmallnessError: If the data are not small enough for q
        SupportViolation: If the Fourier profile of alpha leaves B(0, eta*pi/p) mod 2*pi
    """
    if not 0 < eta < 1:
        raise ValueError(f"Support fraction eta must lie in (0, 1), got {eta}")
    if rt.p == 0:
        raise ValueError("Talbot time needs p >= 1")
    x = np.linspace(-1.0, 1.0, 1201) if x is None else np.asarray(x, dtype=float)
    epsilon = weighted_norm(alpha, s)
    t_pq = rt.t
    off_lattice = lattice_distance(x, rt.q) > eta / rt.q
    if not linear:
        check_smallness(epsilon, rt.q)
    leak = check_support(alpha, eta * math.pi / rt.p)

    if linear:
        values = alpha.values
        t_anchor = None
    else:
        t_anchor = t_pq * ANCHOR_FRACTION if t_anchor is None else t_anchor
        logger.info(f"🔄 Nonlinear Talbot run p/q={rt}, eps={epsilon:.3g}, t0={t_anchor:.3g}")
        start = anchor_state(alpha, t_anchor, coupling=coupling)
        trajectory = evolve_coeffs(start, t_anchor, t_pq, tol=tol, save_times=[t_pq], coupling=coupling)
        values = trajectory.values[-1]

    modulus = np.abs(superpose(t_pq, values, x))
    result = NonlinearTalbotResult(
        rt=rt, x=x, modulus=modulus, off_lattice=off_lattice, epsilon=epsilon,
        eta=eta, linear=linear, t_anchor=t_anchor, support_leak=leak,
    )
    logger.info(f"✅ Talbot profile p/q={rt}: off-lattice max {result.off_lattice_max:.3e}")
    return result
