"""
Free Schrodinger evolution of periodic Dirac data at rational Talbot times.

At t_pq = p/(2*pi*q) the comb sum_k delta_k becomes (1/q) sum_l sum_m
G(-p, m, q) delta_{l + m/q}; for a profile u0_hat with small support the
evolution of sum_k alpha_k delta_k is a single Gauss-sum-weighted copy of
u0_hat near every point of Z/q.
"""

import logging
import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from nlscoeff import lattice_distance, superpose
from seqcore import ComplexSeq, RationalTime, gauss_sum_table
from .base import PeriodicFourierProfile, SupportError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiracComb:
    """
    The q atoms per unit cell of the evolved comb.

    Attributes:
        rt (RationalTime): Talbot time p/q
        offsets (np.ndarray): m/q for m = 0..q-1
        weights (np.ndarray): G(-p, m, q)/q
    """

    rt: RationalTime
    offsets: np.ndarray
    weights: np.ndarray

    def __iter__(self):
        return iter(zip(self.offsets.tolist(), self.weights.tolist()))

    def __len__(self):
        return self.offsets.size

    def atoms(self, cells=range(1)):
        """(location, weight) pairs over the given integer cells l."""
        return [(l + offset, weight) for l in cells for offset, weight in self]

    def cell_mass(self):
        """sum_m |G(-p, m, q)/q|^2, equal to 1."""
        return float(np.sum(np.abs(self.weights) ** 2))

    def mean_mass(self):
        """Mean |weight|^2 per atom, equal to 1/q."""
        return self.cell_mass() / len(self)

    def to_frame(self):
        return pd.DataFrame({
            "location": self.offsets,
            "re_weight": self.weights.real,
            "im_weight": self.weights.imag,
            "abs_weight": np.abs(self.weights),
        })


def dirac_comb_evolution(rt: RationalTime) -> DiracComb:
    """Atoms (m/q, G(-p, m, q)/q) of exp(i*t_pq*Laplacian) applied to sum_k delta_k."""
    q = rt.q
    weights = gauss_sum_table(-rt.p, q) / q
    return DiracComb(rt=rt, offsets=np.arange(q) / q, weights=weights)


def free_evolution_direct(alpha: ComplexSeq, t, x):
    """sum_k alpha_k exp(i(x-k)^2/(4t)) / sqrt(t) by direct summation."""
    if not t > 0:
        raise ValueError(f"Free evolution needs t > 0, got {t}")
    return superpose(t, alpha.values, x)


def _check_closed_form(profile: PeriodicFourierProfile, rt: RationalTime):
    if rt.p == 0:
        raise ValueError("Talbot closed form needs p >= 1")
    if rt.q % 2 == 0:
        raise ValueError(f"Talbot closed form needs odd q, got q={rt.q}")
    eta = profile.radius * rt.p / math.pi
    if eta >= 1.0:
        raise SupportError(
            f"Support radius {profile.radius:.4g} exceeds pi/p = {math.pi / rt.p:.4g} (eta={eta:.3g})"
        )
    profile.validate_support()
    return eta


def linear_talbot_eval(profile: PeriodicFourierProfile, rt: RationalTime, x):
    """
    Closed-form free evolution of sum_k alpha_k delta_k at t_pq.

    Sums sqrt(pi)*exp(i*pi/4)/p * G(-p, n, q) u0_hat(xi_n) exp(-i*t*xi_n^2 + i*x*xi_n)
    over the 2p integers n with xi_n = (pi/p)(q*x - n) in [-pi, pi). Inside the
    support only n = round(q*x) survives, so |u| = sqrt(pi*q)/p * |u0_hat(xi_x)|.

    Args:
        profile (PeriodicFourierProfile): Profile with radius < pi/p
        rt (RationalTime): Talbot time with odd q
        x (array-like): Evaluation points

    Returns:
        np.ndarray: Complex values, same shape as x

    Raises:
        SupportError: If the support radius is too large for p
        ValueError: For p = 0 or even q
    """
    _check_closed_form(profile, rt)
    p, q, t = rt.p, rt.q, rt.t
    x = np.asarray(x, dtype=float)
    qx = q * x
    n = np.floor(qx - p)[..., None] + 1 + np.arange(2 * p)
    xi = (math.pi / p) * (qx[..., None] - n)
    weights = gauss_sum_table(-p, q)[n.astype(np.int64) % q]
    terms = weights * profile(xi) * np.exp(-1j * t * xi**2 + 1j * x[..., None] * xi)
    return math.sqrt(math.pi) * np.exp(0.25j * math.pi) / p * terms.sum(axis=-1)


def support_mask(profile: PeriodicFourierProfile, rt: RationalTime, x):
    """Points with d(x, Z/q) > eta/q, where the closed form vanishes."""
    eta = profile.radius * rt.p / math.pi
    return lattice_distance(x, rt.q) > eta / rt.q


@dataclass
class TalbotCarpet:
    """|u(t_pq, x)| for a list of rational times on a shared grid."""

    times: list
    x: np.ndarray
    modulus: np.ndarray

    def to_frame(self):
        frame = pd.DataFrame(self.modulus, columns=[f"{value:.10g}" for value in self.x])
        frame.insert(0, "p/q", [str(rt) for rt in self.times])
        return frame

    def save(self, path):
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.info(f"💾 Saved Talbot carpet: {path}")
        return path


def talbot_carpet(alpha: ComplexSeq, times, x):
    """
    Direct-summation moduli at every rational time in `times`.

    Args:
        alpha (ComplexSeq): Data coefficients
        times (list[RationalTime]): Rows, p >= 1
        x (array-like): Grid

    Returns:
        TalbotCarpet
    """
    x = np.asarray(x, dtype=float)
    rows = []
    for rt in times:
        if rt.p == 0:
            raise ValueError("Carpet rows need p >= 1")
        rows.append(np.abs(free_evolution_direct(alpha, rt.t, x)))
    logger.info(f"✅ Talbot carpet: {len(rows)} rows x {x.size} points")
    return TalbotCarpet(times=list(times), x=x, modulus=np.array(rows))
