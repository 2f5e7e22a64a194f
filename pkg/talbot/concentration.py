"""Concentration of linear evolutions at a Talbot time: u0_hat = lam * psi(lam * xi)."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from seqcore import RationalTime
from .base import FFT_SAMPLES, TAIL_TOL, BumpProfile, PeriodicFourierProfile
from .comb import free_evolution_direct

logger = logging.getLogger(__name__)

# FFT samples per unit of lam/radius, keeps the narrow bump resolved.
SAMPLES_PER_SCALE = 1000


@dataclass
class ConcentrationResult:
    """
    |exp(it Lap) u0^lam (0)| against the evolved zero mode |alpha_0^lam| / sqrt(t).

    `predicted` is the closed-form numerator sqrt(pi*q)/p * lam * psi(0).
    """

    lam: float
    rt: RationalTime
    numerator: float
    denominator: float
    predicted: float
    K: int

    @property
    def ratio(self):
        return self.numerator / self.denominator

    def as_row(self):
        return {
            "lambda": self.lam,
            "p": self.rt.p,
            "q": self.rt.q,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "predicted": self.predicted,
            "ratio": self.ratio,
            "K": self.K,
        }


def concentration_family(lam, rt: RationalTime, psi: PeriodicFourierProfile = None, tail_tol=TAIL_TOL):
    """
    Evaluate the concentration ratio for f^lam(xi) = lam * psi(lam * xi).

    Both the numerator and the denominator are computed by direct summation
    over the coefficients of f^lam, truncated by the tail rule.

    Args:
        lam (float): Concentration scale, > p
        rt (RationalTime): Talbot time, p >= 1
        psi (BumpProfile, optional): Base bump, unit radius by default
        tail_tol (float): Coefficient tail bound

    Returns:
        ConcentrationResult
    """
    if rt.p == 0:
        raise ValueError("Concentration needs p >= 1")
    if not lam > rt.p:
        raise ValueError(f"Concentration scale must exceed p={rt.p}, got lambda={lam}")
    psi = BumpProfile() if psi is None else psi
    profile = psi.scaled(lam)
    n_samples = max(FFT_SAMPLES, 1 << math.ceil(math.log2(SAMPLES_PER_SCALE * lam / psi.radius)))
    alpha = profile.coefficients(tail_tol=tail_tol, n_samples=n_samples)

    t = rt.t
    numerator = float(np.abs(free_evolution_direct(alpha, t, 0.0)))
    denominator = abs(alpha[0]) / math.sqrt(t)
    predicted = math.sqrt(math.pi * rt.q) / rt.p * abs(profile(0.0))
    result = ConcentrationResult(
        lam=float(lam), rt=rt, numerator=numerator, denominator=denominator, predicted=predicted, K=alpha.K,
    )
    logger.debug(f"Concentration lambda={lam}, p/q={rt}: ratio {result.ratio:.6g} (K={alpha.K})")
    return result


def concentration_scan(lams, rt: RationalTime, psi: PeriodicFourierProfile = None, tail_tol=TAIL_TOL):
    """
    Concentration ratios over a list of scales, plus ratio(2*lam)/ratio(lam) where both are present.

    Returns:
        pd.DataFrame: One row per lam, `doubling` is NaN when 2*lam is not in the list
    """
    results = {float(lam): concentration_family(lam, rt, psi=psi, tail_tol=tail_tol) for lam in lams}
    frame = pd.DataFrame([result.as_row() for result in results.values()])
    frame["doubling"] = [
        results[2 * lam].ratio / result.ratio if 2 * lam in results else np.nan
        for lam, result in results.items()
    ]
    logger.info(f"✅ Concentration scan p/q={rt}: {len(results)} scales")
    return frame
