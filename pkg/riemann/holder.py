"""
Local Holder exponents of R from oscillations over shrinking windows, and
their comparison with the irrationality exponent of t/(2*pi).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.stats import linregress

from seqcore import continued_fraction, liouville_time
from .base import HolderEstimate
from .series import RiemannSeries

logger = logging.getLogger(__name__)

# Probes drawn per scale, on top of the two endpoints.
PROBES_PER_SCALE = 64

DEFAULT_SCALES = np.logspace(-6, -3, 13)

# Minimum span of the scale range, in decades.
MIN_DECADES = 3.0

POOR_FIT_R2 = 0.9

CF_DEPTH = 40

PANEL_MUS = (2.0, 2.5, 3.0, 3.5, 4.0)

GOLDEN_TIME = math.pi * (1.0 + math.sqrt(5.0))


def holder_estimate(series: RiemannSeries, t, scales=DEFAULT_SCALES, probes=PROBES_PER_SCALE, seed=0):
    """
    Fit the local Holder exponent of R at t.

    For each delta the oscillation max_{|h| <= delta} |R(t+h) - R(t)| is taken
    over `probes` seeded uniform offsets plus h = +delta and h = -delta; the
    exponent is the slope of log oscillation against log delta.

    Args:
        series (RiemannSeries): Series to probe
        t (float): Base time
        scales (array-like): Window half-widths, spanning at least three decades
        probes (int): Random offsets per scale
        seed (int): Seed of the offset generator

    Returns:
        HolderEstimate: flags `clipped` and `poor_fit` record soft failures
    """
    scales = np.sort(np.asarray(scales, dtype=float))
    if scales[0] <= 0:
        raise ValueError(f"Scales must be positive, got min {scales[0]}")
    decades = math.log10(scales[-1] / scales[0])
    if decades < MIN_DECADES:
        raise ValueError(f"Scales must span at least {MIN_DECADES} decades, got {decades:.2f}")

    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-1.0, 1.0, size=(scales.size, probes))
    offsets = np.concatenate([offsets, np.ones((scales.size, 1)), -np.ones((scales.size, 1))], axis=1)
    offsets *= scales[:, None]

    base = series.evaluate(np.array([t]))[0]
    values = series.evaluate(t + offsets)
    oscillation = np.max(np.abs(values - base), axis=1)

    fit = linregress(np.log(scales), np.log(oscillation))
    alpha = float(np.clip(fit.slope, 0.0, 2.0))
    r_squared = float(fit.rvalue**2)
    flags = {"clipped": alpha != fit.slope, "poor_fit": r_squared < POOR_FIT_R2}
    if flags["poor_fit"]:
        logger.warning(f"⚠️ Poor Holder fit at t={t}: R^2={r_squared:.3f}")

    expansion = continued_fraction(float(t) / (2.0 * math.pi), CF_DEPTH)
    if expansion.terminated and expansion.convergents[-1][1] <= 1.0 / math.sqrt(scales[-1]):
        mu = float("inf")
    else:
        mu = expansion.exponent_estimate(scales[0] / (2.0 * math.pi), scales[-1] / (2.0 * math.pi))
    estimate = HolderEstimate(
        t=float(t), scales=scales, oscillation=oscillation, alpha=alpha, r_squared=r_squared, mu=mu, flags=flags,
    )
    logger.debug(f"Holder estimate at t={t}: alpha={alpha:.4f}, R^2={r_squared:.4f}, mu={mu}")
    return estimate


@dataclass
class SpectrumPanel:
    """Holder estimates over times of prescribed irrationality exponent, with the (1/(2mu), alpha - 1/2) fit."""

    estimates: list
    slope: float
    intercept: float
    r_squared: float
    flags: dict = field(default_factory=dict)

    def to_frame(self):
        return pd.DataFrame([
            {
                "t": e.t,
                "mu": e.mu,
                "inverse_mu": 0.5 / e.mu,
                "alpha": e.alpha,
                "predicted_alpha": e.predicted_alpha,
                "r_squared": e.r_squared,
                "poor_fit": e.flags.get("poor_fit", False),
            }
            for e in self.estimates
        ])

    def metadata(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points": len(self.estimates),
            "flags": dict(self.flags),
        }


def panel_times(mus=PANEL_MUS):
    """Times 2*pi*t_mu built from continued fractions with prescribed exponent."""
    return [2.0 * math.pi * liouville_time(mu)[0] for mu in mus]


def spectrum_panel(series: RiemannSeries, mus=PANEL_MUS, scales=DEFAULT_SCALES, map_fn=map, seed=0):
    """
    Regress alpha - 1/2 on 1/(2*mu) over a panel of constructed times.

    Args:
        series (RiemannSeries): Series to probe
        mus (iterable): Target irrationality exponents, each >= 2
        scales (array-like): Window half-widths shared by every estimate
        map_fn (callable): map-like callable, e.g. a worker pool's map
        seed (int): Seed shared by every estimate

    Returns:
        SpectrumPanel
    """
    times = panel_times(mus)
    logger.info(f"🚀 Holder panel over {len(times)} times")
    estimates = list(map_fn(_PanelTask(series, scales, seed), times))
    usable = [e for e in estimates if math.isfinite(e.mu)]
    if len(usable) < 2:
        raise ValueError(f"Need at least two times with a finite exponent estimate, got {len(usable)}")
    fit = linregress([0.5 / e.mu for e in usable], [e.alpha - 0.5 for e in usable])
    panel = SpectrumPanel(
        estimates=estimates,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        flags={"poor_fit": any(e.flags["poor_fit"] for e in estimates)},
    )
    logger.info(f"✅ Holder panel slope {panel.slope:.3f} (R^2={panel.r_squared:.3f})")
    return panel


@dataclass(frozen=True)
class _PanelTask:
    # picklable callable for process pools
    series: RiemannSeries
    scales: np.ndarray
    seed: int

    def __call__(self, t):
        return holder_estimate(self.series, t, scales=self.scales, seed=self.seed)
