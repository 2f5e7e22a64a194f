import math
from dataclasses import dataclass, field

import numpy as np


class RiemannError(Exception):
    """Base error of the Riemann-function analysis."""


class QuadratureError(RiemannError):
    """A kernel or Lp quadrature did not reach its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class RiemannValue:
    """A truncated series value with its certified tail bound."""

    t: float
    value: complex
    tail: float

    def as_row(self):
        return {"t": self.t, "re_R": self.value.real, "im_R": self.value.imag, "tail": self.tail}


@dataclass
class NearRationalResult:
    """
    R(2*pi*p/q + h) - R(2*pi*p/q) against the Gauss-sum expansion.

    `leading` keeps the single m nearest q*x0/(2*pi); `full` sums the
    neighbouring m as well. Both include the -i*h term.
    """

    p: int
    q: int
    h: float
    actual: complex
    leading: complex
    full: complex
    gauss: complex
    in_window: bool = True

    @property
    def discrepancy(self):
        return abs(self.actual - self.leading)

    @property
    def full_discrepancy(self):
        return abs(self.actual - self.full)

    def as_row(self):
        return {
            "p": self.p,
            "q": self.q,
            "h": self.h,
            "re_actual": self.actual.real,
            "im_actual": self.actual.imag,
            "re_leading": self.leading.real,
            "im_leading": self.leading.imag,
            "discrepancy": self.discrepancy,
            "full_discrepancy": self.full_discrepancy,
            "in_window": self.in_window,
        }


@dataclass
class HolderEstimate:
    """
    Local Holder exponent from the oscillation of R over shrinking windows.

    Attributes:
        t (float): Base time
        scales (np.ndarray): Window half-widths delta
        oscillation (np.ndarray): max |R(t+h) - R(t)| over the probes of each window
        alpha (float): Fitted slope of log oscillation against log delta, clipped to [0, 2]
        r_squared (float): Fit quality, always reported
        mu (float): Irrationality exponent estimate of t/(2*pi); inf for rationals of small height
    """

    t: float
    scales: np.ndarray
    oscillation: np.ndarray
    alpha: float
    r_squared: float
    mu: float
    flags: dict = field(default_factory=dict)

    @property
    def delta_min(self):
        return float(self.scales.min())

    @property
    def delta_max(self):
        return float(self.scales.max())

    @property
    def predicted_alpha(self):
        """1/2 + 1/(2*mu)."""
        if math.isnan(self.mu):
            return float("nan")
        return 0.5 + 0.5 / self.mu

    def metadata(self):
        return {
            "t": self.t,
            "delta_min": self.delta_min,
            "delta_max": self.delta_max,
            "alpha": self.alpha,
            "r_squared": self.r_squared,
            "mu": self.mu,
            "flags": dict(self.flags),
        }


@dataclass
class FlatnessResult:
    """High-pass flatness ||P_N R||_4^4 / ||P_N R||_2^4 with both L2 routes."""

    N: int
    value: float
    l2_parseval: float
    l2_quadrature: float
    l4: float
    modes: int
    grid: int
    exploratory: bool = False
    mode_cut: int = None

    def __float__(self):
        return float(self.value)

    @property
    def parseval_defect(self):
        return abs(self.l2_parseval - self.l2_quadrature)

    def as_row(self):
        return {
            "N": self.N,
            "flatness": self.value,
            "l2_parseval": self.l2_parseval,
            "l2_quadrature": self.l2_quadrature,
            "l4": self.l4,
            "modes": self.modes,
            "grid": self.grid,
            "exploratory": self.exploratory,
            "mode_cut": self.mode_cut,
        }
