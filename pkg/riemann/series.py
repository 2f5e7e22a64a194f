"""
Truncated evaluation of R_{x0}(t) = sum_{j != w0} (exp(i*t*(j-w0)^2) - 1)/(j-w0)^2 * exp(i*j*x0).

w0 = 0 gives the generalized Riemann function R_{x0}; x0 = 0 with a torsion
offset w0 gives the Riemann-type function of polygons with equal torsion at
every corner. The t-independent part sum_j exp(i*j*x0)/(j-w0)^2 is summed in
closed form whenever one is available, so the truncation only drops the
oscillating tail, bounded by sum_{|j|>N} 1/(j-w0)^2 <= 2/(N - |w0|).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .base import RiemannValue

logger = logging.getLogger(__name__)

# Default number of modes on each side.
DEFAULT_TRUNCATION = 10_000

# Smallest admissible truncation.
MIN_TRUNCATION = 8

# Times evaluated per block, bounds the (times x modes) work array.
EVAL_CHUNK = 256


def bernoulli_cosine_sum(x0):
    """sum_{j>=1} 2*cos(j*x0)/j^2 = pi^2/3 - pi*y + y^2/2 with y = x0 mod 2*pi."""
    y = float(x0) % (2.0 * math.pi)
    return math.pi**2 / 3.0 - math.pi * y + 0.5 * y * y


@dataclass(frozen=True)
class RiemannSeries:
    """
    Series parameters.

    Attributes:
        x0 (float): Space location in radians
        omega0 (float): Torsion offset, 0 for the plain R_{x0}
        N (int): Modes kept on each side of the center
    """

    x0: float = 0.0
    omega0: float = 0.0
    N: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if self.N < MIN_TRUNCATION:
            raise ValueError(f"Truncation must be at least {MIN_TRUNCATION}, got N={self.N}")
        if abs(self.omega0) >= self.N - 1:
            raise ValueError(f"Torsion offset {self.omega0} must be well inside the band N={self.N}")

    @property
    def integer_offset(self):
        return float(self.omega0).is_integer()

    @property
    def periodic(self):
        """2*pi-periodic in t exactly when the frequencies are integers."""
        return self.integer_offset

    @property
    def exact_constant(self):
        return self.integer_offset or self.x0 == 0.0

    @property
    def tail(self):
        """Certified bound on |R - R_N| at every t."""
        bound = 2.0 / (self.N - abs(self.omega0))
        return bound if self.exact_constant else 2.0 * bound

    def terms(self):
        """
        Frequencies nu_j = (j - w0)^2 and weights exp(i*j*x0)/nu_j of the kept modes.

        For w0 = 0 the +j and -j modes are folded into one term with weight 2*cos(j*x0)/j^2.
        """
        if self.omega0 == 0.0:
            j = np.arange(1, self.N + 1, dtype=float)
            return j * j, 2.0 * np.cos(j * self.x0) / (j * j) + 0j
        j = np.arange(-self.N, self.N + 1, dtype=float)
        shifted = j - self.omega0
        keep = shifted != 0.0
        j, shifted = j[keep], shifted[keep]
        nu = shifted * shifted
        return nu, np.exp(1j * j * self.x0) / nu

    def derivative_terms(self):
        """Frequencies and coefficients of R'(t) = sum_j i*exp(i*j*x0)*exp(i*t*nu_j)."""
        nu, weights = self.terms()
        return nu, 1j * weights * nu

    def constant(self):
        """sum_{j != w0} exp(i*j*x0)/(j - w0)^2 over all j."""
        m = self.omega0
        if self.integer_offset:
            return complex(np.exp(1j * m * self.x0) * bernoulli_cosine_sum(self.x0))
        if self.x0 == 0.0:
            return complex(math.pi**2 / math.sin(math.pi * m) ** 2)
        return complex(self.terms()[1].sum())

    def reduce(self, t):
        """Remove whole periods from t when the series is periodic."""
        t = np.asarray(t, dtype=float)
        return np.fmod(t, 2.0 * np.pi) if self.periodic else t

    def evaluate(self, t, chunk=EVAL_CHUNK):
        """
        Vectorized truncated series.

        Args:
            t (array-like): Times
            chunk (int): Times per block

        Returns:
            np.ndarray: Complex values, same shape as t
        """
        t = self.reduce(t)
        flat = t.ravel()
        nu, weights = self.terms()
        offset = complex(weights.sum()) - self.constant()
        out = np.empty(flat.size, dtype=complex)
        for lo in range(0, flat.size, chunk):
            block = flat[lo:lo + chunk]
            out[lo:lo + chunk] = (np.expm1(1j * np.multiply.outer(block, nu)) @ weights) + offset
        # every numerator vanishes at a whole period
        out[flat == 0.0] = 0.0
        return out.reshape(t.shape)

    def metadata(self):
        return {
            "x0": self.x0,
            "omega0": self.omega0,
            "N": self.N,
            "tail": self.tail,
            "periodic": self.periodic,
            "exploratory": not self.integer_offset,
        }


def torsion_series(omega0, N=DEFAULT_TRUNCATION):
    """The Riemann-type series with torsion offset omega0 at x0 = 0."""
    series = RiemannSeries(x0=0.0, omega0=float(omega0), N=N)
    if not series.integer_offset:
        logger.info(f"Torsion offset {omega0} is not an integer: the series is not periodic (exploratory)")
    return series


def eval_R(series: RiemannSeries, t) -> RiemannValue:
    """R at a single time, with the certified tail bound attached."""
    return RiemannValue(t=float(t), value=complex(series.evaluate(np.array([t]))[0]), tail=series.tail)


def riemann_trajectory(x0_values, times, N=DEFAULT_TRUNCATION, omega0=0.0):
    """
    Trajectories t -> R_{x0}(t) for several x0.

    Args:
        x0_values (iterable): Space locations in radians
        times (array-like): Time grid
        N (int): Truncation
        omega0 (float): Torsion offset shared by all curves

    Returns:
        pd.DataFrame: Columns x0, t, re_R, im_R, tail
    """
    times = np.asarray(times, dtype=float)
    frames = []
    for x0 in x0_values:
        series = RiemannSeries(x0=float(x0), omega0=omega0, N=N)
        values = series.evaluate(times)
        frames.append(pd.DataFrame({
            "x0": np.full(times.size, float(x0)),
            "t": times,
            "re_R": values.real,
            "im_R": values.imag,
            "tail": np.full(times.size, series.tail),
        }))
        logger.debug(f"Trajectory x0={x0}: {times.size} times")
    logger.info(f"✅ Riemann trajectories for {len(frames)} locations")
    return pd.concat(frames, ignore_index=True)
