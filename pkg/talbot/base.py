"""
2*pi-periodic Fourier profiles u0_hat(xi) = sum_k alpha_k exp(-i*k*xi).

A profile knows its support radius r (u0_hat vanishes mod 2*pi outside
B(0, r)) and turns into the coefficient sequence of the periodic datum
u0 = sum_k alpha_k delta_k through an FFT of its samples.
"""

import logging
import math
from abc import ABC, abstractmethod

import numpy as np
from scipy.fft import ifft
from scipy.integrate import quad

from seqcore import ComplexSeq

logger = logging.getLogger(__name__)

# Default number of samples per period for the coefficient FFT.
FFT_SAMPLES = 2**16

# Samples above this outside the declared support count as a support violation.
SUPPORT_TOL = 1e-12

# Default bound on sum_{|k| > K} |alpha_k| when K is picked from the tail.
TAIL_TOL = 1e-10


class TalbotError(Exception):
    """Base error of the linear Talbot machinery."""


class SupportError(TalbotError, ValueError):
    """Profile support violates the declared radius or the closed-form contract."""


def wrap_angle(xi):
    """Reduce xi modulo 2*pi into [-pi, pi)."""
    xi = np.asarray(xi, dtype=float)
    return (xi + np.pi) % (2.0 * np.pi) - np.pi


def bump(y):
    """psi(y) = exp(1 - 1/(1 - y^2)) on |y| < 1 and 0 elsewhere; psi(0) = 1."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
    return out


class PeriodicFourierProfile(ABC):
    """
    A 2*pi-periodic function supported mod 2*pi in B(0, radius).

    Subclasses implement `_evaluate` on [-pi, pi); everything else (periodic
    evaluation, sampling, coefficients and the tail rule) is shared.
    """

    def __init__(self, radius):
        if not 0 < radius <= math.pi:
            raise ValueError(f"Support radius must lie in (0, pi], got {radius}")
        self.radius = float(radius)

    @abstractmethod
    def _evaluate(self, xi):
        """Profile values on points already reduced into [-pi, pi)."""

    def __call__(self, xi):
        return np.asarray(self._evaluate(wrap_angle(xi)), dtype=complex)

    def samples(self, n_samples=FFT_SAMPLES):
        """Values on the uniform grid xi_j = -pi + 2*pi*j/n."""
        grid = -np.pi + 2.0 * np.pi * np.arange(n_samples) / n_samples
        return grid, self(grid)

    def validate_support(self, n_samples=FFT_SAMPLES):
        """
        Check the declared radius against samples.

        Raises:
            SupportError: If |u0_hat| >= SUPPORT_TOL somewhere outside B(0, radius)
        """
        grid, values = self.samples(n_samples)
        outside = np.abs(grid) > self.radius
        leak = float(np.max(np.abs(values[outside]), initial=0.0))
        if leak >= SUPPORT_TOL:
            raise SupportError(f"Profile reaches {leak:.3e} outside its declared radius {self.radius}")
        return leak

    def spectrum(self, n_samples=FFT_SAMPLES):
        """
        alpha_k = (1/2pi) int u0_hat(xi) exp(i*k*xi) dxi for |k| < n/2, by the trapezoid rule.

        Returns:
            ComplexSeq: Half-width n/2 - 1
        """
        _, values = self.samples(n_samples)
        # The grid starts at -pi, which contributes (-1)^k.
        raw = ifft(values)
        K = n_samples // 2 - 1
        k = np.arange(-K, K + 1)
        return ComplexSeq(K, raw[k % n_samples] * np.where(k % 2 == 0, 1.0, -1.0))

    def coefficients(self, K=None, tail_tol=TAIL_TOL, n_samples=FFT_SAMPLES):
        """
        Coefficient sequence of the periodic datum, cropped to a band.

        Args:
            K (int, optional): Band half-width; picked by `truncation` when omitted
            tail_tol (float): Tail bound used when K is omitted
            n_samples (int): FFT size; raised automatically to cover 4K samples

        Returns:
            ComplexSeq
        """
        if K is not None and 4 * int(K) > n_samples:
            n_samples = 1 << (4 * int(K) - 1).bit_length()
        full = self.spectrum(n_samples)
        if K is None:
            K = self.truncation(tail_tol, full)
        K = int(K)
        return ComplexSeq(K, full.values[full.K - K:full.K + K + 1])

    def truncation(self, tail_tol=TAIL_TOL, spectrum=None):
        """Smallest K with sum_{|k| > K} |alpha_k| below tail_tol."""
        spectrum = self.spectrum() if spectrum is None else spectrum
        size = np.abs(spectrum.values)
        # tails[K] = sum over |k| > K
        pairs = size[spectrum.K:] + size[spectrum.K::-1]
        pairs[0] = size[spectrum.K]
        tails = np.concatenate([np.cumsum(pairs[::-1])[::-1][1:], [0.0]])
        below = tails < tail_tol
        K = int(np.argmax(below)) if below.any() else spectrum.K
        if K >= spectrum.K - 1:
            logger.warning(f"⚠️ Coefficient tail does not drop below {tail_tol:.0e} within K={spectrum.K}")
        return K

    def tail_bound(self, K, spectrum=None):
        """sum_{|k| > K} |alpha_k| as seen by the FFT spectrum."""
        spectrum = self.spectrum() if spectrum is None else spectrum
        size = np.abs(spectrum.values)
        inside = np.abs(spectrum.indices) <= K
        return float(size[~inside].sum())

    def metadata(self):
        return {"profile": type(self).__name__, "radius": self.radius}


class BumpProfile(PeriodicFourierProfile):
    """
    amplitude * psi(xi/radius), periodized, with psi the standard C-infinity bump.

    `scaled(lam)` gives f^lam(xi) = lam * psi(lam * xi) for the unit bump.
    """

    def __init__(self, radius=1.0, amplitude=1.0):
        super().__init__(radius)
        self.amplitude = amplitude

    def _evaluate(self, xi):
        return self.amplitude * bump(xi / self.radius)

    def scaled(self, lam):
        if not lam > 0:
            raise ValueError(f"Scale must be positive, got {lam}")
        return BumpProfile(radius=self.radius / lam, amplitude=self.amplitude * lam)

    def mass(self):
        """(1/2pi) int u0_hat over a period, i.e. alpha_0."""
        integral, _ = quad(lambda y: math.exp(1.0 - 1.0 / (1.0 - y * y)), -1.0, 1.0, epsabs=1e-14)
        return integral * self.radius * self.amplitude / (2.0 * math.pi)

    def metadata(self):
        return {**super().metadata(), "amplitude": self.amplitude}


class CoefficientProfile(PeriodicFourierProfile):
    """Trigonometric polynomial sum_k alpha_k exp(-i*k*xi) with a declared radius (pi by default)."""

    def __init__(self, alpha: ComplexSeq, radius=math.pi):
        super().__init__(radius)
        self.alpha = alpha

    def _evaluate(self, xi):
        xi = np.asarray(xi, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(xi, self.alpha.indices))
        return phases @ self.alpha.values

    def coefficients(self, K=None, tail_tol=TAIL_TOL, n_samples=FFT_SAMPLES):
        return self.alpha if K is None else self.alpha.with_band(max(K, self.alpha.K))
