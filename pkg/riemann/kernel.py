"""
The kernel F(x) = int (exp(i*xi^2) - 1)/xi^2 * exp(-i*x*xi) dxi and the
Gauss-sum expansion of R_{x0} near rational times.

Poisson summation gives the exact identity
    R(2*pi*p/q + h) - R(2*pi*p/q) = -i*h + sqrt(h)/q * sum_m G(p, m, q) F((x0 - 2*pi*m/q)/sqrt(h))
over all integers m; the leading term keeps the m nearest q*x0/(2*pi).
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from seqcore import RationalTime, gauss_sum
from .base import NearRationalResult, QuadratureError
from .series import RiemannSeries

logger = logging.getLogger(__name__)

# Quadrature runs on [0, XI_CUT]; beyond it the endpoint expansion takes over.
XI_CUT = 50.0

# Requested absolute accuracy of F.
KERNEL_TOL = 1e-9

# Neighbouring m summed by the full expansion on each side of the leading one.
EXPANSION_TERMS = 64

# Error term of the expansion stays below the leading term for h <= WINDOW_FACTOR / q^2.
WINDOW_FACTOR = 0.1

F_ZERO = 2.0 * math.sqrt(math.pi) * complex(math.cos(0.75 * math.pi), math.sin(0.75 * math.pi))


def _re_profile(xi):
    # (cos(xi^2) - 1)/xi^2 without cancellation
    return -0.5 * xi * xi * np.sinc(xi * xi / (2.0 * math.pi)) ** 2


def _im_profile(xi):
    return np.sinc(xi * xi / math.pi)


def _panel_integral(f, a, b, x):
    if x == 0.0:
        value, err = quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    else:
        value, err = quad(f, a, b, weight="cos", wvar=x, epsabs=1e-14, epsrel=1e-13, limit=200)
    return value, err


def _oscillating_tail(xi, x):
    """int_xi^inf cos(x*s) exp(i*s^2)/s^2 ds by two endpoint integrations by parts."""
    total = 0j
    for sign in (1.0, -1.0):
        phase = xi * xi + sign * x * xi
        slope = 2.0 * xi + sign * x
        amplitude = 1.0 / (xi * xi)
        d_amplitude = -2.0 / xi**3
        ratio_derivative = (d_amplitude * slope - amplitude * 2.0) / slope**2
        total += 0.5 * np.exp(1j * phase) * (1j * amplitude / slope - ratio_derivative / slope)
    return total


def _constant_tail(xi, x):
    """int_xi^inf cos(x*s)/s^2 ds."""
    if x == 0.0:
        return 1.0 / xi, 0.0
    return quad(lambda s: 1.0 / (s * s), xi, np.inf, weight="cos", wvar=x, epsabs=KERNEL_TOL * 1e-2)


@lru_cache(maxsize=4096)
def _kernel_quadrature(x, xi_cut):
    x = abs(x)
    # one panel per half turn of exp(i*xi^2)
    edges = np.sqrt(np.pi * np.arange(0, math.ceil(xi_cut * xi_cut / math.pi) + 1))
    edges[-1] = xi_cut
    total, error = 0j, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        re, re_err = _panel_integral(_re_profile, a, b, x)
        im, im_err = _panel_integral(_im_profile, a, b, x)
        total += complex(re, im)
        error += re_err + im_err
    const, const_err = _constant_tail(xi_cut, x)
    total += _oscillating_tail(xi_cut, x) - const
    error += const_err + 16.0 / xi_cut**7
    return 2.0 * total, 2.0 * error


def F_closed_form(x):
    """
    F(x) = 2i*sqrt(pi)*exp(i*pi/4)*exp(-i*x^2/4) + pi*|x|*erfc(exp(i*pi/4)*|x|/2).

    Follows from F'' = -sqrt(pi*i)*exp(-i*x^2/4) away from 0, evenness and decay at infinity.
    """
    x = np.abs(np.asarray(x, dtype=float))
    rotation = np.exp(0.25j * np.pi)
    return 2j * np.sqrt(np.pi) * rotation * np.exp(-0.25j * x * x) + np.pi * x * erfc(rotation * x / 2.0)


def F_kernel(x, xi_cut=XI_CUT, method="auto"):
    """
    Evaluate F by oscillatory quadrature.

    Panels of weighted adaptive quadrature cover [0, xi_cut]; the tail is the
    endpoint expansion of the chirp plus a Fourier-weighted quadrature of
    1/xi^2. For |x| > xi_cut the stationary point leaves the panels and the
    closed form is used instead.

    Args:
        x (float or array-like): Points
        xi_cut (float): Quadrature cut
        method (str): "auto", "quad" or "closed"

    Returns:
        complex or np.ndarray

    Raises:
        QuadratureError: If the accumulated error estimate exceeds KERNEL_TOL
    """
    methods = ["auto", "quad", "closed"]
    if method not in methods:
        raise ValueError(f"Unknown kernel method '{method}'. Available methods: {methods}")
    scalar = np.ndim(x) == 0
    points = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(points.shape, dtype=complex)
    for i, point in np.ndenumerate(points):
        if method == "closed" or (method == "auto" and abs(point) > xi_cut):
            out[i] = complex(F_closed_form(point))
            continue
        if abs(point) > xi_cut:
            raise ValueError(f"Quadrature needs |x| <= xi_cut = {xi_cut}, got x={point}")
        value, error = _kernel_quadrature(float(abs(point)), float(xi_cut))
        if error > KERNEL_TOL:
            raise QuadratureError(
                f"F kernel quadrature at x={point} has error estimate {error:.3e}",
                diagnostics={"x": float(point), "xi_cut": xi_cut, "error": error},
            )
        out[i] = value
    return complex(out[0]) if scalar else out


def expansion_window(q):
    """Largest h for which the Gauss-sum expansion is expected to dominate its error term."""
    return WINDOW_FACTOR / (q * q)


def near_rational_expansion(series: RiemannSeries, rt: RationalTime, h, terms=EXPANSION_TERMS):
    """
    Compare R(2*pi*p/q + h) - R(2*pi*p/q) with the Gauss-sum expansion.

    Args:
        series (RiemannSeries): Plain series (no torsion offset)
        rt (RationalTime): Rational point p/q of the 2*pi-periodic clock
        h (float): Offset, 0 < h
        terms (int): Neighbouring m kept by the full expansion on each side

    Returns:
        NearRationalResult: `in_window` is False when h > 0.1/q^2
    """
    if series.omega0 != 0.0:
        raise ValueError(f"The Gauss-sum expansion needs omega0 = 0, got {series.omega0}")
    if not h > 0:
        raise ValueError(f"Offset h must be positive, got {h}")
    p, q = rt.p, rt.q
    t0 = rt.period_time
    before, after = series.evaluate(np.array([t0, t0 + h]))
    actual = complex(after - before)

    root = math.sqrt(h)
    center = int(round(q * series.x0 / (2.0 * math.pi)))
    leading_gauss = gauss_sum(p, center, q)
    leading = root / q * leading_gauss * F_kernel((series.x0 - 2.0 * math.pi * center / q) / root) - 1j * h

    m = np.arange(center - terms, center + terms + 1)
    m = m[m != center]
    neighbours = np.array([gauss_sum(p, int(k), q) for k in m])
    rest = root / q * np.sum(neighbours * F_closed_form((series.x0 - 2.0 * np.pi * m / q) / root))
    in_window = h <= expansion_window(q)
    if not in_window:
        logger.warning(f"⚠️ h={h:.3g} lies outside the expansion window {expansion_window(q):.3g} for q={q}")
    return NearRationalResult(
        p=p, q=q, h=float(h), actual=actual, leading=leading, full=leading + rest,
        gauss=leading_gauss, in_window=in_window,
    )
