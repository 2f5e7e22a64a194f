"""
Small-scale diagnostics of R in the time variable: high-pass flatness and
Lp norms of dyadic frequency blocks of R'.

With integer frequencies every filtered piece is a trigonometric polynomial
in t, sampled exactly on a uniform grid of one period by an inverse FFT.
Norms are normalized, ||f||_p^p = (1/2pi) int_0^{2pi} |f|^p dt.
"""

import logging
import math
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy import fft
from scipy.stats import linregress

from .base import FlatnessResult, QuadratureError
from .series import RiemannSeries

logger = logging.getLogger(__name__)

# Relative change under grid doubling accepted as converged.
REFINE_RTOL = 1e-3

# Grid doublings tried before giving up.
MAX_DOUBLINGS = 3

# High-pass modes kept up to |j| <= MODE_FACTOR * sqrt(N); with 1/j^2 weights the
# dropped tail holds about MODE_FACTOR^-3 of the L2 mass.
MODE_FACTOR = 20

DEFAULT_P_VALUES = (1, 2, 4, 6, 8)
DEFAULT_BLOCKS = range(4, 10)


def _require_periodic(series: RiemannSeries):
    if not series.periodic:
        raise ValueError(
            f"Time-frequency diagnostics need an integer torsion offset, got omega0={series.omega0}"
        )


def _spectral_lines(nu, coeffs, keep):
    """Merge the kept terms into one coefficient per integer frequency."""
    freqs = np.rint(nu[keep]).astype(np.int64)
    values = coeffs[keep]
    lines, inverse = np.unique(freqs, return_inverse=True)
    merged = np.bincount(inverse, weights=values.real) + 1j * np.bincount(inverse, weights=values.imag)
    return lines, merged


def _grid_for(lines):
    """Smallest power of two above twice the top frequency."""
    return 1 << int(math.ceil(math.log2(2 * int(lines.max()) + 2)))


def _samples(lines, coeffs, n):
    spectrum = np.zeros(n, dtype=complex)
    spectrum[lines] = coeffs
    return fft.ifft(spectrum) * n


def _lp_norms(lines, coeffs, p_values, n):
    modulus = np.abs(_samples(lines, coeffs, n))
    return {p: float(np.mean(modulus**p) ** (1.0 / p)) for p in p_values}


def _refined_norms(lines, coeffs, p_values, n, rtol=REFINE_RTOL, label="norm"):
    """
    Norms on successively doubled grids until every p changes by less than rtol.

    Returns:
        tuple: (dict p -> norm on the finest grid, grid size)
    """
    previous = _lp_norms(lines, coeffs, p_values, n)
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        current = _lp_norms(lines, coeffs, p_values, n)
        changes = {p: abs(current[p] - previous[p]) / max(previous[p], 1e-300) for p in p_values}
        if max(changes.values()) < rtol:
            return current, n
        previous = current
    raise QuadratureError(
        f"{label} did not settle after {MAX_DOUBLINGS} grid doublings (last grid {n})",
        diagnostics={"grid": n, "changes": changes},
    )


def is_rational_location(x0, max_denominator=1000):
    """Whether x0/(2*pi) is a rational of small height, up to float resolution."""
    ratio = float(x0) / (2.0 * math.pi)
    approx = Fraction(ratio).limit_denominator(max_denominator)
    return abs(ratio - float(approx)) < 1e-12


def flatness(series: RiemannSeries, N, rtol=REFINE_RTOL):
    """
    Flatness of the high-pass part P_N R, keeping the frequencies j^2 >= N.

    The kept band is also capped above at |j| <= MODE_FACTOR * sqrt(N) (and
    the series truncation), so the value does not drift with the truncation
    of the series; the cap is returned as `mode_cut`.

    The L2 norm comes from Parseval on the kept coefficients, the L4 norm
    from the exact sampling of one period, refined by grid doubling.

    Args:
        series (RiemannSeries): Series with an integer torsion offset
        N (int): Frequency cut, >= 2
        rtol (float): Accepted relative change of the L4 norm under refinement

    Returns:
        FlatnessResult: `float(result)` is the flatness

    Raises:
        QuadratureError: If the L4 norm does not settle
    """
    _require_periodic(series)
    if N < 2:
        raise ValueError(f"Frequency cut must be >= 2, got N={N}")
    nu, weights = series.terms()
    top = min(series.N, math.ceil(MODE_FACTOR * math.sqrt(N)))
    keep = (nu >= N) & (np.sqrt(nu) <= top)
    if not keep.any():
        raise ValueError(f"No kept mode has j^2 >= {N} below the truncation N={series.N}")
    lines, coeffs = _spectral_lines(nu, weights, keep)

    l2_parseval = float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))
    norms, grid = _refined_norms(lines, coeffs, (2, 4), _grid_for(lines), rtol, label=f"L4 norm at N={N}")
    value = (norms[4] / l2_parseval) ** 4
    result = FlatnessResult(
        N=int(N),
        value=float(value),
        l2_parseval=l2_parseval,
        l2_quadrature=norms[2],
        l4=norms[4],
        modes=int(lines.size),
        grid=grid,
        exploratory=not is_rational_location(series.x0),
        mode_cut=int(top),
    )
    logger.debug(f"Flatness at N={N}: {value:.6g} over {lines.size} frequencies, grid {grid}")
    return result


def flatness_scan(series: RiemannSeries, cuts=(16, 32, 64, 128, 256)):
    """Flatness along several cuts, one row each."""
    rows = [flatness(series, N).as_row() for N in cuts]
    frame = pd.DataFrame(rows)
    increasing = bool(np.all(np.diff(frame["flatness"]) > 0))
    if not increasing:
        logger.warning(f"⚠️ Flatness is not increasing along N={list(cuts)} at x0={series.x0}")
    logger.info(f"✅ Flatness scan at x0={series.x0}: {frame['flatness'].round(4).tolist()}")
    return frame


def _block_lines(series: RiemannSeries, M):
    if M < 0:
        raise ValueError(f"Block index must be >= 0, got M={M}")
    lo, hi = 2**M, 2 ** (M + 1)
    if hi - 1 + abs(series.omega0) > series.N:
        raise ValueError(f"Block M={M} needs |j| up to {hi - 1}, beyond the truncation N={series.N}")
    nu, coeffs = series.derivative_terms()
    radius = np.sqrt(nu)
    keep = (radius >= lo) & (radius < hi)
    return _spectral_lines(nu, coeffs, keep)


def _check_exponent(p):
    if not 1.0 <= p <= 8.0:
        raise ValueError(f"Exponent p must lie in [1, 8], got p={p}")


def dyadic_block_lp(series: RiemannSeries, M, p, rtol=REFINE_RTOL):
    """
    Lp norm of the block 2^M <= |j| < 2^(M+1) of R'(t) = sum_j i*exp(i*j*x0)*exp(i*t*j^2).

    Args:
        series (RiemannSeries): Series with an integer torsion offset
        M (int): Block index
        p (float): Exponent in [1, 8]
        rtol (float): Accepted relative change under grid doubling

    Returns:
        float
    """
    _require_periodic(series)
    _check_exponent(p)
    lines, coeffs = _block_lines(series, M)
    norms, _ = _refined_norms(lines, coeffs, (p,), _grid_for(lines), rtol, label=f"Block M={M} L{p} norm")
    return norms[p]


def reference_eta(p):
    """eta(p) = 3p/4 for p <= 4 and p/2 + 1 for p >= 4."""
    return 0.75 * p if p <= 4 else 0.5 * p + 1.0


def structure_exponents(series: RiemannSeries, p_values=DEFAULT_P_VALUES, blocks=DEFAULT_BLOCKS, rtol=REFINE_RTOL):
    """
    Empirical eta(p) from the growth of dyadic block norms.

    A block norm growing like 2^(beta*M) gives ||P_N R||_p^p ~ N^(-eta) with
    eta = p*(2 - beta)/2, N = 4^M.

    Args:
        series (RiemannSeries): Series with an integer torsion offset
        p_values (iterable): Exponents in [1, 8]
        blocks (iterable): Block indices M, at least two
        rtol (float): Refinement tolerance of each norm

    Returns:
        pd.DataFrame: Columns p, beta, eta_hat, eta_reference, r_squared
    """
    _require_periodic(series)
    p_values = tuple(p_values)
    blocks = list(blocks)
    if len(blocks) < 2:
        raise ValueError(f"Need at least two blocks for a slope, got {blocks}")
    for p in p_values:
        _check_exponent(p)

    logger.info(f"🚀 Dyadic block norms for M={blocks[0]}..{blocks[-1]}, p={list(p_values)}")
    norms = {p: [] for p in p_values}
    for M in blocks:
        lines, coeffs = _block_lines(series, M)
        block_norms, grid = _refined_norms(lines, coeffs, p_values, _grid_for(lines), rtol, label=f"Block M={M}")
        for p in p_values:
            norms[p].append(block_norms[p])
        logger.debug(f"Block M={M}: grid {grid}")

    rows = []
    for p in p_values:
        fit = linregress(blocks, np.log2(norms[p]))
        rows.append({
            "p": p,
            "beta": fit.slope,
            "eta_hat": p * (2.0 - fit.slope) / 2.0,
            "eta_reference": reference_eta(p),
            "r_squared": fit.rvalue**2,
        })
    frame = pd.DataFrame(rows)
    logger.info(f"✅ eta_hat = {frame['eta_hat'].round(3).tolist()}")
    return frame
