"""
Fourier diagnostics of w = T_x: the windowed growth of |w_hat(t, xi)| near
xi = 1/t and the band-averaged energy density of |w_hat|^2.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.signal import get_window
from scipy.stats import linregress

from hasimoto import Frame, HasimotoError, PolygonSpec, angle_to_weight, polygon_tangents, space_frames_field
from hasimoto.frames import STEP_ANGLE, next_power_of_two
from nlscoeff import ANCHOR_TIME, NLS_COUPLING, CoefficientError
from nlscoeff.evolve import DEFAULT_TOL
from .base import EnergyDensity, FourierGrowth, PipelineError
from .pipeline import CoefficientField, _coefficient_stage

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 8.0
SECOND_WINDOW = 12.0

# Share of the window spent in the cosine taper.
TAPER = 0.5

GROWTH_TIMES = tuple(2.0**-j for j in range(4, 11))

# Samples per shortest local wavelength of the windowed integrand.
POINTS_PER_WAVE = 8

# xi probes spread over B(1/t, sqrt(t)).
BALL_PROBES = 9

# Outside probes, in units of 1/t; each lies at least 3/(4t) away from +-1/t.
OUTSIDE_PROBES = (0.0, 0.1, 2.0, 3.0)

WINDOW_SENSITIVITY = 0.1
OUTSIDE_BOUND = 3.0
GROWTH_R2 = 0.9

DEFAULT_BANDS = tuple(range(8, 25, 4))
TRACE_DX = 2.0**-9

# Least number of xi samples per band of width 2*pi.
BAND_SAMPLES = 64

PLATEAU_SPREAD = 0.1


def tukey_window(x, L):
    """Tapered cosine window on |x| <= L, zero outside."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= L
    window = np.zeros(x.size)
    window[inside] = get_window(("tukey", TAPER), int(inside.sum()), fftbins=False)
    return window


def _field(spec, t0, K, tol, coupling):
    _, integrator = _coefficient_stage(spec, t0, K, tol, coupling)
    return CoefficientField(integrator)


def tangent_derivative(field, t, x, step_angle=STEP_ANGLE):
    """
    T_x = Re(conj(u) * (e1 + i*e2)) on the grid, with the identity frame at the middle node.

    |w_hat| is blind to the rigid rotation this choice fixes.
    """
    x = np.asarray(x, dtype=float)
    try:
        frames, _ = space_frames_field(field, t, x, Frame.identity(), x0_index=x.size // 2, step_angle=step_angle)
        u = field.u(t, x)
    except CoefficientError as e:
        raise PipelineError("coefficients", str(e)) from e
    except HasimotoError as e:
        raise PipelineError("frames", str(e)) from e
    normal = frames[:, 1, :] + 1j * frames[:, 2, :]
    return np.real(np.conj(u)[:, None] * normal)


def windowed_transform(x, density, xi, L):
    """
    |sum_j dx * W(x_j) * density_j * exp(i*x_j*xi)| for every xi.

    Args:
        x (np.ndarray): Uniform grid
        density (np.ndarray): Vector field on the grid, shape (len(x), 3)
        xi (array-like): Frequencies
        L (float): Window half-width

    Returns:
        np.ndarray: Euclidean norms of the transformed vectors
    """
    x = np.asarray(x, dtype=float)
    weighted = (x[1] - x[0]) * tukey_window(x, L)[:, None] * np.asarray(density)
    inside = np.abs(x) <= L
    xs, weighted = x[inside], weighted[inside]
    return np.array([np.linalg.norm(np.exp(1j * xs * k) @ weighted) for k in np.atleast_1d(xi)])


def growth_grid(t, L, points_per_wave=POINTS_PER_WAVE):
    """Symmetric grid over [-L-1, L+1] resolving the chirp x/(2t) plus frequencies up to 3/t."""
    highest = (L + 1.0) / (2.0 * t) + 3.0 / t
    dx = 2.0 * math.pi / (points_per_wave * highest)
    n = math.ceil((L + 1.0) / dx)
    return dx * np.arange(-n, n + 1, dtype=float)


def _check_two_corners(spec):
    if spec.corners != (-1, 1) or not math.isclose(spec.angles[0], spec.angles[1]):
        raise ValueError(
            f"Fourier growth needs corners at -1 and 1 with equal angles, got {spec.corners} with {spec.angles}"
        )


@dataclass(frozen=True)
class _GrowthTask:
    # picklable per-time job for process pools
    spec: PolygonSpec
    t0: float
    windows: tuple
    points_per_wave: int
    K: int
    tol: float
    coupling: float
    step_angle: float

    def __call__(self, t):
        x = growth_grid(t, max(self.windows), self.points_per_wave)
        field = _field(self.spec, self.t0, self.K, self.tol, self.coupling)
        density = tangent_derivative(field, t, x, self.step_angle)
        ball = np.linspace(1.0 / t - math.sqrt(t), 1.0 / t + math.sqrt(t), BALL_PROBES)
        outside = np.array(OUTSIDE_PROBES) / t
        sups = [float(windowed_transform(x, density, ball, L).max()) for L in self.windows]
        outside_max = float(windowed_transform(x, density, outside, self.windows[0]).max())
        logger.debug(f"Growth at t={t:g}: sup {sups}, outside {outside_max:.4g}, {x.size} points")
        return sups, outside_max


def tangent_fourier_growth(spec: PolygonSpec, times=GROWTH_TIMES, L=DEFAULT_WINDOW, second_L=SECOND_WINDOW,
                           t0=None, points_per_wave=POINTS_PER_WAVE, K=None, tol=DEFAULT_TOL,
                           coupling=NLS_COUPLING, step_angle=STEP_ANGLE, map_fn=map):
    """
    Windowed sup of |w_hat(t, xi)| over B(1/t, sqrt(t)) against log(1/t).

    Args:
        spec (PolygonSpec): Corners at -1 and 1 with equal angles
        times (iterable): Positive times
        L (float): Window half-width, at least 8
        second_L (float): Second window, used only to measure sensitivity
        t0 (float, optional): Anchor time, defaults to min(times)/8
        points_per_wave (int): Grid samples per shortest local wavelength
        map_fn (callable): map-like over the times

    Returns:
        FourierGrowth
    """
    _check_two_corners(spec)
    if min(L, second_L) < DEFAULT_WINDOW:
        raise ValueError(f"Windows must have half-width at least {DEFAULT_WINDOW}, got {L} and {second_L}")
    times = np.sort(np.asarray(list(times), dtype=float))
    if times[0] <= 0:
        raise ValueError(f"Growth times must be positive, got {times[0]}")
    t0 = min(ANCHOR_TIME, times[0] / 8.0) if t0 is None else t0
    logger.info(f"🚀 Fourier growth over {times.size} times, windows L={L} and {second_L}, t0={t0:g}")

    task = _GrowthTask(spec, t0, (L, second_L), points_per_wave, K, tol, coupling, step_angle)
    results = list(map_fn(task, times))
    sups = np.array([r[0][0] for r in results])
    second = np.array([r[0][1] for r in results])
    outside = np.array([r[1] for r in results])

    fit = linregress(np.log(1.0 / times), sups)
    growth = FourierGrowth(
        times=times, sup_values=sups, second_sup_values=second, outside_values=outside,
        slope=float(fit.slope), intercept=float(fit.intercept), r_squared=float(fit.rvalue**2),
        windows=(L, second_L),
    )
    growth.flags = {
        "window_sensitive": growth.window_sensitivity > WINDOW_SENSITIVITY,
        "outside_unbounded": bool(outside.max() > OUTSIDE_BOUND * np.median(outside)),
        "poor_fit": growth.r_squared < GROWTH_R2,
    }
    for name, raised in growth.flags.items():
        if raised:
            logger.warning(f"⚠️ Fourier growth flag raised: {name}")
    logger.info(f"✅ Fourier growth slope {growth.slope:.4g} in log(1/t), R^2={growth.r_squared:.4f}")
    return growth


def energy_closed_form(spec: PolygonSpec):
    """(4*sum(1 - exp(-pi*a_k^2)), 4*pi*sum(a_k^2)): the t = 0 energy and its value at positive times."""
    if not spec.corners:
        return 0.0, 0.0
    a = np.atleast_1d(angle_to_weight(np.array(spec.angles)))
    return float(4.0 * np.sum(-np.expm1(-math.pi * a * a))), float(4.0 * math.pi * np.sum(a * a))


def band_means(x, weights, bands):
    """
    (1/2pi) * int over [2*pi*n, 2*pi*(n+1)) of |sum_j weights_j * exp(i*x_j*xi)|^2, per band n.

    The sum is evaluated by a zero-padded FFT on the uniform grid x.
    """
    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    bands = np.asarray(bands, dtype=int)
    if 2.0 * math.pi * (bands.max() + 1) > math.pi / dx:
        raise ValueError(f"Grid step {dx} cannot resolve band {bands.max()}; need dx < {1 / (2 * (bands.max() + 1))}")
    size = next_power_of_two(max(x.size, math.ceil(BAND_SAMPLES / dx)))
    spectrum = size * scipy.fft.ifft(weights, n=size, axis=0)
    power = np.sum(np.abs(spectrum) ** 2, axis=1)
    xi = 2.0 * math.pi * np.arange(size) / (size * dx)
    means = []
    for n in bands:
        inside = (xi >= 2.0 * math.pi * n) & (xi < 2.0 * math.pi * (n + 1))
        means.append(float(power[inside].mean()))
    return np.array(means)


def _trace_weights(spec, x, L):
    # jumps of the piecewise-constant t = 0 tangent, windowed at the left node
    corners, tangents = polygon_tangents(spec)
    tangent = tangents[np.searchsorted(corners, x, side="right")]
    return tukey_window(x, L)[:-1, None] * np.diff(tangent, axis=0)


def energy_density(spec: PolygonSpec, t=0.0, bands=DEFAULT_BANDS, L=DEFAULT_WINDOW, dx=None, t0=None,
                   K=None, tol=DEFAULT_TOL, coupling=NLS_COUPLING, step_angle=STEP_ANGLE):
    """
    Band means of |w_hat(t, xi)|^2 and their plateau, the Xi(t) estimate.

    At t = 0 the transform is the sum of the windowed tangent jumps, whose
    band mean equals 4*sum(1 - exp(-pi*a_k^2)) exactly for corners inside the
    flat part of the window.

    Args:
        spec (PolygonSpec): Initial polygon
        t (float): Time, 0 for the polygon itself
        bands (iterable): Band indices n
        L (float): Window half-width
        dx (float, optional): Grid step; the default resolves every band and, at t > 0, the chirp
        t0 (float, optional): Anchor time for t > 0, defaults to min(ANCHOR_TIME, t/8)

    Returns:
        EnergyDensity
    """
    bands = np.asarray(list(bands), dtype=int)
    if t < 0:
        raise ValueError(f"Energy density needs t >= 0, got {t}")
    if any(abs(k) >= L * (1.0 - TAPER) for k in spec.corners):
        raise ValueError(f"Corners {spec.corners} must sit inside the flat part |x| < {L * (1.0 - TAPER)} of the window")
    closed_form, upper = energy_closed_form(spec)

    if t == 0:
        dx = TRACE_DX if dx is None else dx
        x = dx * np.arange(-math.ceil(L / dx), math.ceil(L / dx) + 1, dtype=float)
        values = band_means(x[:-1], _trace_weights(spec, x, L), bands)
    else:
        if dx is None:
            highest = (L + 1.0) / (2.0 * t) + 2.0 * math.pi * (bands.max() + 1)
            dx = min(TRACE_DX, 2.0 * math.pi / (POINTS_PER_WAVE * highest))
        x = dx * np.arange(-math.ceil(L / dx), math.ceil(L / dx) + 1, dtype=float)
        t0 = min(ANCHOR_TIME, t / 8.0) if t0 is None else t0
        field = _field(spec, t0, K, tol, coupling)
        density = tangent_derivative(field, t, x, step_angle)
        values = band_means(x, dx * tukey_window(x, L)[:, None] * density, bands)

    energy = EnergyDensity(t=float(t), bands=bands, values=values, closed_form=closed_form, upper=upper)
    energy.flags = {
        "plateau_not_reached": energy.spread > PLATEAU_SPREAD,
        "instantaneous_growth": closed_form < upper,
    }
    if energy.flags["plateau_not_reached"]:
        logger.warning(f"⚠️ Energy bands at t={t:g} vary by {energy.spread:.1%}; plateau not reached")
    logger.info(f"✅ Energy density at t={t:g}: plateau {energy.plateau:.6g}, "
                f"closed form {closed_form:.6g}, upper {upper:.6g}")
    return energy
