"""
Self-similar filaments chi_a(t, x) = sqrt(t) * G(x / sqrt(t)).

The profile G is driven by the filament function a*exp(i*s^2/4) (curvature
a, torsion s/2) from the identity frame at s = 0; the corner angle at t = 0
is the angle between the asymptotic tangent A+ and the reversed -A-.
"""

import logging
import math
import os
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import pandas as pd
from scipy.stats import linregress

from hasimoto import FilamentField, Frame, integrate_tangent, parallel_frame_space

logger = logging.getLogger(__name__)

# Largest phase change of the filament over one grid step.
PHASE_STEP = 0.05

# Profile half-length floor and scale: S = max(S_FLOOR, S_SCALE / a).
S_FLOOR = 40.0
S_SCALE = 20.0

# Fraction of each side averaged for the asymptotic tangents.
TAIL_FRACTION = 0.1

# Tangent oscillation above this in the averaging window counts as unsaturated.
SATURATION_TOL = 0.1


def selfsim_filament(a, t, x):
    """a * exp(i*x^2/(4t)) / sqrt(t)."""
    if not t > 0:
        raise ValueError(f"Self-similar filament needs t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    return a * np.exp(1j * x * x / (4.0 * t)) / math.sqrt(t)


def cfm_integral(a, t0, t1):
    """
    Integral of ||d_x T_a||_inf^2 = a^2/tau over [t0, t1], equal to a^2 * log(t1/t0).

    Diverges logarithmically as t0 -> 0.
    """
    if not 0 < t0 <= t1:
        raise ValueError(f"Need 0 < t0 <= t1, got t0={t0}, t1={t1}")
    return a * a * math.log(t1 / t0)


def default_half_length(a):
    return max(S_FLOOR, S_SCALE / a)


@dataclass
class SelfSimilarProfile:
    """
    Profile curve G(s) on [-S, S] with its asymptotic corner.

    Attributes:
        a (float): Parameter (curvature of the profile)
        s (np.ndarray): Arclength grid
        G (np.ndarray): Profile curve, shape (n, 3)
        T (np.ndarray): Tangent, shape (n, 3)
        A_plus (np.ndarray): Asymptotic tangent for s -> +inf
        A_minus (np.ndarray): Asymptotic tangent for s -> -inf
        theta (float): Angle between A_plus and -A_minus
        oscillation (float): Largest deviation of T from its mean in the averaging windows
    """

    a: float
    s: np.ndarray
    G: np.ndarray
    T: np.ndarray
    A_plus: np.ndarray
    A_minus: np.ndarray
    theta: float
    oscillation: float
    flags: dict = field(default_factory=dict)

    @property
    def S(self):
        return float(self.s[-1])

    @property
    def saturated(self):
        return not self.flags.get("insufficient_saturation", False)

    @property
    def c_star(self):
        """-log(sin(theta/2)) / a^2."""
        return -math.log(math.sin(self.theta / 2.0)) / self.a**2

    def curve(self, t, x):
        """chi_a(t, x) = sqrt(t) * G(x / sqrt(t)), interpolated on the profile grid."""
        scaled = np.asarray(x, dtype=float) / math.sqrt(t)
        if np.any(np.abs(scaled) > self.S):
            raise ValueError(f"x / sqrt(t) leaves the profile range [-{self.S}, {self.S}]")
        return math.sqrt(t) * np.stack([np.interp(scaled, self.s, self.G[:, i]) for i in range(3)], axis=1)

    def to_frame(self):
        data = {"s": self.s}
        for i in range(3):
            data[f"G{i + 1}"] = self.G[:, i]
        for i in range(3):
            data[f"T{i + 1}"] = self.T[:, i]
        return pd.DataFrame(data)

    def metadata(self):
        return {
            "a": self.a,
            "S": self.S,
            "ds": float(self.s[1] - self.s[0]),
            "theta": self.theta,
            "c_star": self.c_star,
            "oscillation": self.oscillation,
            "saturated": self.saturated,
        }

    def save(self, path):
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.info(f"💾 Saved self-similar profile: {path}")
        return path


def _tail_average(tangent, mask):
    window = tangent[mask]
    mean = window.mean(axis=0)
    return mean / np.linalg.norm(mean), float(np.max(np.linalg.norm(window - mean, axis=1)))


def integrate_profile(a, S=None, dx=None):
    """
    Integrate the self-similar profile and extract its corner.

    Args:
        a (float): Parameter, > 0
        S (float, optional): Half-length, at least 20/a (default max(40, 20/a))
        dx (float, optional): Step, default PHASE_STEP * 2 / S so the phase moves <= PHASE_STEP per step

    Returns:
        SelfSimilarProfile
    """
    if not a > 0:
        raise ValueError(f"Self-similar parameter must be positive, got a={a}")
    S = default_half_length(a) if S is None else float(S)
    if S < S_SCALE / a:
        raise ValueError(f"Half-length S={S} is below 20/a={S_SCALE / a:.4g}; tangents will not saturate")
    dx = 2.0 * PHASE_STEP / S if dx is None else float(dx)
    n_half = int(math.ceil(S / dx))
    s = np.arange(-n_half, n_half + 1) * (S / n_half)
    h = s[1] - s[0]

    u = a * np.exp(0.25j * s * s)
    mids = s[:-1] + 0.5 * h
    frames = parallel_frame_space(u, s, Frame.identity(), x0_index=n_half, u_mid=a * np.exp(0.25j * mids * mids))
    tangent = frames[:, 0, :]
    G = integrate_tangent(tangent, s, n_half, 2.0 * a * frames[n_half, 2, :])

    window = (1.0 - TAIL_FRACTION) * S
    A_plus, osc_plus = _tail_average(tangent, s >= window)
    A_minus, osc_minus = _tail_average(tangent, s <= -window)
    theta = float(np.arccos(np.clip(-np.dot(A_plus, A_minus), -1.0, 1.0)))

    profile = SelfSimilarProfile(
        a=float(a), s=s, G=G, T=tangent, A_plus=A_plus, A_minus=A_minus,
        theta=theta, oscillation=max(osc_plus, osc_minus),
    )
    if profile.oscillation > SATURATION_TOL:
        profile.flags["insufficient_saturation"] = True
        logger.warning(f"⚠️ Tangent oscillation {profile.oscillation:.3f} for a={a}: increase S")
    logger.debug(f"Profile a={a}: theta={theta:.6f}, S={S}, {s.size} points")
    return profile


def self_similar_curve(profile: SelfSimilarProfile, t, x):
    """chi_a(t, x) = sqrt(t) * G(x / sqrt(t)) for t > 0, the corner polygon at t = 0."""
    if t == 0:
        x = np.asarray(x, dtype=float)
        return np.where(x[:, None] >= 0, x[:, None] * profile.A_plus, x[:, None] * profile.A_minus)
    if t < 0:
        raise ValueError(f"Self-similar curve needs t >= 0, got {t}")
    return profile.curve(t, x)


@dataclass
class AngleLawCalibration:
    """Linear fit -log(sin(theta/2)) = c* * a^2 (+ intercept) over a set of parameters."""

    a: np.ndarray
    theta: np.ndarray
    c_star: float
    intercept: float
    r_squared: float

    def to_frame(self):
        return pd.DataFrame({"a": self.a, "theta": self.theta,
                             "c": -np.log(np.sin(self.theta / 2.0)) / self.a**2})

    def metadata(self):
        return {
            "a": self.a.tolist(),
            "theta": self.theta.tolist(),
            "c_star": self.c_star,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
        }


def _profile_angle(S_factor, a):
    return integrate_profile(a, S=S_factor * default_half_length(a)).theta


def calibrate_angle_law(a_values, S_factor=1.0, map_fn=map):
    """
    Measure the corner angle for each a and fit the angle law.

    Args:
        a_values (array-like): Parameters, > 0
        S_factor (float): Multiplier on the default half-length
        map_fn (callable): map-like for running the profiles (a worker pool's map)

    Returns:
        AngleLawCalibration
    """
    a_values = np.asarray(a_values, dtype=float)
    if a_values.size < 2:
        raise ValueError(f"Calibration needs at least 2 parameters, got {a_values.size}")
    logger.info(f"🔄 Calibrating the angle law over {a_values.size} profiles")
    theta = np.array(list(map_fn(partial(_profile_angle, S_factor), a_values)))
    fit = linregress(a_values**2, -np.log(np.sin(theta / 2.0)))
    calibration = AngleLawCalibration(
        a=a_values, theta=theta, c_star=float(fit.slope),
        intercept=float(fit.intercept), r_squared=float(fit.rvalue**2),
    )
    logger.info(f"✅ Angle law c* = {calibration.c_star:.6f} (R^2 = {calibration.r_squared:.6f})")
    return calibration


class SelfSimilarField(FilamentField):
    """Filament function a*exp(i*x^2/(4t))/sqrt(t) with gauge f = a^2/t."""

    def __init__(self, a):
        self.a = float(a)

    def u(self, t, x):
        return selfsim_filament(self.a, t, x)

    def u_x(self, t, x):
        x = np.asarray(x, dtype=float)
        return 1j * x / (2.0 * t) * self.u(t, x)

    def along_time(self, times, x0):
        times = np.asarray(times, dtype=float)
        u = self.a * np.exp(1j * x0 * x0 / (4.0 * times)) / np.sqrt(times)
        return u, 1j * x0 / (2.0 * times) * u

    def gauge(self, t):
        return self.a**2 / np.asarray(t, dtype=float)

    def space_rate(self, t, x):
        return self.a / math.sqrt(t) + float(np.max(np.abs(x))) / (2.0 * t)

    def time_rate(self, t, x0):
        return (self.a * abs(x0) / (2.0 * t**1.5) + x0 * x0 / (4.0 * t * t) + 1.0 / (2.0 * t))
