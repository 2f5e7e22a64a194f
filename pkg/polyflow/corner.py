"""
Corner trajectories of polygons with many nearly flat corners against the
Riemann function.

Corners at |j| <= n^nu with interior angle pi - theta/n carry weights
a ~ theta/(2*sqrt(pi)*n), and the rescaled path n*(chi_n(t, x0) - chi_n(t0, x0))
approaches (theta/(4*pi^2)) * Rot * [Rc(4*pi^2*t) - Rc(4*pi^2*t0)] with
Rc(s) = (0, Re R(s), Im R(s)), R(s) = R_{2*pi*x0}(s) + i*s.
"""

import logging
import math

import numpy as np
import pandas as pd
from scipy.spatial.transform import Rotation

from hasimoto import PolygonSpec
from hasimoto.frames import STEP_ANGLE
from nlscoeff import ANCHOR_TIME, NLS_COUPLING
from nlscoeff.evolve import DEFAULT_TOL
from riemann import RiemannSeries
from .base import CornerTrajectory
from .pipeline import BAND_PAD, track_point

logger = logging.getLogger(__name__)

MIN_SCALE = 8

DEFAULT_HORIZON = 0.5

DEFAULT_SAVED = 65

# Riemann truncation of the reference path.
REFERENCE_TRUNCATION = 4000


def riemann_polygon(n, nu=1.0, theta=1.0):
    """Corners at |j| <= n^nu, each with interior angle pi - theta/n."""
    if not 0 < nu <= 1:
        raise ValueError(f"Exponent nu must lie in (0, 1], got {nu}")
    if not 0 <= theta < n * math.pi:
        raise ValueError(f"Angle deficit must lie in [0, n*pi), got {theta}")
    J = int(math.floor(n**nu + 1e-9))
    corners = tuple(range(-J, J + 1))
    return PolygonSpec(corners=corners, angles=(math.pi - theta / n,) * len(corners))


def riemann_reference(times, theta, x0=0.0, t0=None, N=REFERENCE_TRUNCATION):
    """(theta/(4*pi^2)) * [Rc(4*pi^2*t) - Rc(4*pi^2*t0)], one row per time."""
    times = np.asarray(times, dtype=float)
    t0 = times[0] if t0 is None else t0
    series = RiemannSeries(x0=2.0 * math.pi * x0, N=N)
    clock = 4.0 * math.pi**2 * np.append(times, t0)
    values = series.evaluate(clock) + 1j * clock
    shifted = values[:-1] - values[-1]
    scale = theta / (4.0 * math.pi**2)
    return scale * np.stack([np.zeros(times.size), shifted.real, shifted.imag], axis=1)


def corner_vs_riemann(n, nu=1.0, theta=1.0, x0=0.0, T=DEFAULT_HORIZON, t0=ANCHOR_TIME, n_saved=DEFAULT_SAVED,
                      N=REFERENCE_TRUNCATION, tol=DEFAULT_TOL, coupling=NLS_COUPLING, step_angle=STEP_ANGLE):
    """
    Track chi_n(t, x0) and compare it with the Riemann reference after one fitted rotation.

    Args:
        n (int): Polygon scale, >= 8
        nu (float): Corners at |j| <= n^nu
        theta (float): Angle deficit, corners have angle pi - theta/n
        x0 (float): Tracked point
        T (float): Horizon
        t0 (float): Anchor time, also the base of the rescaled path
        n_saved (int): Equally spaced saved times in [t0, T]
        N (int): Riemann truncation

    Returns:
        CornerTrajectory
    """
    if n < MIN_SCALE:
        raise ValueError(f"Polygon scale must be at least {MIN_SCALE}, got n={n}")
    spec = riemann_polygon(n, nu, theta)
    K = spec.band + BAND_PAD
    times = np.linspace(t0, T, n_saved)
    logger.info(f"🚀 Corner trajectory n={n}, nu={nu}, theta={theta}, {len(spec.corners)} corners")

    route = track_point(spec, x0, times, t0=t0, K=K, tol=tol, coupling=coupling, step_angle=step_angle)
    path = route.chi
    rescaled = n * (path - path[0])
    reference = riemann_reference(times, theta, x0=x0, t0=t0, N=N)

    if np.any(np.linalg.norm(reference, axis=1) > 0) and np.any(np.linalg.norm(rescaled, axis=1) > 0):
        rotation, rssd = Rotation.align_vectors(rescaled, reference)
    else:
        rotation, rssd = Rotation.identity(), 0.0
    trajectory = CornerTrajectory(
        n=int(n), nu=float(nu), theta=float(theta), x0=float(x0), times=times, path=path,
        rescaled=rescaled, reference=rotation.apply(reference), rotation=rotation.as_matrix(),
        metadata={"t0": t0, "T": T, "K": K, "tol": tol, "riemann_N": N, "rotation_rssd": float(rssd)},
    )
    logger.info(f"✅ Corner trajectory n={n}: sup deviation {trajectory.sup_deviation:.4g} (theta={theta})")
    return trajectory


def corner_convergence(scales=(8, 16, 32), map_fn=map, **kwargs):
    """
    Sup deviations along several polygon scales.

    Returns:
        pd.DataFrame: Columns n, sup_deviation, relative (to theta)
    """
    theta = kwargs.get("theta", 1.0)
    trajectories = list(map_fn(_ScaleTask(kwargs), scales))
    frame = pd.DataFrame({
        "n": [c.n for c in trajectories],
        "sup_deviation": [c.sup_deviation for c in trajectories],
    })
    frame["relative"] = frame["sup_deviation"] / theta if theta else np.nan
    if not np.all(np.diff(frame["sup_deviation"]) < 0):
        logger.warning(f"⚠️ Corner deviations are not decreasing along n={list(scales)}")
    return frame


class _ScaleTask:
    # picklable for process pools
    def __init__(self, kwargs):
        self.kwargs = kwargs

    def __call__(self, n):
        return corner_vs_riemann(n, **self.kwargs)


class CornerDeviation:
    """t0 -> sup deviation of one corner trajectory; the experiment handed to anchor_sweep."""

    def __init__(self, n, **kwargs):
        self.n = n
        self.kwargs = kwargs

    def __call__(self, t0):
        return corner_vs_riemann(self.n, t0=float(t0), **self.kwargs).sup_deviation
