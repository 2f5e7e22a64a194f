"""
Polygonal line -> Dirac data -> coefficients from the anchor time -> frames -> curve.

The frame at the anchor node is the identity at the anchor time, so every
curve is determined up to one rigid motion, fixed for the whole run.
"""

import logging
import math

import numpy as np
from scipy.linalg import orthogonal_procrustes
from scipy.stats import linregress

from hasimoto import (
    FilamentEvolution,
    FilamentField,
    Frame,
    HasimotoError,
    PolygonSpec,
    binormal_residual,
    integrate_time_frames,
    polygon_filament,
    reversed_spec,
)
from hasimoto.frames import STEP_ANGLE
from nlscoeff import (
    ANCHOR_TIME,
    NLS_COUPLING,
    CoefficientError,
    CoefficientIntegrator,
    anchor_state,
    superpose,
    superpose_at,
)
from nlscoeff.evolve import DEFAULT_TOL
from .base import AnchorSweep, PipelineError, PolygonRun, ReversalCheck, TraceConvergence

logger = logging.getLogger(__name__)

# Grid step shared with the explicit-solution checks; the extent follows the corners.
DEFAULT_DX = 2.0**-7

# Grid margin around the outermost corners, and the least distance a corner may sit from the grid edge.
GRID_PAD = 4.0
DEFAULT_MARGIN = 2.0

# Extra modes on each side of the corner band, filled by the nonlinear interaction.
BAND_PAD = 4

# Dyadic saved times t0 * 2^j used by the trace diagnostics.
DYADIC_LEVELS = 4

ANCHOR_SWEEP = (1e-2, 1e-3, 1e-4)

# Chords on each side of a corner span |x - k| in [CHORD_NEAR, CHORD_FAR].
CHORD_NEAR = 0.5
CHORD_FAR = 1.5

ZERO_DEVIATION = 1e-13


class CoefficientField(FilamentField):
    """Dirac superposition u = sum A_k(t) exp(i(x-k)^2/(4t))/sqrt(t) with coefficients from an integrator."""

    def __init__(self, integrator: CoefficientIntegrator):
        self.integrator = integrator
        self._cache = {}

    def coefficients(self, t):
        t = float(t)
        if t not in self._cache:
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[t] = self.integrator.coefficients(t)[0]
        return self._cache[t]

    def u(self, t, x):
        return superpose(t, self.coefficients(t), x)

    def u_x(self, t, x):
        return superpose(t, self.coefficients(t), x, derivative=True)[1]

    def values(self, t, x):
        return superpose(t, self.coefficients(t), x, derivative=True)

    def along_time(self, times, x0):
        times = np.asarray(times, dtype=float)
        return superpose_at(times, self.integrator.coefficients(times), x0, derivative=True)


def dyadic_times(t0, T, levels=DYADIC_LEVELS):
    """t0 * 2^j for j < levels, merged with T."""
    times = t0 * 2.0 ** np.arange(levels)
    return np.unique(np.append(times[times < T], T))


def symmetric_grid(spec: PolygonSpec, dx=DEFAULT_DX, pad=GRID_PAD):
    """Uniform grid symmetric about 0 that covers every corner with `pad` to spare."""
    half = spec.band + pad
    n = math.ceil(half / dx)
    return dx * np.arange(-n, n + 1, dtype=float)


def _check_corners(spec, x, margin):
    for k in spec.corners:
        if not x[0] + margin <= k <= x[-1] - margin:
            raise ValueError(
                f"Corner at {k} is closer than {margin} to the grid edge [{x[0]}, {x[-1]}]"
            )


def _coefficient_stage(spec, t0, K, tol, coupling):
    try:
        alpha = polygon_filament(spec, K=spec.band + BAND_PAD if K is None else K)
    except ValueError as e:
        raise PipelineError("filament", str(e)) from e
    try:
        start = anchor_state(alpha, t0, coupling)
    except ValueError as e:
        raise PipelineError("anchor", str(e)) from e
    return alpha, CoefficientIntegrator(start, coupling=coupling, tol=tol)


def track_point(spec: PolygonSpec, x0, times, t0=ANCHOR_TIME, K=None, tol=DEFAULT_TOL,
                coupling=NLS_COUPLING, step_angle=STEP_ANGLE):
    """
    Time route alone: chi(t, x0) and the frame at x0, starting from the identity at t0.

    Args:
        spec (PolygonSpec): Initial polygon
        x0 (float): Tracked arclength point
        times (array-like): Saved times, the first equal to t0
        t0 (float): Anchor time

    Returns:
        TimeRoute
    """
    times = np.asarray(times, dtype=float)
    if not math.isclose(times[0], t0):
        raise ValueError(f"Saved times must start at the anchor time {t0}, got {times[0]}")
    _, integrator = _coefficient_stage(spec, t0, K, tol, coupling)
    field = CoefficientField(integrator)
    try:
        return integrate_time_frames(field, x0, times, Frame.identity(), log_time=True, step_angle=step_angle)
    except CoefficientError as e:
        raise PipelineError("coefficients", str(e)) from e
    except HasimotoError as e:
        raise PipelineError("frames", str(e)) from e


def simulate_polygon(spec: PolygonSpec, t0=ANCHOR_TIME, T=None, times=None, x=None, dx=DEFAULT_DX,
                     margin=DEFAULT_MARGIN, K=None, tol=DEFAULT_TOL, coupling=NLS_COUPLING,
                     step_angle=STEP_ANGLE, map_fn=map, check_route=True):
    """
    Evolve a polygonal line by the binormal flow from the anchor time.

    Args:
        spec (PolygonSpec): Initial polygon
        t0 (float): Anchor time where A_k(t0) takes its leading phase
        T (float, optional): Horizon, defaults to 8*t0
        times (array-like, optional): Saved times in [t0, T]; defaults to the dyadic times plus T
        x (array-like, optional): Uniform grid; defaults to a grid symmetric about 0
        dx (float): Step of the default grid
        margin (float): Least distance between a corner and the grid edge
        K (int, optional): Band half-width, defaults to the corner band plus a pad
        tol (float): Coefficient integration tolerance
        coupling (float): Coupling c0
        step_angle (float): Largest frame rotation per substep
        map_fn (callable): map-like used for the space fan-out
        check_route (bool): Compare the space and time routes at a probe node

    Returns:
        PolygonRun

    Raises:
        PipelineError: Naming the failing stage
    """
    T = 8.0 * t0 if T is None else float(T)
    times = dyadic_times(t0, T) if times is None else np.asarray(times, dtype=float)
    if not math.isclose(times[0], t0) or times[-1] > T * (1 + 1e-12):
        raise ValueError(f"Saved times must run from t0={t0} up to T={T}")
    x = symmetric_grid(spec, dx) if x is None else np.asarray(x, dtype=float)
    _check_corners(spec, x, margin)
    logger.info(f"🚀 Polygon run: {len(spec.corners)} corners, t0={t0:g}, T={T:g}, {x.size} grid points")

    alpha, integrator = _coefficient_stage(spec, t0, K, tol, coupling)
    try:
        coefficients = integrator.trajectory(times)
    except CoefficientError as e:
        raise PipelineError("coefficients", str(e)) from e

    field = CoefficientField(integrator)
    evolution = FilamentEvolution(field, x, frame0=Frame.identity(), chi0=spec.base_point,
                                  log_time=True, step_angle=step_angle, map_fn=map_fn)
    try:
        curve = evolution.run(times, check_route=check_route)
    except (HasimotoError, CoefficientError) as e:
        raise PipelineError("frames", str(e)) from e
    except ValueError as e:
        raise PipelineError("curve", str(e)) from e

    residual = binormal_residual(curve) if times.size >= 3 else None

    metadata = {
        "spec": spec.metadata(),
        "t0": t0,
        "T": T,
        "times": times.tolist(),
        "dx": float(x[1] - x[0]),
        "x_range": [float(x[0]), float(x[-1])],
        "K": alpha.K,
        "tol": tol,
        "coupling": coupling,
        "step_angle": step_angle,
        "mass_drift": coefficients.mass_drift(),
        "orthonormality": curve.orthonormality,
        "route_deviation": curve.route_deviation,
        "flags": dict(curve.flags),
        "residual_chi": residual.max_chi if residual is not None else None,
        "residual_tangent": residual.max_tangent if residual is not None else None,
    }
    run = PolygonRun(spec=spec, t0=t0, T=T, coefficients=coefficients, curve=curve,
                     metadata=metadata, residual=residual)
    logger.info(f"✅ Polygon run done: mass drift {metadata['mass_drift']:.2e}, "
                f"orthonormality {curve.orthonormality:.2e}")
    return run


def _dyadic_indices(run: PolygonRun, levels=DYADIC_LEVELS):
    indices = []
    for j in range(levels):
        target = run.t0 * 2.0**j
        hits = np.flatnonzero(np.isclose(run.times, target, rtol=1e-9, atol=0.0))
        if hits.size == 0:
            raise ValueError(f"Run has no saved time at {target:g}; need t0*2^j for j < {levels}")
        indices.append(int(hits[0]))
    return indices


def extrapolated_trace(run: PolygonRun):
    """chi(0, x) from chi(t0) and chi(2*t0), assuming chi(t) = chi(0) + C*sqrt(t)."""
    first, second = _dyadic_indices(run, levels=2)
    root2 = math.sqrt(2.0)
    return (root2 * run.curve[first].chi - run.curve[second].chi) / (root2 - 1.0)


def trace_convergence(run: PolygonRun, x_samples=None) -> TraceConvergence:
    """
    Rate at which the curve approaches its t = 0 trace.

    Fits log|chi(t, x) - chi_0(x)| against log t over the dyadic times later
    than 2*t0, with chi_0 extrapolated from t0 and 2*t0; the two extrapolation
    points would return the assumed sqrt(t) rate by construction. Alongside,
    a rate-free exponent fits log|chi(2t, x) - chi(t, x)| against log t over
    every dyadic step, which needs no extrapolated trace.

    Args:
        run (PolygonRun): Run saved at t0, 2t0, 4t0, 8t0
        x_samples (array-like, optional): Points to fit, defaults to the corners (or 0)

    Returns:
        TraceConvergence: both exponents are nan where the deviation vanishes
    """
    indices = _dyadic_indices(run)
    if x_samples is None:
        x_samples = list(run.spec.corners) or [0.0]
    nodes = [int(np.argmin(np.abs(run.x - s))) for s in x_samples]
    trace = extrapolated_trace(run)
    times = run.times[indices]

    late = slice(2, None)
    exponents, rate_free, constants, worst = [], [], [], []
    for node in nodes:
        deviation = np.array([np.linalg.norm(run.curve[i].chi[node] - trace[node]) for i in indices])
        worst.append(float(deviation.max()))
        if deviation.max() < ZERO_DEVIATION:
            exponents.append(float("nan"))
            rate_free.append(float("nan"))
            constants.append(0.0)
            continue
        fit = linregress(np.log(times[late]), np.log(np.maximum(deviation[late], ZERO_DEVIATION)))
        exponents.append(float(fit.slope))
        constants.append(float(np.exp(fit.intercept)))
        steps = np.array([np.linalg.norm(run.curve[j].chi[node] - run.curve[i].chi[node])
                          for i, j in zip(indices[:-1], indices[1:])])
        step_fit = linregress(np.log(times[:-1]), np.log(np.maximum(steps, ZERO_DEVIATION)))
        rate_free.append(float(step_fit.slope))
    result = TraceConvergence(
        x=run.x[nodes], exponent=np.array(exponents), constant=np.array(constants), max_deviation=np.array(worst),
        rate_free_exponent=np.array(rate_free),
    )
    logger.info(f"✅ Trace convergence exponents {np.round(result.exponent, 3).tolist()}")
    return result


def _unit(v):
    return v / np.linalg.norm(v)


def polygon_trace_angles(run: PolygonRun):
    """
    Interior angles of the extrapolated t = 0 trace at every corner.

    The tangent on each side is the chord between |x - k| = 0.5 and 1.5.

    Returns:
        dict: corner -> angle in radians
    """
    trace = extrapolated_trace(run)

    def at(s):
        return np.array([np.interp(s, run.x, trace[:, i]) for i in range(3)])

    angles = {}
    for k in run.spec.corners:
        left = _unit(at(k - CHORD_NEAR) - at(k - CHORD_FAR))
        right = _unit(at(k + CHORD_FAR) - at(k + CHORD_NEAR))
        angles[k] = float(np.arccos(np.clip(-np.dot(left, right), -1.0, 1.0)))
    return angles


def reversal_consistency(spec: PolygonSpec, **run_kwargs) -> ReversalCheck:
    """
    Evolve the polygon and its mirror alpha_k -> alpha_{-k}, then fit chi(t, x) = P*chi_rev(t, -x) + c.

    The grid must be symmetric about 0 (the default grid is).
    """
    forward = simulate_polygon(spec, **run_kwargs)
    backward = simulate_polygon(reversed_spec(spec), **run_kwargs)
    if not np.allclose(forward.x, -forward.x[::-1]):
        raise ValueError("Reversal check needs a grid symmetric about 0")
    target = forward.curve.chi.reshape(-1, 3)
    mirrored = backward.curve.chi[:, ::-1, :].reshape(-1, 3)
    target_mean, mirrored_mean = target.mean(axis=0), mirrored.mean(axis=0)
    R, _ = orthogonal_procrustes(mirrored - mirrored_mean, target - target_mean)
    fitted = (mirrored - mirrored_mean) @ R + target_mean
    check = ReversalCheck(
        P=R.T,
        translation=target_mean - mirrored_mean @ R,
        residual=float(np.max(np.linalg.norm(fitted - target, axis=1))),
    )
    logger.info(f"✅ Reversal check: det P = {check.det:+.6f}, residual {check.residual:.2e}")
    return check


def anchor_sweep(experiment, t0_values=ANCHOR_SWEEP, map_fn=map) -> AnchorSweep:
    """
    Rerun a scalar experiment at several anchor times to bound the anchor bias.

    Args:
        experiment (callable): t0 -> float, picklable when map_fn is a process pool's map
        t0_values (iterable): Anchor times
        map_fn (callable): map-like

    Returns:
        AnchorSweep
    """
    t0_values = np.asarray(list(t0_values), dtype=float)
    values = np.array(list(map_fn(experiment, t0_values)), dtype=float)
    sweep = AnchorSweep(t0_values=t0_values, values=values)
    logger.info(f"✅ Anchor sweep over t0={t0_values.tolist()}: relative spread {sweep.relative_spread:.3f}")
    return sweep
