import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_simpson

from .base import CurveState, CurveTrajectory, orthonormality_defect

logger = logging.getLogger(__name__)


def integrate_tangent(tangents, x, x0_index, base_point):
    """chi(x) = base_point + integral of T from x[x0_index] to x (composite Simpson)."""
    cumulative = cumulative_simpson(tangents, x=x, axis=0, initial=0.0)
    return np.asarray(base_point, dtype=float) + cumulative - cumulative[x0_index]


def reconstruct_curve(frames, x, base_points, times, x0_index=0):
    """
    Assemble a curve trajectory from frames along x and base points at x0.

    Args:
        frames (np.ndarray): Shape (n_times, n_x, 3, 3), rows T, e1, e2
        x (np.ndarray): Uniform arclength grid
        base_points (np.ndarray): chi(t, x0) per time, shape (n_times, 3)
        times (np.ndarray): Saved times
        x0_index (int): Grid index of x0

    Returns:
        CurveTrajectory
    """
    frames = np.asarray(frames, dtype=float)
    x = np.asarray(x, dtype=float)
    base_points = np.asarray(base_points, dtype=float)
    if frames.shape[:2] != (len(times), x.size):
        raise ValueError(f"Frames of shape {frames.shape} do not match {len(times)} times x {x.size} points")
    states = []
    for t, frame_stack, base in zip(times, frames, base_points):
        chi = integrate_tangent(frame_stack[:, 0, :], x, x0_index, base)
        states.append(CurveState(t=float(t), x=x, chi=chi, frames=frame_stack))
    return CurveTrajectory(states=states, orthonormality=orthonormality_defect(frames))


@dataclass
class ResidualReport:
    """Finite-difference residuals of chi_t = chi_x ^ chi_xx and T_t = T ^ T_xx on interior samples."""

    times: np.ndarray
    x: np.ndarray
    chi_residual: np.ndarray
    tangent_residual: np.ndarray

    @property
    def max_chi(self):
        return float(np.max(self.chi_residual)) if self.chi_residual.size else 0.0

    @property
    def max_tangent(self):
        return float(np.max(self.tangent_residual)) if self.tangent_residual.size else 0.0

    def to_frame(self):
        """Largest residual per interior saved time."""
        return pd.DataFrame({
            "t": self.times,
            "chi_residual": self.chi_residual.max(axis=1, initial=0.0),
            "tangent_residual": self.tangent_residual.max(axis=1, initial=0.0),
        })


def binormal_residual(trajectory: CurveTrajectory) -> ResidualReport:
    """
    Discrete binormal-flow and Schrodinger-map residuals of a saved trajectory.

    Central differences in x on the uniform grid; second-order three-point
    differences in t, so the saved times may be unevenly spaced (dyadic
    times included). Needs at least three increasing times.
    """
    times = trajectory.times
    if times.size < 3:
        raise ValueError(f"Residuals need at least 3 saved times, got {times.size}")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("Residuals need strictly increasing saved times")
    dx = trajectory.x[1] - trajectory.x[0]

    chi = trajectory.chi
    tangent = trajectory.tangents
    chi_t = _time_derivative(chi, times)[:, 1:-1]
    chi_x = (chi[1:-1, 2:] - chi[1:-1, :-2]) / (2.0 * dx)
    chi_xx = (chi[1:-1, 2:] - 2.0 * chi[1:-1, 1:-1] + chi[1:-1, :-2]) / dx**2
    chi_residual = np.linalg.norm(chi_t - np.cross(chi_x, chi_xx), axis=-1)

    T_mid = tangent[1:-1, 1:-1]
    T_t = _time_derivative(tangent, times)[:, 1:-1]
    T_xx = (tangent[1:-1, 2:] - 2.0 * T_mid + tangent[1:-1, :-2]) / dx**2
    tangent_residual = np.linalg.norm(T_t - np.cross(T_mid, T_xx), axis=-1)

    return ResidualReport(
        times=times[1:-1],
        x=trajectory.x[1:-1],
        chi_residual=chi_residual,
        tangent_residual=tangent_residual,
    )


def _time_derivative(values, times):
    """d/dt at the interior saved times; reduces to the centred difference on an even grid."""
    h1 = (times[1:-1] - times[:-2]).reshape(-1, *([1] * (values.ndim - 1)))
    h2 = (times[2:] - times[1:-1]).reshape(h1.shape)
    return (
        -h2 / (h1 * (h1 + h2)) * values[:-2]
        + (h2 - h1) / (h1 * h2) * values[1:-1]
        + h1 / (h2 * (h1 + h2)) * values[2:]
    )
