import logging

import numpy as np
from scipy.spatial.transform import Rotation

from seqcore import ComplexSeq
from .base import Frame, PolygonSpec

logger = logging.getLogger(__name__)


def angle_to_weight(theta):
    """
    Weight a >= 0 of a corner with interior angle theta: sin(theta/2) = exp(-pi*a^2/2).

    Args:
        theta (float or array-like): Angle in (0, pi]

    Returns:
        float or np.ndarray: a = sqrt(-(2/pi) * log(sin(theta/2)))

    Raises:
        ValueError: If theta lies outside (0, pi]
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0) or np.any(theta > np.pi):
        raise ValueError(f"Corner angle must lie in (0, pi], got {theta}")
    log_sine = np.log(np.sin(theta / 2.0))
    weight = np.sqrt(np.maximum(-2.0 / np.pi * log_sine, 0.0))
    return float(weight) if weight.ndim == 0 else weight


def weight_to_angle(a):
    """Inverse of angle_to_weight: theta = 2*arcsin(exp(-pi*a^2/2))."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError(f"Weight must be nonnegative, got {a}")
    theta = 2.0 * np.arcsin(np.exp(-np.pi * a * a / 2.0))
    return float(theta) if theta.ndim == 0 else theta


def polygon_filament(spec: PolygonSpec, K=None) -> ComplexSeq:
    """
    Data alpha_k = a_k * exp(i*gamma_k) of a polygonal line.

    Args:
        spec (PolygonSpec): Corners, angles and torsions
        K (int, optional): Band half-width, at least spec.band

    Returns:
        ComplexSeq: Zero wherever theta_k = pi
    """
    entries = {}
    for k, theta, gamma in zip(spec.corners, spec.angles, spec.torsions):
        weight = angle_to_weight(theta)
        if weight > 0:
            entries[k] = weight * np.exp(1j * gamma)
    return ComplexSeq.from_dict(entries, K=spec.band if K is None else K)


def polygon_tangents(spec: PolygonSpec):
    """
    Segment tangents of the polygon, from left to right.

    Starting from the base frame on the leftmost segment, each corner turns
    T by pi - theta_k toward cos(gamma_k) e1 + sin(gamma_k) e2, and the
    frame is carried along by the same rotation.

    Returns:
        tuple: (corner positions, tangents of shape (len(corners) + 1, 3))
    """
    frame = spec.base_frame.matrix.copy()
    tangents = [frame[0].copy()]
    for theta, gamma in zip(spec.angles, spec.torsions):
        direction = np.cos(gamma) * frame[1] + np.sin(gamma) * frame[2]
        axis = np.cross(frame[0], direction)
        turn = Rotation.from_rotvec((np.pi - theta) * axis / np.linalg.norm(axis))
        frame = turn.apply(frame)
        tangents.append(frame[0].copy())
    return np.array(spec.corners, dtype=float), np.array(tangents)


def polygon_curve(spec: PolygonSpec, x):
    """Positions of the polygon on an arclength grid, chi(0) = base point."""
    corners, tangents = polygon_tangents(spec)
    x = np.asarray(x, dtype=float)

    def position(s):
        # integrate the piecewise constant tangent from 0 to s
        knots = np.concatenate([[-np.inf], corners, [np.inf]])
        total = np.zeros(3)
        lo, hi, sign = (0.0, s, 1.0) if s >= 0 else (s, 0.0, -1.0)
        for segment, tangent in enumerate(tangents):
            left = max(lo, knots[segment])
            right = min(hi, knots[segment + 1])
            if right > left:
                total += (right - left) * tangent
        return sign * total

    return np.asarray(spec.base_point) + np.array([position(s) for s in x])


def corner_spec(angles_by_corner, torsions_by_corner=None, base_frame=None):
    """PolygonSpec from {k: theta_k} (and optionally {k: gamma_k}) mappings."""
    corners = sorted(angles_by_corner)
    torsions = None
    if torsions_by_corner is not None:
        torsions = [torsions_by_corner.get(k, 0.0) for k in corners]
    return PolygonSpec(
        corners=tuple(corners),
        angles=tuple(angles_by_corner[k] for k in corners),
        torsions=None if torsions is None else tuple(torsions),
        base_frame=base_frame or Frame.identity(),
    )


def reversed_spec(spec: PolygonSpec) -> PolygonSpec:
    """Corners mirrored to -k with the same angles and torsions (alpha_k -> alpha_{-k})."""
    return PolygonSpec(
        corners=tuple(-k for k in spec.corners),
        angles=spec.angles,
        torsions=spec.torsions,
        base_point=spec.base_point,
        base_frame=spec.base_frame,
    )
