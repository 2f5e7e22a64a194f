"""
Frame equations of the filament (rows T, e1, e2, complex normal N = e1 + i*e2).

Space:  T_x = Re(conj(u) N),            N_x = -u T
Time:   T_t = -Im(u_x) e1 + Re(u_x) e2,  N_t = -i u_x T + i g N,   g = (|u|^2 - f)/2

Both are F' = hat(w) F with an angular-velocity vector w; each grid step is
an exact rotation exp(hat(Omega)) with Omega from the fourth-order Magnus
expansion on the step endpoints and midpoint, and frames along a grid are
prefix products of those rotations.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.spatial.transform import Rotation

from .base import Frame, check_orthonormality

logger = logging.getLogger(__name__)

# Largest rotation angle (radians) of one Magnus substep.
STEP_ANGLE = 0.05

# Fine rotations held in memory at once.
MAX_FINE_STEPS = 2**20

# Substeps per piece of the time integration.
MAX_PIECE_STEPS = 2**14


def hat(omega):
    """Antisymmetric matrix of an angular-velocity vector (last axis of size 3)."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.shape[:-1] + (3, 3))
    w1, w2, w3 = omega[..., 0], omega[..., 1], omega[..., 2]
    out[..., 0, 1], out[..., 0, 2] = -w3, w2
    out[..., 1, 0], out[..., 1, 2] = w3, -w1
    out[..., 2, 0], out[..., 2, 1] = -w2, w1
    return out


def space_generator(u):
    """Angular velocity (0, Im u, -Re u) of the space equation."""
    u = np.asarray(u, dtype=complex)
    return np.stack([np.zeros(u.shape), u.imag, -u.real], axis=-1)


def time_generator(u, ux, f=0.0):
    """Angular velocity (g, Re u_x, Im u_x) of the time equation."""
    u = np.asarray(u, dtype=complex)
    ux = np.asarray(ux, dtype=complex)
    g = 0.5 * (np.abs(u) ** 2 - np.asarray(f, dtype=float))
    return np.stack([np.broadcast_to(g, u.shape), ux.real, ux.imag], axis=-1)


def magnus_vectors(w_left, w_mid, w_right, h):
    """Fourth-order Magnus rotation vectors for steps of length h."""
    return h / 6.0 * (w_left + 4.0 * w_mid + w_right) - (h * h / 12.0) * np.cross(w_left, w_right)


def lagrange_midpoints(samples):
    """
    Midpoint values of uniformly spaced samples.

    Interior intervals use the cubic stencil (-1, 9, 9, -1)/16, the two end
    intervals the quadratic one (3, 6, -1)/8.
    """
    y = np.asarray(samples)
    n = y.shape[0]
    if n < 2:
        return y[:0]
    if n == 2:
        return 0.5 * (y[:1] + y[1:])
    mids = np.empty((n - 1,) + y.shape[1:], dtype=y.dtype)
    mids[0] = (3.0 * y[0] + 6.0 * y[1] - y[2]) / 8.0
    mids[-1] = (3.0 * y[-1] + 6.0 * y[-2] - y[-3]) / 8.0
    if n > 3:
        mids[1:-1] = (-y[:-3] + 9.0 * y[1:-2] + 9.0 * y[2:-1] - y[3:]) / 16.0
    return mids


def prefix_products(rotations):
    """
    Running compositions P_i = R_i * ... * R_0 (later rotations applied last).

    Hillis-Steele scan: log2(n) rounds of vectorized quaternion products.
    """
    products = rotations
    size = len(products)
    shift = 1
    while shift < size:
        products = Rotation.concatenate([products[:shift], products[shift:] * products[:-shift]])
        shift *= 2
    return products


def reduce_blocks(rotations, block):
    """Compose consecutive blocks of `block` rotations (a power of two) into one each."""
    while block > 1:
        rotations = rotations[1::2] * rotations[0::2]
        block //= 2
    return rotations


def next_power_of_two(n):
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


def substep_count(rate, length, step_angle=STEP_ANGLE):
    """Power-of-two number of substeps keeping each rotation below step_angle."""
    return next_power_of_two(math.ceil(abs(rate * length) / step_angle))


def transport(step_rotations, frame0, x0_index):
    """
    Frames on every node from per-interval rotations and the frame at node x0_index.

    Args:
        step_rotations (Rotation): One rotation per interval, taking node i to node i+1
        frame0 (Frame or np.ndarray): Frame at node x0_index
        x0_index (int): Anchor node

    Returns:
        np.ndarray: Shape (n_nodes, 3, 3)
    """
    start = frame0.matrix if isinstance(frame0, Frame) else np.asarray(frame0, dtype=float)
    n_nodes = len(step_rotations) + 1
    if not 0 <= x0_index < n_nodes:
        raise ValueError(f"Anchor index {x0_index} outside [0, {n_nodes - 1}]")
    frames = np.empty((n_nodes, 3, 3))
    frames[x0_index] = start
    if x0_index < n_nodes - 1:
        right = prefix_products(step_rotations[x0_index:])
        frames[x0_index + 1:] = right.as_matrix() @ start
    if x0_index > 0:
        left = prefix_products(step_rotations[:x0_index][::-1].inv())
        frames[:x0_index] = (left.as_matrix() @ start)[::-1]
    return frames


def parallel_frame_space(u, x, frame0, x0_index=0, u_mid=None):
    """
    Integrate the space equation over sampled filament values.

    Args:
        u (array-like): u at the grid nodes
        x (array-like): Uniform grid
        frame0 (Frame): Frame at x[x0_index]
        x0_index (int): Anchor node
        u_mid (array-like, optional): u at interval midpoints; interpolated when omitted

    Returns:
        np.ndarray: Frames, shape (len(x), 3, 3)

    Raises:
        FrameIntegrityError: If orthonormality drifts past the abort threshold
    """
    u = np.asarray(u, dtype=complex)
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return np.asarray(frame0.matrix)[None].copy()
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-9, atol=0.0):
        raise ValueError("Space grid must be uniform")
    u_mid = lagrange_midpoints(u) if u_mid is None else np.asarray(u_mid, dtype=complex)
    w = space_generator(u)
    omega = magnus_vectors(w[:-1], space_generator(u_mid), w[1:], h)
    frames = transport(Rotation.from_rotvec(omega), frame0, x0_index)
    check_orthonormality(frames)
    return frames


def space_frames_field(field, t, x, frame0, x0_index=0, step_angle=STEP_ANGLE):
    """
    Integrate the space equation for a FilamentField, substepping every interval.

    Returns:
        tuple: (frames of shape (len(x), 3, 3), substeps per interval)
    """
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return np.asarray(frame0.matrix)[None].copy(), 1
    h = x[1] - x[0]
    n_sub = substep_count(field.space_rate(t, x), h, step_angle)
    fine_h = h / n_sub
    n_intervals = x.size - 1
    per_block = max(1, MAX_FINE_STEPS // n_sub)

    blocks = []
    for first in range(0, n_intervals, per_block):
        count = min(per_block, n_intervals - first)
        points = x[first] + 0.5 * fine_h * np.arange(2 * count * n_sub + 1)
        w = space_generator(field.u(t, points))
        omega = magnus_vectors(w[0:-1:2], w[1::2], w[2::2], fine_h)
        blocks.append(reduce_blocks(Rotation.from_rotvec(omega), n_sub))
    rotations = blocks[0] if len(blocks) == 1 else Rotation.concatenate(blocks)

    frames = transport(rotations, frame0, x0_index)
    check_orthonormality(frames)
    logger.debug(f"Space frames at t={t:.4g}: {n_intervals} intervals x {n_sub} substeps")
    return frames, n_sub


@dataclass
class TimeRoute:
    """Frames and positions at one arclength point, sampled at the saved times."""

    x0: float
    times: np.ndarray
    frames: np.ndarray
    chi: np.ndarray
    substeps: int
    orthonormality: float = 0.0


def _time_piece(field, x0, frame, chi, v_a, v_b, n_sub, log_time):
    nodes = v_a + (v_b - v_a) / (2 * n_sub) * np.arange(2 * n_sub + 1)
    t = np.exp(nodes) if log_time else nodes
    u, ux = field.along_time(t, x0)
    w = time_generator(u, ux, field.gauge(t))
    if log_time:
        w = w * t[:, None]
    h = (v_b - v_a) / n_sub
    omega = magnus_vectors(w[0:-1:2], w[1::2], w[2::2], h)
    products = prefix_products(Rotation.from_rotvec(omega))

    frames = np.empty((n_sub + 1, 3, 3))
    frames[0] = frame
    frames[1:] = products.as_matrix() @ frame

    normal = frames[:, 1, :] + 1j * frames[:, 2, :]
    velocity = np.imag(np.conj(u[0::2])[:, None] * normal)
    if log_time:
        velocity = velocity * t[0::2, None]
    chi_end = chi + simpson(velocity, x=nodes[0::2], axis=0)
    return frames[-1], chi_end


def integrate_time_frames(field, x0, times, frame0, chi0=(0.0, 0.0, 0.0), log_time=False,
                          step_angle=STEP_ANGLE):
    """
    Integrate the time equation at one point together with chi_t = Im(conj(u) N).

    Args:
        field (FilamentField): Driving solution
        x0 (float): Arclength point
        times (array-like): Monotone output times; the frame and chi0 belong to times[0]
        frame0 (Frame): Frame at (times[0], x0)
        chi0 (array-like): Position at (times[0], x0)
        log_time (bool): Integrate in tau = log t (times must be positive)
        step_angle (float): Largest rotation per substep

    Returns:
        TimeRoute
    """
    times = np.asarray(times, dtype=float)
    if log_time and np.any(times <= 0):
        raise ValueError("Log-time integration needs positive times")
    variable = np.log(times) if log_time else times
    frame = frame0.matrix if isinstance(frame0, Frame) else np.asarray(frame0, dtype=float)
    chi = np.asarray(chi0, dtype=float)

    frames = np.empty((times.size, 3, 3))
    positions = np.empty((times.size, 3))
    frames[0], positions[0] = frame, chi
    total = 0
    for i in range(times.size - 1):
        v_a, v_b = variable[i], variable[i + 1]
        rate = max(field.time_rate(times[i], x0), field.time_rate(times[i + 1], x0))
        if log_time:
            rate *= max(times[i], times[i + 1])
        n_total = max(2, math.ceil(abs(rate * (v_b - v_a)) / step_angle))
        n_pieces = math.ceil(n_total / MAX_PIECE_STEPS)
        n_sub = max(2, next_power_of_two(math.ceil(n_total / n_pieces)))
        edges = np.linspace(v_a, v_b, n_pieces + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            frame, chi = _time_piece(field, x0, frame, chi, a, b, n_sub, log_time)
        total += n_pieces * n_sub
        frames[i + 1], positions[i + 1] = frame, chi

    defect = check_orthonormality(frames)
    logger.debug(f"Time route at x0={x0}: {total} substeps, defect {defect:.2e}")
    return TimeRoute(x0=float(x0), times=times, frames=frames, chi=positions,
                     substeps=total, orthonormality=defect)


def frame_time_step(frame, field, x0, t, dt, log_time=False, step_angle=STEP_ANGLE):
    """Advance one frame at x0 from t to t + dt under the time equation."""
    route = integrate_time_frames(field, x0, [t, t + dt], frame, log_time=log_time,
                                  step_angle=step_angle)
    return Frame(route.frames[-1])


def filament_function(chi, x, frame0=None):
    """
    Filament function u = <T_x, e1> + i<T_x, e2> of a sampled curve.

    The normals are parallel-transported from the first sample by the minimal
    rotation taking each tangent to the next.

    Args:
        chi (np.ndarray): Positions, shape (n, 3), on a uniform arclength grid
        x (np.ndarray): The grid
        frame0 (Frame, optional): Frame at x[0]; its e1 seeds the transport

    Returns:
        tuple: (u, frames of shape (n, 3, 3))
    """
    chi = np.asarray(chi, dtype=float)
    x = np.asarray(x, dtype=float)
    tangent = np.gradient(chi, x, axis=0, edge_order=2)
    tangent /= np.linalg.norm(tangent, axis=1)[:, None]
    tangent_x = np.gradient(tangent, x, axis=0, edge_order=2)

    if frame0 is not None:
        seed = frame0.e1 - np.dot(frame0.e1, tangent[0]) * tangent[0]
    else:
        trial = np.eye(3)[int(np.argmin(np.abs(tangent[0])))]
        seed = trial - np.dot(trial, tangent[0]) * tangent[0]
    seed /= np.linalg.norm(seed)

    axis = np.cross(tangent[:-1], tangent[1:])
    sine = np.linalg.norm(axis, axis=1)
    cosine = np.einsum("ij,ij->i", tangent[:-1], tangent[1:])
    angle = np.arctan2(sine, cosine)
    safe = np.where(sine > 0, sine, 1.0)
    rotvec = axis * (angle / safe)[:, None]

    e1 = np.empty_like(tangent)
    e1[0] = seed
    if len(rotvec):
        e1[1:] = prefix_products(Rotation.from_rotvec(rotvec)).apply(seed)
    e2 = np.cross(tangent, e1)
    frames = np.stack([tangent, e1, e2], axis=1)
    u = np.einsum("ij,ij->i", tangent_x, e1) + 1j * np.einsum("ij,ij->i", tangent_x, e2)
    return u, frames


def curvature_torsion(u, x):
    """Curvature |u| and torsion d(arg u)/dx of a filament function on a uniform grid."""
    u = np.asarray(u, dtype=complex)
    return np.abs(u), np.gradient(np.unwrap(np.angle(u)), np.asarray(x, dtype=float))
