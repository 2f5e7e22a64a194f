import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# Orthonormality defect above which a frame stack is rejected.
FRAME_ABORT_TOL = 1e-6

# Orthonormality defect above which a warning is logged.
FRAME_WARN_TOL = 1e-8


class HasimotoError(Exception):
    """Base error of the frame and curve machinery."""


class FrameIntegrityError(HasimotoError):
    """Frames drifted away from orthonormality."""

    def __init__(self, defect, index=None):
        where = "" if index is None else f" at sample {index}"
        super().__init__(f"Frame orthonormality defect {defect:.3e}{where} exceeds {FRAME_ABORT_TOL:.0e}")
        self.defect = defect
        self.index = index


@dataclass(frozen=True, eq=False)
class Frame:
    """
    Orthonormal frame (T, e1, e2) with T = e1 x e2.

    Stored as a 3x3 matrix whose rows are T, e1, e2; N = e1 + i*e2 is the
    complex normal used by the frame equations.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float).reshape(3, 3)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def from_vectors(cls, T, e1, e2):
        return cls(np.vstack([T, e1, e2]))

    @property
    def T(self):
        return self.matrix[0]

    @property
    def e1(self):
        return self.matrix[1]

    @property
    def e2(self):
        return self.matrix[2]

    @property
    def N(self):
        return self.e1 + 1j * self.e2

    def rotate_normals(self, angle):
        """Rotate (e1, e2) by `angle` about T; N and the filament function pick up exp(-i*angle)."""
        c, s = np.cos(angle), np.sin(angle)
        return Frame.from_vectors(self.T, c * self.e1 + s * self.e2, -s * self.e1 + c * self.e2)

    def defect(self):
        return orthonormality_defect(self.matrix[None])


def orthonormality_defect(frames):
    """
    Largest deviation from an orthonormal right-handed frame over a stack.

    Covers every pairwise inner product, every unit length and T - e1 x e2.

    Args:
        frames (np.ndarray): Shape (..., 3, 3), rows T, e1, e2

    Returns:
        float: The worst defect
    """
    frames = np.asarray(frames, dtype=float)
    if frames.size == 0:
        return 0.0
    gram = frames @ np.swapaxes(frames, -1, -2)
    gram_defect = np.max(np.abs(gram - np.eye(3)))
    handed = np.max(np.abs(frames[..., 0, :] - np.cross(frames[..., 1, :], frames[..., 2, :])))
    return float(max(gram_defect, handed))


def check_orthonormality(frames, warn_tol=FRAME_WARN_TOL, abort_tol=FRAME_ABORT_TOL):
    """
    Measure the orthonormality defect and enforce the abort threshold.

    Returns:
        float: The defect

    Raises:
        FrameIntegrityError: If the defect exceeds abort_tol
    """
    frames = np.asarray(frames, dtype=float).reshape(-1, 3, 3)
    gram = frames @ np.swapaxes(frames, -1, -2)
    per_frame = np.max(np.abs(gram - np.eye(3)), axis=(1, 2))
    defect = float(per_frame.max()) if per_frame.size else 0.0
    if defect > abort_tol:
        raise FrameIntegrityError(defect, int(np.argmax(per_frame)))
    if defect > warn_tol:
        logger.warning(f"⚠️ Frame orthonormality defect {defect:.3e} above {warn_tol:.0e}")
    return defect


@dataclass
class CurveState:
    """
    Curve sampled on a uniform arclength grid at one time.

    Attributes:
        t (float): Time
        x (np.ndarray): Arclength grid, shape (n,)
        chi (np.ndarray): Positions, shape (n, 3)
        frames (np.ndarray): Frames, shape (n, 3, 3), rows T, e1, e2
    """

    t: float
    x: np.ndarray
    chi: np.ndarray
    frames: np.ndarray

    @property
    def T(self):
        return self.frames[:, 0, :]

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    def grid_consistency(self):
        """max |d(chi)/dx - T| over interior samples, by central differences."""
        if self.x.size < 3:
            return 0.0
        derivative = (self.chi[2:] - self.chi[:-2]) / (2.0 * self.dx)
        return float(np.max(np.linalg.norm(derivative - self.T[1:-1], axis=1)))

    def to_frame(self):
        data = {"t": np.full(self.x.size, self.t), "x": self.x}
        for i in range(3):
            data[f"chi{i + 1}"] = self.chi[:, i]
        for i in range(3):
            data[f"T{i + 1}"] = self.T[:, i]
        return pd.DataFrame(data)


@dataclass
class CurveTrajectory:
    """
    Saved curve states plus the diagnostics gathered while building them.

    `flags` holds soft failures (route disagreement and the like) by name.
    """

    states: list
    orthonormality: float = 0.0
    route_deviation: float = None
    flags: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def times(self):
        return np.array([state.t for state in self.states])

    @property
    def x(self):
        return self.states[0].x

    @property
    def chi(self):
        return np.stack([state.chi for state in self.states])

    @property
    def tangents(self):
        return np.stack([state.T for state in self.states])

    def to_frame(self):
        return pd.concat([state.to_frame() for state in self.states], ignore_index=True)

    def save(self, path, binary=False):
        """
        Dump every state as rows {t, x, chi1..3, T1..3}.

        Args:
            path (str): Output path
            binary (bool): Write float64 columns to a .npz archive instead of CSV
        """
        folder = os.path.dirname(path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        frame = self.to_frame()
        if binary:
            path = os.path.splitext(path)[0] + ".npz"
            np.savez(path, **{name: frame[name].to_numpy(dtype=float) for name in frame.columns})
        else:
            frame.to_csv(path, index=False, float_format="%.17g")
        logger.info(f"💾 Saved curve trajectory: {path}")
        return path


@dataclass(frozen=True)
class PolygonSpec:
    """
    Polygonal line given by its corners.

    Attributes:
        corners (tuple): Integer arclength positions k of the corners
        angles (tuple): Interior angles theta_k in (0, pi]; pi means no corner
        torsions (tuple): Torsion parameters gamma_k in [0, 2*pi)
        base_point (tuple): chi at x0 = 0
        base_frame (Frame): Frame at x0 = 0
    """

    corners: tuple
    angles: tuple
    torsions: tuple = None
    base_point: tuple = (0.0, 0.0, 0.0)
    base_frame: Frame = None

    def __post_init__(self):
        corners = tuple(int(k) for k in self.corners)
        angles = tuple(float(a) for a in self.angles)
        torsions = (0.0,) * len(corners) if self.torsions is None else tuple(float(g) for g in self.torsions)
        if not (len(corners) == len(angles) == len(torsions)):
            raise ValueError(
                f"Got {len(corners)} corners, {len(angles)} angles and {len(torsions)} torsions"
            )
        if len(set(corners)) != len(corners):
            raise ValueError(f"Corner positions must be distinct, got {corners}")
        for theta in angles:
            if not 0 < theta <= np.pi:
                raise ValueError(f"Corner angle must lie in (0, pi], got {theta}")
        order = np.argsort(corners)
        object.__setattr__(self, "corners", tuple(corners[i] for i in order))
        object.__setattr__(self, "angles", tuple(angles[i] for i in order))
        object.__setattr__(self, "torsions", tuple(torsions[i] for i in order))
        object.__setattr__(self, "base_point", tuple(float(c) for c in self.base_point))
        if self.base_frame is None:
            object.__setattr__(self, "base_frame", Frame.identity())

    @classmethod
    def straight(cls):
        return cls(corners=(), angles=())

    @property
    def band(self):
        """Smallest K with every corner inside [-K, K]."""
        return max((abs(k) for k in self.corners), default=0)

    def metadata(self):
        return {
            "corners": list(self.corners),
            "angles": list(self.angles),
            "torsions": list(self.torsions),
            "base_point": list(self.base_point),
        }


class FilamentField(ABC):
    """
    A solution u(t, x) of i*u_t + u_xx + (|u|^2 - f(t))*u/2 = 0 that drives the frame equations.

    Subclasses supply u and u_x; the gauge f defaults to 0.
    """

    # Relative step used by the finite-difference rate estimates.
    RATE_PROBE = 1e-6

    @abstractmethod
    def u(self, t, x):
        """Filament function at time t on points x."""

    @abstractmethod
    def u_x(self, t, x):
        """Arclength derivative of the filament function."""

    def gauge(self, t):
        """Gauge function f(t)."""
        return np.zeros_like(np.asarray(t, dtype=float))

    def values(self, t, x):
        return self.u(t, x), self.u_x(t, x)

    def along_time(self, times, x0):
        """u and u_x at the point x0 for every time in `times`."""
        times = np.asarray(times, dtype=float)
        u = np.array([complex(np.asarray(self.u(t, x0))) for t in times])
        ux = np.array([complex(np.asarray(self.u_x(t, x0))) for t in times])
        return u, ux

    def space_rate(self, t, x):
        """Bound on the rotation rate plus the oscillation rate of u along x."""
        u, ux = self.values(t, np.asarray(x, dtype=float))
        amplitude = np.abs(u)
        return float(np.max(amplitude) + np.max(np.abs(ux) / (amplitude + 1e-3)))

    def time_rate(self, t, x0):
        """Bound on the rotation rate plus the oscillation rate of u, u_x in time at x0."""
        h = self.RATE_PROBE * max(1.0, abs(t))
        u, ux = self.along_time([t, t + h], x0)
        g = 0.5 * (np.abs(u[0]) ** 2 - float(self.gauge(t)))
        omega = np.sqrt(g**2 + np.abs(ux[0]) ** 2)
        phase = np.abs(u[1] - u[0]) / h / (abs(u[0]) + 1e-3) + np.abs(ux[1] - ux[0]) / h / (abs(ux[0]) + 1e-3)
        return float(omega + phase)
