"""
Shared types of the Dirac-superposition coefficient system.

Normalization: the flow is i*u_t + u_xx + (|u|^2 - f)/2 * u = 0, so the
coefficients evolve with c0 = 1/2, the value the frame generator uses for
its (|u|^2 - f)/2 entry. The cubic-NLS convention c0 = 1/4 stays available
through every `coupling` argument (and the `nls_coupling` run setting).
"""

import logging
from dataclasses import dataclass

import numpy as np

from seqcore import ComplexSeq

logger = logging.getLogger(__name__)

# Coupling of the coefficient system: dA_k/dt = i*c0/t * bracket_k(A).
# One half matches the frame generator's (|u|^2 - f)/2 entry.
NLS_COUPLING = 0.5

# Default anchor time near t = 0 where A_k(t0) is set to its leading phase term.
ANCHOR_TIME = 1e-3

# Relative tolerance on the cached mass of a CoeffState.
MASS_CACHE_RTOL = 1e-12


class CoefficientError(Exception):
    """Base error of the coefficient system."""


class IntegrationError(CoefficientError):
    """The integrator could not advance (step-size underflow / stiffness)."""

    def __init__(self, message, t=None):
        super().__init__(message if t is None else f"{message} (t={t:.6g})")
        self.t = t


class SmallnessError(CoefficientError):
    """Data violate the smallness hypothesis of the nonlinear Talbot estimate."""


class SupportViolation(CoefficientError, ValueError):
    """The periodized Fourier profile of the data leaves its declared support."""


@dataclass(frozen=True)
class CoeffState:
    """
    Snapshot of the Dirac-superposition coefficients A_k at time t > 0.

    Attributes:
        t (float): Physical time
        A (ComplexSeq): Coefficients A_k(t)
        M (float): Cached mass sum |A_k|^2
    """

    t: float
    A: ComplexSeq
    M: float = None

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"CoeffState time must be positive, got t={self.t}")
        mass = self.A.mass()
        if self.M is None:
            object.__setattr__(self, "M", mass)
        elif abs(self.M - mass) > MASS_CACHE_RTOL * max(mass, 1e-300):
            raise ValueError(f"Cached mass {self.M} disagrees with sum |A_k|^2 = {mass}")

    @classmethod
    def from_values(cls, t, values):
        return cls(float(t), ComplexSeq.from_array(values))

    @property
    def K(self):
        return self.A.K

    @property
    def values(self):
        return self.A.values


@dataclass(frozen=True)
class NonresonantTriple:
    """
    Index triple (j1, j2, j3) contributing to mode k with a nonzero phase.

    On the constraint k - j1 + j2 - j3 = 0 the phase factorizes as
    omega = k^2 - j1^2 + j2^2 - j3^2 = 2*(k - j1)*(j1 - j2).
    """

    k: int
    j1: int
    j2: int
    j3: int

    @property
    def omega(self):
        return self.k**2 - self.j1**2 + self.j2**2 - self.j3**2

    @property
    def m(self):
        return (self.k - self.j1) * (self.j1 - self.j2)

    def as_tuple(self):
        return (self.j1, self.j2, self.j3)


def band_indices(band):
    """Normalize a band given as an int K, a range or an iterable of ints."""
    if isinstance(band, (int, np.integer)):
        return np.arange(-int(band), int(band) + 1)
    return np.array(sorted(set(int(j) for j in band)), dtype=int)
