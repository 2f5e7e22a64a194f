"""
Poisson summation for the quadratic exponential sum.

sum_k exp(4*pi^2*i*t*k^2) = exp(i*pi/4)/(2*sqrt(pi*t)) * sum_j exp(-i*j^2/(4t))
holds only distributionally. Damping both sides with exp(-eps*k^2) gives the
exact identity sum_k exp(-a*k^2) = sqrt(pi/a) * sum_j exp(-pi^2*j^2/a) with
a = eps - 4*pi^2*i*t, which is what gets checked.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

# Default regularization.
POISSON_EPS = 1e-4

# Both truncated tails are pushed below this.
POISSON_TAIL_TOL = 1e-10


@dataclass
class PoissonCheck:
    """Both sides of the regularized identity with their truncations."""

    t: float
    eps: float
    K: int
    J: int
    lhs: complex
    rhs: complex

    @property
    def residual(self):
        return abs(self.lhs - self.rhs)

    def metadata(self):
        return {
            "t": self.t,
            "eps": self.eps,
            "K": self.K,
            "J": self.J,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "residual": self.residual,
        }


def gaussian_truncation(decay, tol=POISSON_TAIL_TOL):
    """
    Smallest N with sum_{|n| > N} exp(-decay*n^2) below tol.

    Uses the bound 2*exp(-decay*N^2) * (1 + 1/(2*decay*N)).
    """
    if not decay > 0:
        raise ValueError(f"Gaussian decay must be positive, got {decay}")
    N = max(1, math.ceil(math.sqrt(math.log(1.0 / tol) / decay)))
    while 2.0 * math.exp(-decay * N * N) * (1.0 + 1.0 / (2.0 * decay * N)) >= tol:
        N = math.ceil(1.1 * N) + 1
    return N


def _gaussian_sum(a, N):
    n = np.arange(1, N + 1, dtype=float)
    return 1.0 + 2.0 * np.sum(np.exp(-a * n * n))


def poisson_identity_check(t, eps=POISSON_EPS, tail_tol=POISSON_TAIL_TOL):
    """
    Evaluate both sides of the regularized identity at time t.

    Args:
        t (float): Time, > 0
        eps (float): Damping exponent
        tail_tol (float): Bound on each truncated tail

    Returns:
        PoissonCheck: `residual` is |LHS - RHS|
    """
    if not t > 0:
        raise ValueError(f"Poisson identity needs t > 0, got {t}")
    if not eps > 0:
        raise ValueError(f"Regularization must be positive, got eps={eps}")
    a = complex(eps, -4.0 * math.pi**2 * t)
    K = gaussian_truncation(eps, tail_tol)
    J = gaussian_truncation(math.pi**2 * eps / abs(a) ** 2, tail_tol)
    lhs = complex(_gaussian_sum(a, K))
    rhs = complex(np.sqrt(math.pi / a) * _gaussian_sum(math.pi**2 / a, J))
    check = PoissonCheck(t=float(t), eps=float(eps), K=K, J=J, lhs=lhs, rhs=rhs)
    logger.debug(f"Poisson identity t={t}: residual {check.residual:.3e} (K={K}, J={J})")
    return check
