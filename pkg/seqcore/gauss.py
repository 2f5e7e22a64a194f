import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.fft import ifft

# Direct summation is O(q); beyond this the double-precision sum loses its point.
GAUSS_SUM_MAX_Q = 10_000


def gauss_sum(p: int, m: int, q: int) -> complex:
    """
    Exponential sum sum_{l=0}^{q-1} exp(2*pi*i*(p*l^2 + m*l)/q).

    The exponent is reduced modulo q in exact integer arithmetic before the
    complex exponential is taken, so every term is accurate to rounding.

    Args:
        p (int): Quadratic coefficient (pass -p for the G(-p, m, q) of the comb formula)
        m (int): Linear coefficient
        q (int): Modulus, 1 <= q <= GAUSS_SUM_MAX_Q

    Returns:
        complex: The Gauss sum

    Raises:
        ValueError: If q is out of range
    """
    q = int(q)
    if q < 1:
        raise ValueError(f"Modulus q must be >= 1, got {q}")
    if q > GAUSS_SUM_MAX_Q:
        raise ValueError(f"Modulus q={q} exceeds the direct-summation cap {GAUSS_SUM_MAX_Q}")
    l = np.arange(q, dtype=np.int64)
    residues = ((int(p) % q) * l * l + (int(m) % q) * l) % q
    return complex(np.sum(np.exp(2j * np.pi * residues / q)))


def gauss_sum_table(p: int, q: int) -> np.ndarray:
    """All G(p, m, q) for m = 0..q-1 in one pass (a DFT of the quadratic chirp)."""
    q = int(q)
    if q < 1 or q > GAUSS_SUM_MAX_Q:
        raise ValueError(f"Modulus q must lie in [1, {GAUSS_SUM_MAX_Q}], got {q}")
    l = np.arange(q, dtype=np.int64)
    chirp = np.exp(2j * np.pi * (((int(p) % q) * l * l) % q) / q)
    return q * ifft(chirp)


@dataclass(frozen=True)
class RationalTime:
    """
    Rational time p/q in lowest terms.

    Two clocks are attached: `t` = p/(2*pi*q) is the Talbot time of the free
    Schrodinger flow on integer-spaced combs, and `period_time` = 2*pi*p/q is
    the rational point of the 2*pi-periodic Riemann-type series.
    """

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"Denominator q must be >= 1, got {self.q}")
        if self.p < 0:
            raise ValueError(f"Numerator p must be nonnegative, got {self.p}")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p={self.p} and q={self.q} are not coprime")

    @classmethod
    def from_fraction(cls, value):
        frac = Fraction(value)
        return cls(frac.numerator, frac.denominator)

    @property
    def t(self) -> float:
        return self.p / (2.0 * math.pi * self.q)

    @property
    def period_time(self) -> float:
        return 2.0 * math.pi * self.p / self.q

    def __str__(self):
        return f"{self.p}/{self.q}"
