import logging
import math
from dataclasses import dataclass
from fractions import Fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    """
    Regular continued fraction of a real number, truncated at some depth.

    The expansion is computed on `surrogate`, the exact rational equal to the
    floating-point input, so every convergent and error below is exact.
    """

    value: float
    surrogate: Fraction
    partial_quotients: tuple
    convergents: tuple
    terminated: bool

    @property
    def errors(self):
        """|t - p_n/q_n| for every convergent, as floats."""
        return tuple(float(abs(self.surrogate - Fraction(p, q))) for p, q in self.convergents)

    @property
    def exponents(self):
        """
        Per-convergent irrationality exponents mu_n with |t - p_n/q_n| = q_n^(-mu_n).

        q_n = 1 carries no information (nan); an exact hit gives inf.
        """
        out = []
        for (p, q), err in zip(self.convergents, self.errors):
            if q <= 1:
                out.append(float("nan"))
            elif err == 0.0:
                out.append(float("inf"))
            else:
                out.append(-math.log(err) / math.log(q))
        return tuple(out)

    def exponent_estimate(self, err_min=0.0, err_max=float("inf")):
        """
        Largest finite mu_n among convergents whose error lies in [err_min, err_max].

        Returns:
            float: The estimate, or nan when no convergent qualifies
        """
        candidates = [
            mu for mu, err in zip(self.exponents, self.errors)
            if err_min <= err <= err_max and math.isfinite(mu)
        ]
        return max(candidates) if candidates else float("nan")

    def metadata(self):
        return {
            "value": self.value,
            "surrogate": f"{self.surrogate.numerator}/{self.surrogate.denominator}",
            "depth": len(self.partial_quotients),
            "terminated": self.terminated,
        }


def continued_fraction(t: float, depth: int) -> ContinuedFractionExpansion:
    """
    Expand t into partial quotients [a_0; a_1, ...] with exact convergents.

    The expansion stops early, with `terminated=True`, once a convergent
    reproduces t exactly in floating point (t is then a floating-point rational).

    Args:
        t (float): Finite real number
        depth (int): Maximum number of partial quotients

    Returns:
        ContinuedFractionExpansion

    Raises:
        ValueError: If t is not finite or depth < 1
    """
    if not math.isfinite(t):
        raise ValueError(f"Cannot expand non-finite value {t}")
    if depth < 1:
        raise ValueError(f"Depth must be >= 1, got {depth}")

    surrogate = Fraction(t)
    x = surrogate
    quotients, convergents = [], []
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    terminated = False

    for _ in range(depth):
        a = math.floor(x)
        quotients.append(a)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        convergents.append((p, q))

        remainder = x - a
        if remainder == 0 or float(Fraction(p, q)) == float(t):
            terminated = True
            break
        x = 1 / remainder

    if terminated:
        logger.debug(f"Expansion of {t} terminated after {len(quotients)} quotients")
    return ContinuedFractionExpansion(
        value=float(t),
        surrogate=surrogate,
        partial_quotients=tuple(quotients),
        convergents=tuple(convergents),
        terminated=terminated,
    )


def liouville_time(mu: float, q_max: int = 10**7, a0: int = 0, a1: int = 2):
    """
    Build a number whose convergents approximate it to order q_n^(-mu).

    Partial quotients follow a_{n+1} = max(1, round(q_n^(mu - 2))) until the
    next denominator would exceed q_max; then |t - p_n/q_n| ~ q_n^(-mu).

    Args:
        mu (float): Target irrationality exponent, >= 2
        q_max (int): Largest denominator allowed in the construction
        a0 (int): Integer part
        a1 (int): First partial quotient

    Returns:
        tuple: (t as float, ContinuedFractionExpansion of t)
    """
    if mu < 2:
        raise ValueError(f"Irrationality exponent must be >= 2, got {mu}")
    quotients = [a0, a1]
    q_prev, q = 1, a1
    while True:
        a_next = max(1, int(round(q ** (mu - 2.0))))
        q_next = a_next * q + q_prev
        if q_next > q_max:
            break
        quotients.append(a_next)
        q_prev, q = q, q_next

    value = Fraction(0)
    for a in reversed(quotients[1:]):
        value = 1 / (a + value)
    value += quotients[0]
    t = float(value)
    return t, continued_fraction(t, depth=len(quotients))
