"""Shared numerics: complex sequences, Gauss sums, rational times, continued fractions."""

from .sequences import ComplexSeq, japanese_bracket, weighted_norm
from .gauss import GAUSS_SUM_MAX_Q, RationalTime, gauss_sum, gauss_sum_table
from .continued import ContinuedFractionExpansion, continued_fraction, liouville_time

__all__ = [
    "ComplexSeq",
    "japanese_bracket",
    "weighted_norm",
    "GAUSS_SUM_MAX_Q",
    "RationalTime",
    "gauss_sum",
    "gauss_sum_table",
    "ContinuedFractionExpansion",
    "continued_fraction",
    "liouville_time",
]
