"""Generalized Riemann function R_{x0}(t): series, F kernel, near-rational expansion, intermittency, Holder exponents."""

from .base import (
    FlatnessResult,
    HolderEstimate,
    NearRationalResult,
    QuadratureError,
    RiemannError,
    RiemannValue,
)
from .holder import GOLDEN_TIME, SpectrumPanel, holder_estimate, panel_times, spectrum_panel
from .intermittency import (
    dyadic_block_lp,
    flatness,
    flatness_scan,
    is_rational_location,
    reference_eta,
    structure_exponents,
)
from .kernel import F_ZERO, F_closed_form, F_kernel, expansion_window, near_rational_expansion
from .series import RiemannSeries, bernoulli_cosine_sum, eval_R, riemann_trajectory, torsion_series

__all__ = [
    "FlatnessResult",
    "HolderEstimate",
    "NearRationalResult",
    "QuadratureError",
    "RiemannError",
    "RiemannValue",
    "GOLDEN_TIME",
    "SpectrumPanel",
    "holder_estimate",
    "panel_times",
    "spectrum_panel",
    "dyadic_block_lp",
    "flatness",
    "flatness_scan",
    "is_rational_location",
    "reference_eta",
    "structure_exponents",
    "F_ZERO",
    "F_closed_form",
    "F_kernel",
    "expansion_window",
    "near_rational_expansion",
    "RiemannSeries",
    "bernoulli_cosine_sum",
    "eval_R",
    "riemann_trajectory",
    "torsion_series",
]
