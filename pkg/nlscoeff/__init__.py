"""Coefficient system of the Dirac-superposition ansatz for the cubic NLS."""

from .base import (
    ANCHOR_TIME,
    NLS_COUPLING,
    CoefficientError,
    CoeffState,
    IntegrationError,
    NonresonantTriple,
    SmallnessError,
    SupportViolation,
)
from .system import (
    dual_system_rhs,
    nonlinear_bracket,
    resonant_partition,
    system_rhs,
    system_rhs_direct,
)
from .evolve import (
    CoefficientIntegrator,
    CoeffTrajectory,
    anchor_state,
    evolve_coeffs,
    evolve_dual,
)
from .field import evaluate_u, pseudo_conformal, superpose, superpose_at
from .talbot_profile import NonlinearTalbotResult, check_support, lattice_distance, nonlinear_talbot_profile

__all__ = [
    "ANCHOR_TIME",
    "NLS_COUPLING",
    "CoefficientError",
    "CoeffState",
    "IntegrationError",
    "NonresonantTriple",
    "SmallnessError",
    "SupportViolation",
    "dual_system_rhs",
    "nonlinear_bracket",
    "resonant_partition",
    "system_rhs",
    "system_rhs_direct",
    "CoefficientIntegrator",
    "CoeffTrajectory",
    "anchor_state",
    "evolve_coeffs",
    "evolve_dual",
    "evaluate_u",
    "pseudo_conformal",
    "superpose",
    "superpose_at",
    "NonlinearTalbotResult",
    "check_support",
    "lattice_distance",
    "nonlinear_talbot_profile",
]
