"""Linear Talbot effect: Dirac combs at rational times, closed-form evolution, concentration."""

from .base import (
    BumpProfile,
    CoefficientProfile,
    PeriodicFourierProfile,
    SupportError,
    TalbotError,
    bump,
    wrap_angle,
)
from .comb import (
    DiracComb,
    TalbotCarpet,
    dirac_comb_evolution,
    free_evolution_direct,
    linear_talbot_eval,
    support_mask,
    talbot_carpet,
)
from .concentration import ConcentrationResult, concentration_family, concentration_scan
from .poisson import PoissonCheck, gaussian_truncation, poisson_identity_check

__all__ = [
    "BumpProfile",
    "CoefficientProfile",
    "PeriodicFourierProfile",
    "SupportError",
    "TalbotError",
    "bump",
    "wrap_angle",
    "DiracComb",
    "TalbotCarpet",
    "dirac_comb_evolution",
    "free_evolution_direct",
    "linear_talbot_eval",
    "support_mask",
    "talbot_carpet",
    "ConcentrationResult",
    "concentration_family",
    "concentration_scan",
    "PoissonCheck",
    "gaussian_truncation",
    "poisson_identity_check",
]
