"""Self-similar binormal-flow solutions and the corner angle law."""

from .profile import (
    AngleLawCalibration,
    SelfSimilarField,
    SelfSimilarProfile,
    calibrate_angle_law,
    cfm_integral,
    integrate_profile,
    self_similar_curve,
    selfsim_filament,
)

__all__ = [
    "AngleLawCalibration",
    "SelfSimilarField",
    "SelfSimilarProfile",
    "calibrate_angle_law",
    "cfm_integral",
    "integrate_profile",
    "self_similar_curve",
    "selfsim_filament",
]
