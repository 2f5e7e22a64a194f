"""Parallel frames, polygonal filaments and binormal-flow curve reconstruction."""

from .base import (
    CurveState,
    CurveTrajectory,
    FilamentField,
    Frame,
    FrameIntegrityError,
    HasimotoError,
    PolygonSpec,
    check_orthonormality,
    orthonormality_defect,
)
from .frames import (
    TimeRoute,
    curvature_torsion,
    filament_function,
    frame_time_step,
    hat,
    integrate_time_frames,
    magnus_vectors,
    parallel_frame_space,
    prefix_products,
    space_frames_field,
    space_generator,
    time_generator,
)
from .polygon import (
    angle_to_weight,
    corner_spec,
    polygon_curve,
    polygon_filament,
    polygon_tangents,
    reversed_spec,
    weight_to_angle,
)
from .curve import ResidualReport, binormal_residual, integrate_tangent, reconstruct_curve
from .solutions import GaugedField, Helix, SmokeRing, Soliton, StraightLine
from .evolution import FilamentEvolution

__all__ = [
    "CurveState",
    "CurveTrajectory",
    "FilamentField",
    "Frame",
    "FrameIntegrityError",
    "HasimotoError",
    "PolygonSpec",
    "check_orthonormality",
    "orthonormality_defect",
    "TimeRoute",
    "curvature_torsion",
    "filament_function",
    "frame_time_step",
    "hat",
    "integrate_time_frames",
    "magnus_vectors",
    "parallel_frame_space",
    "prefix_products",
    "space_frames_field",
    "space_generator",
    "time_generator",
    "angle_to_weight",
    "corner_spec",
    "polygon_curve",
    "polygon_filament",
    "polygon_tangents",
    "reversed_spec",
    "weight_to_angle",
    "ResidualReport",
    "binormal_residual",
    "integrate_tangent",
    "reconstruct_curve",
    "GaugedField",
    "Helix",
    "SmokeRing",
    "Soliton",
    "StraightLine",
    "FilamentEvolution",
]
