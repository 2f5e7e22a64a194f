"""Polygonal filaments evolved by the binormal flow, and the diagnostics run on them."""

from .base import (
    STAGES,
    AnchorSweep,
    CornerTrajectory,
    EnergyDensity,
    FourierGrowth,
    PipelineError,
    PolygonRun,
    ReversalCheck,
    TraceConvergence,
)
from .pipeline import (
    CoefficientField,
    anchor_sweep,
    dyadic_times,
    extrapolated_trace,
    polygon_trace_angles,
    reversal_consistency,
    simulate_polygon,
    symmetric_grid,
    trace_convergence,
    track_point,
)
from .corner import (
    CornerDeviation,
    corner_convergence,
    corner_vs_riemann,
    riemann_polygon,
    riemann_reference,
)
from .growth import (
    band_means,
    energy_closed_form,
    energy_density,
    tangent_derivative,
    tangent_fourier_growth,
    tukey_window,
    windowed_transform,
)

__all__ = [
    "STAGES",
    "AnchorSweep",
    "CornerTrajectory",
    "EnergyDensity",
    "FourierGrowth",
    "PipelineError",
    "PolygonRun",
    "ReversalCheck",
    "TraceConvergence",
    "CoefficientField",
    "anchor_sweep",
    "dyadic_times",
    "extrapolated_trace",
    "polygon_trace_angles",
    "reversal_consistency",
    "simulate_polygon",
    "symmetric_grid",
    "trace_convergence",
    "track_point",
    "CornerDeviation",
    "corner_convergence",
    "corner_vs_riemann",
    "riemann_polygon",
    "riemann_reference",
    "band_means",
    "energy_closed_form",
    "energy_density",
    "tangent_derivative",
    "tangent_fourier_growth",
    "tukey_window",
    "windowed_transform",
]
