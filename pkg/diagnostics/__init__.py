"""Numerical checks of the continuity, operator and winding identities of stationary states."""

from .continuity import (
    ActionGradients,
    ContinuityReport,
    Coordinate,
    Flux1D,
    FluxVerdict,
    SeparationConstants,
    TurningPointResult,
    Verdict,
    continuity_fields,
    continuity_flux_1d,
    continuity_report,
    continuity_residual,
    extract_separation_constants,
    phi_samples,
    radial_gradient_for_constant,
    verify_turning_point_argument,
)
from .operators import OperatorRatio, OperatorRatioReport, operator_ratios, ratio_samples
from .winding import WindingResult, action_winding, state_winding

__all__ = [
    "ActionGradients",
    "ContinuityReport",
    "Coordinate",
    "Flux1D",
    "FluxVerdict",
    "SeparationConstants",
    "TurningPointResult",
    "Verdict",
    "continuity_fields",
    "continuity_flux_1d",
    "continuity_report",
    "continuity_residual",
    "extract_separation_constants",
    "phi_samples",
    "radial_gradient_for_constant",
    "verify_turning_point_argument",
    "OperatorRatio",
    "OperatorRatioReport",
    "operator_ratios",
    "ratio_samples",
    "WindingResult",
    "action_winding",
    "state_winding",
]
