"""Quantization by shooting: quantum potential, 1D and central eigensolvers."""

from .numerov import Direction, EigenvalueSearch, SturmProblem, matched_shot, stitch
from .potential import (
    QField1D,
    QFieldSpherical,
    curvature_tolerance,
    quantum_potential_1d,
    quantum_potential_spherical,
)
from .eigensolver import (
    ShootingConfig,
    SpectrumResult1D,
    shoot,
    solve_bound_states_1d,
    stationarity_residual,
)
from .central import (
    AzimuthalSolution,
    CentralSpectrum,
    PolarSolution,
    RadialSolution,
    assemble_state,
    circulating_azimuthal,
    solve_azimuthal,
    solve_channels,
    solve_polar,
    solve_central_spectrum,
    solve_radial,
)

__all__ = [
    "Direction",
    "EigenvalueSearch",
    "SturmProblem",
    "matched_shot",
    "stitch",
    "QField1D",
    "QFieldSpherical",
    "curvature_tolerance",
    "quantum_potential_1d",
    "quantum_potential_spherical",
    "ShootingConfig",
    "SpectrumResult1D",
    "shoot",
    "solve_bound_states_1d",
    "stationarity_residual",
    "AzimuthalSolution",
    "CentralSpectrum",
    "PolarSolution",
    "RadialSolution",
    "assemble_state",
    "circulating_azimuthal",
    "solve_azimuthal",
    "solve_channels",
    "solve_polar",
    "solve_central_spectrum",
    "solve_radial",
]
