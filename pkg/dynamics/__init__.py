"""Hamilton's canonical equations under V + Q, and the classical (Q = 0) comparison."""

from .classical import (
    CircularOrbit,
    ClassicalOrbit,
    ClassicalReference,
    circular_orbit,
    classical_orbit,
    classical_reference,
)
from .fields import CentralForceField, ForceField1D, effective_force, force_field
from .integrator import EnergyDrift, PhasePoint, Trajectory, energy_drift, integrate_canonical
from .interpolation import lagrange4
from .rest import (
    CirculationResult,
    RestCheckReport,
    RestVerdict,
    circulation_check,
    rest_check,
    sample_points,
)

__all__ = [
    "CircularOrbit",
    "ClassicalOrbit",
    "ClassicalReference",
    "circular_orbit",
    "classical_orbit",
    "classical_reference",
    "CentralForceField",
    "ForceField1D",
    "effective_force",
    "force_field",
    "EnergyDrift",
    "PhasePoint",
    "Trajectory",
    "energy_drift",
    "integrate_canonical",
    "lagrange4",
    "CirculationResult",
    "RestCheckReport",
    "RestVerdict",
    "circulation_check",
    "rest_check",
    "sample_points",
]
