"""Core infrastructure and domain model for Bohmian quantization."""

from .exceptions import *
from .observability import *
from .config import *
from .models import *
from .potentials import *

__all__ = [
    # Exceptions
    "QuantizationError",
    "ValidationError",
    "InvalidParameterError",
    "GridSizeError",
    "DomainError",
    "DegenerateInputError",
    "ConsistencyError",
    "ConfigurationError",
    "ConfigFileError",
    "ConvergenceError",
    "MaskedSampleError",
    "NoClassicalOrbitError",
    "DiagnosticFailure",
    # Model
    "Units",
    "Grid1D",
    "PolarGrid",
    "RadialGrid",
    "StationaryState1D",
    "SeparableCentralState",
    "AzimuthalParity",
    "MotionMode",
    "normalize",
    "count_nodes",
    # Potentials
    "Potential1D",
    "CentralPotential",
    "PotentialKind",
    "SampledPotential",
    "evaluate_potential",
    # Infrastructure
    "Settings",
    "get_settings",
    "StructuredLogger",
    "configure_logging",
    "measure_performance",
]
