"""Winding of the action around a closed azimuthal loop."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from core.config import get_settings
from core.exceptions import ValidationError
from core.models import SeparableCentralState, Units
from core.observability import StructuredLogger

logger = StructuredLogger("diagnostics.winding")

LOOP_SAMPLES = 257


@dataclass(frozen=True)
class WindingResult:
    winding: float
    nearest: int
    distance: float
    integer: bool


def action_winding(dS_dphi, phi, units: Units = Units(), tolerance: Optional[float] = None) -> WindingResult:
    """
    Loop integral of dS/dphi over one turn divided by 2 pi hbar.

    ``phi`` is either a closed path from 0 to 2 pi including both ends, or a
    uniform open path on [0, 2 pi) that is closed periodically.

    Raises:
        ValidationError: The path does not close
    """
    tolerance = get_settings().numerics.winding_tolerance if tolerance is None else tolerance
    phi = np.asarray(phi, dtype=float)
    gradient = np.broadcast_to(np.asarray(dS_dphi, dtype=float), phi.shape)
    if phi.size < 2:
        raise ValidationError("A loop needs at least two samples", field="phi")
    span = phi[-1] - phi[0]
    step = np.diff(phi)
    if np.isclose(span, 2.0 * np.pi, rtol=0.0, atol=1e-12):
        loop = trapezoid(gradient, phi)
    elif np.allclose(step, 2.0 * np.pi / phi.size, rtol=0.0, atol=1e-12):
        loop = trapezoid(np.append(gradient, gradient[0]), np.append(phi, phi[0] + 2.0 * np.pi))
    else:
        raise ValidationError("Azimuthal path is not a closed loop", field="phi",
                              context={"start": float(phi[0]), "end": float(phi[-1])})

    winding = float(loop / (2.0 * np.pi * units.hbar))
    nearest = int(round(winding))
    distance = abs(winding - nearest)
    integer = distance < tolerance
    if not integer:
        logger.warning("Non-integer action winding", winding=winding)
    return WindingResult(winding, nearest, distance, integer)


def state_winding(state: SeparableCentralState, tolerance: Optional[float] = None) -> WindingResult:
    """Winding of S = p_phi * phi - E t around the z axis."""
    phi = np.linspace(0.0, 2.0 * np.pi, LOOP_SAMPLES)
    return action_winding(np.full(phi.size, state.p_phi), phi, state.units, tolerance)
