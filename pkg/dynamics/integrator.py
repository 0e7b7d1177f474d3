#!/usr/bin/env python3
"""
Canonical Integration
Velocity-Verlet (Stormer-Verlet) integration of Hamilton's equations under
V + Q in Cartesian coordinates; phase points are recorded in the field's
own coordinates ((x) or (r, theta, phi)).
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from core.exceptions import ValidationError
from core.observability import StructuredLogger, measure_performance

from .fields import ForceField

logger = StructuredLogger("dynamics.integrator")

LINE_COORDINATES = ("x",)
SPHERICAL_COORDINATES = ("r", "theta", "phi")


@dataclass(frozen=True)
class PhasePoint:
    """Coordinates and conjugate momenta at time t."""
    q: Tuple[float, ...]
    p: Tuple[float, ...]
    t: float = 0.0

    def __post_init__(self):
        q = tuple(float(v) for v in np.atleast_1d(self.q))
        p = tuple(float(v) for v in np.atleast_1d(self.p))
        if len(q) != len(p):
            raise ValidationError("Phase point needs one momentum per coordinate", field="p")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @classmethod
    def at_rest(cls, *q: float) -> "PhasePoint":
        return cls(q=q, p=(0.0,) * len(q))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded phase points (one row per step, initial point first) and H per step."""
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    H: np.ndarray
    coordinates: Tuple[str, ...]
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return self.t.size - 1

    @property
    def exited(self) -> bool:
        return bool(self.metadata.get("exited", False))

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(q=tuple(self.q[i]), p=tuple(self.p[i]), t=float(self.t[i]))

    @property
    def cartesian(self) -> np.ndarray:
        """Cartesian positions per step."""
        return self.metadata["cartesian"]

    def max_displacement(self) -> float:
        """Largest Cartesian distance from the initial position."""
        x = self.cartesian
        return float(np.max(np.linalg.norm(x - x[0], axis=1)))


@measure_performance("integrate_canonical", logger)
def integrate_canonical(field_: ForceField, initial: PhasePoint, dt: float, n_steps: int,
                        state_id: Optional[str] = None) -> Trajectory:
    """
    Integrate n_steps of size dt from ``initial``.

    Leaving the field's domain stops the integration; the truncated
    trajectory carries ``exited`` in its metadata. A negative dt runs the
    flow backwards.

    Raises:
        ValidationError: dt == 0, n_steps < 1, or initial point outside the domain
    """
    if dt == 0 or not np.isfinite(dt):
        raise ValidationError("dt must be a nonzero finite number", field="dt")
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1", field="n_steps")
    if len(initial.q) != field_.dimension:
        raise ValidationError(f"Initial point must have {field_.dimension} coordinates", field="initial")

    mass = field_.units.mass
    x, P = field_.to_cartesian(initial.q, initial.p)
    if not field_.inside(x):
        raise ValidationError("Initial point lies outside the integration domain", field="initial")

    xs = np.empty((n_steps + 1, x.size))
    qs = np.empty((n_steps + 1, x.size))
    ps = np.empty((n_steps + 1, x.size))
    H = np.empty(n_steps + 1)
    xs[0] = x
    qs[0], ps[0] = np.asarray(initial.q), np.asarray(initial.p)
    H[0] = field_.hamiltonian(x, P)

    F = field_.force(x)
    last = n_steps
    exited = False
    for i in range(1, n_steps + 1):
        P_half = P + 0.5 * dt * F
        x_next = x + dt * P_half / mass
        if not field_.inside(x_next):
            last = i - 1
            exited = True
            logger.warning("Trajectory left the domain", step=i, state_id=state_id)
            break
        x = x_next
        F = field_.force(x)
        P = P_half + 0.5 * dt * F
        xs[i] = x
        qs[i], ps[i] = field_.from_cartesian(x, P)
        H[i] = field_.hamiltonian(x, P)

    coordinates = LINE_COORDINATES if field_.dimension == 1 else SPHERICAL_COORDINATES
    times = initial.t + dt * np.arange(last + 1)
    return Trajectory(
        t=times, q=qs[:last + 1], p=ps[:last + 1], H=H[:last + 1], coordinates=coordinates,
        metadata={
            "state_id": state_id, "quantum": field_.quantum, "dt": dt, "steps": last,
            "requested_steps": n_steps, "exited": exited, "cartesian": xs[:last + 1],
        },
    )


@dataclass(frozen=True, eq=False)
class EnergyDrift:
    max_deviation: float
    rate: np.ndarray

    @property
    def max_rate(self) -> float:
        return float(np.max(np.abs(self.rate)))


def energy_drift(trajectory: Trajectory) -> EnergyDrift:
    """max |H - H0| and a finite-difference dH/dt series."""
    if trajectory.t.size < 2:
        raise ValidationError("Energy drift needs at least two recorded steps", field="trajectory")
    deviation = float(np.max(np.abs(trajectory.H - trajectory.H[0])))
    return EnergyDrift(deviation, np.gradient(trajectory.H, trajectory.t))
