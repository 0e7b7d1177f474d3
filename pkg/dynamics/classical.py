"""Classical (Q = 0) reference orbits in a central potential."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from core.exceptions import InvalidParameterError, NoClassicalOrbitError
from core.models import Units
from core.observability import StructuredLogger
from core.potentials import CentralPotential

from .fields import CentralForceField
from .integrator import PhasePoint, Trajectory, integrate_canonical

logger = StructuredLogger("dynamics.classical")

# barrier-free orbits are stopped at this fraction of the turning radius
FALL_FLOOR = 0.1


def classical_effective_potential(potential: CentralPotential, angular_momentum: float, r,
                                  units: Units = Units()) -> np.ndarray:
    """V(r) + l^2 / (2 m r^2)."""
    r = np.asarray(r, dtype=float)
    return potential.value(r, units) + angular_momentum ** 2 / (2.0 * units.mass * r ** 2)


@dataclass(frozen=True)
class CircularOrbit:
    radius: float
    angular_momentum: float
    energy: float
    period: float

    def initial_point(self) -> PhasePoint:
        """Equatorial start (r, pi/2, 0) with p_phi = l."""
        return PhasePoint(q=(self.radius, 0.5 * np.pi, 0.0), p=(0.0, 0.0, self.angular_momentum))


def circular_orbit(potential: CentralPotential, radius: float, units: Units = Units()) -> CircularOrbit:
    """
    Circular orbit of radius r: dV_eff/dr = 0 gives l^2 = m r^3 V'(r) and
    E = V(r) + l^2/(2 m r^2).
    """
    if not radius > 0:
        raise InvalidParameterError("radius", radius, "radius > 0")
    slope = float(potential.derivative(radius, units))
    if not slope > 0:
        raise InvalidParameterError("radius", radius, "a radius where the potential is attractive (dV/dr > 0)")
    l = float(np.sqrt(units.mass * radius ** 3 * slope))
    energy = float(potential.value(radius, units)) + l * l / (2.0 * units.mass * radius ** 2)
    return CircularOrbit(radius, l, energy, 2.0 * np.pi * units.mass * radius ** 2 / l)


@dataclass(frozen=True)
class ClassicalReference:
    """
    Bound classical orbit with energy E and angular momentum l.

    ``circular_radius`` is None when the effective potential has no interior
    minimum (l = 0 in an attractive well); the inner turning point is then
    the origin.
    """
    energy: float
    angular_momentum: float
    circular_radius: Optional[float]
    minimum: float
    turning_points: Tuple[float, float]


def classical_reference(potential: CentralPotential, energy: float, angular_momentum: float,
                        units: Units = Units(), r_bounds: Optional[Tuple[float, float]] = None) -> ClassicalReference:
    """
    Minimum of the effective potential and the radial turning points of the
    orbit with energy E.

    Raises:
        InvalidParameterError: Negative or non-finite angular momentum
        NoClassicalOrbitError: E lies below the effective-potential minimum
    """
    if not angular_momentum >= 0:
        raise InvalidParameterError("angular_momentum", angular_momentum, ">= 0")
    lo, hi = r_bounds or (1e-6, 1e4)

    def v_eff(r):
        return float(classical_effective_potential(potential, angular_momentum, r, units))

    best = minimize_scalar(v_eff, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    r_c, v_min = float(best.x), float(best.fun)
    if v_eff(lo) <= v_min:
        # no centrifugal barrier: the orbit falls through the origin
        v_min = v_eff(lo)
        if energy < v_min or v_eff(hi) < energy:
            raise NoClassicalOrbitError(energy=energy, minimum=v_min)
        outer = brentq(lambda r: v_eff(r) - energy, lo, hi)
        return ClassicalReference(energy, angular_momentum, None, v_min, (0.0, float(outer)))
    if energy < v_min:
        raise NoClassicalOrbitError(energy=energy, minimum=v_min)
    if energy == v_min:
        return ClassicalReference(energy, angular_momentum, r_c, v_min, (r_c, r_c))
    if v_eff(hi) < energy:
        raise NoClassicalOrbitError(energy=energy, minimum=v_min)
    inner = brentq(lambda r: v_eff(r) - energy, lo, r_c)
    outer = brentq(lambda r: v_eff(r) - energy, r_c, hi)
    return ClassicalReference(energy, angular_momentum, r_c, v_min, (float(inner), float(outer)))


@dataclass(frozen=True, eq=False)
class ClassicalOrbit:
    """Integrated Q = 0 orbit with the drift of its constants of motion."""
    reference: ClassicalReference
    trajectory: Trajectory
    p_phi_drift: float
    alpha_theta_sq_drift: float
    energy_drift: float

    @property
    def r_range(self) -> Tuple[float, float]:
        r = self.trajectory.q[:, 0]
        return float(np.min(r)), float(np.max(r))


def classical_orbit(potential: CentralPotential, energy: float, angular_momentum: float,
                    units: Units = Units(), dt: float = 1e-3, n_steps: int = 10_000,
                    inclination: float = 0.0,
                    r_bounds: Optional[Tuple[float, float]] = None) -> ClassicalOrbit:
    """
    Integrate the Q-off Hamiltonian from the outer turning point.

    The start is equatorial with p_theta = l sin(inclination) and
    p_phi = l cos(inclination), so alpha_theta^2 = l^2. Orbits without a
    centrifugal barrier stop at FALL_FLOOR times the turning radius.
    The drifts are max |p_phi - p_phi(0)|, max |alpha_theta^2 - l^2| and
    max |H - E| along the trajectory.
    """
    reference = classical_reference(potential, energy, angular_momentum, units, r_bounds)
    r0 = reference.turning_points[1]
    l = angular_momentum
    start = PhasePoint(q=(r0, 0.5 * np.pi, 0.0), p=(0.0, l * np.sin(inclination), l * np.cos(inclination)))
    floor = FALL_FLOOR * r0 if reference.circular_radius is None else 0.0
    field_ = CentralForceField.classical(potential, units, r_min=floor)
    trajectory = integrate_canonical(field_, start, dt, n_steps, f"classical E={energy:g} l={l:g}")

    theta = trajectory.q[:, 1]
    p_theta, p_phi = trajectory.p[:, 1], trajectory.p[:, 2]
    alpha_sq = p_theta ** 2 + p_phi ** 2 / np.sin(theta) ** 2
    orbit = ClassicalOrbit(
        reference=reference, trajectory=trajectory,
        p_phi_drift=float(np.max(np.abs(p_phi - p_phi[0]))),
        alpha_theta_sq_drift=float(np.max(np.abs(alpha_sq - l * l))),
        energy_drift=float(np.max(np.abs(trajectory.H - energy))),
    )
    logger.debug("Classical orbit", energy=energy, angular_momentum=l, steps=trajectory.steps,
                 exited=trajectory.exited, energy_drift=orbit.energy_drift)
    return orbit
