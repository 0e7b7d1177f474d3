#!/usr/bin/env python3
"""
Force Fields
The total potential V + Q of a stationary state, sampled on the state's
lattices and interpolated locally, with Cartesian forces for the integrator
and the generalized forces of the canonical equations.

For solver eigenstates every sampled Q that agrees with its stationary
continuation (Q = E - V in 1D and the separated forms in the central case)
within the pointwise curvature tolerance is replaced by it; node windows
always are.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from core.exceptions import ConsistencyError, ValidationError
from core.models import (
    MotionMode,
    SeparableCentralState,
    StationaryState1D,
    Units,
)
from core.observability import StructuredLogger
from core.potentials import CentralPotential, Potential1D, evaluate_potential
from quantum.potential import (
    azimuthal_q,
    curvature_tolerance,
    polar_curvature_tolerance,
    polar_q,
    quantum_potential_1d,
    radial_q,
)

from .interpolation import lagrange4

logger = StructuredLogger("dynamics.fields")


def _continued(sampled: np.ndarray, continuation: np.ndarray, tolerance: np.ndarray,
               stationary: bool) -> np.ndarray:
    """Replace verified and masked samples by the continuation."""
    if not stationary:
        return sampled
    masked = ~np.isfinite(sampled)
    with np.errstate(invalid="ignore"):
        verified = np.abs(sampled - continuation) <= tolerance
    return np.where(masked | verified, continuation, sampled)


@dataclass(frozen=True, eq=False)
class ForceField1D:
    """
    H = p^2/2m + V(x) + Q(x) on a 1D lattice; with ``quantum`` off, H = p^2/2m + V.
    """
    potential: Potential1D
    units: Units
    x0: float
    h: float
    bounds: Tuple[float, float]
    total: np.ndarray
    quantum: bool = True
    energy: Optional[float] = None

    @classmethod
    def from_state(cls, state: StationaryState1D, potential: Potential1D, quantum: bool = True,
                   stationary: bool = True) -> "ForceField1D":
        """
        Sample V + Q of ``state``. ``stationary`` enables the continuation;
        without it a query next to a node window raises MaskedSampleError.
        """
        units = state.units
        grid = state.grid
        V = evaluate_potential(potential, grid, units).values
        q_field = quantum_potential_1d(state.R, grid, units)
        tolerance = curvature_tolerance(state.R, grid.spacing, state.energy, units)
        total = _continued(V + q_field.Q, np.full(grid.n_points, state.energy), tolerance, stationary)
        logger.debug("1D force field", quantum=quantum, energy=state.energy,
                     continued=int(np.count_nonzero(total == state.energy)))
        return cls(potential=potential, units=units, x0=grid.x_min, h=grid.spacing,
                   bounds=(grid.x_min, grid.x_max), total=total, quantum=quantum,
                   energy=state.energy)

    @classmethod
    def classical(cls, potential: Potential1D, units: Units = Units(),
                  bounds: Optional[Tuple[float, float]] = None) -> "ForceField1D":
        """Q-off field of a bare potential, bounded by its domain by default."""
        return cls(potential=potential, units=units, x0=0.0, h=1.0,
                   bounds=potential.domain if bounds is None else bounds,
                   total=np.zeros(4), quantum=False)

    @property
    def dimension(self) -> int:
        return 1

    def inside(self, x: np.ndarray) -> bool:
        return self.bounds[0] <= x[0] <= self.bounds[1]

    def potential_and_gradient(self, x: float) -> Tuple[float, float]:
        if self.quantum:
            return lagrange4(self.total, self.x0, self.h, x)
        return float(self.potential.value(x, self.units)), float(self.potential.derivative(x, self.units))

    def force(self, x: np.ndarray) -> np.ndarray:
        return np.array([-self.potential_and_gradient(float(x[0]))[1]])

    def hamiltonian(self, x: np.ndarray, p: np.ndarray) -> float:
        return float(p @ p) / (2.0 * self.units.mass) + self.potential_and_gradient(float(x[0]))[0]

    # the line is its own Cartesian frame
    def to_cartesian(self, q, p) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(q, dtype=float).copy(), np.asarray(p, dtype=float).copy()

    def from_cartesian(self, x, P) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(x, dtype=float).copy(), np.asarray(P, dtype=float).copy()

    def generalized_force(self, q, p) -> np.ndarray:
        return self.force(np.asarray(q, dtype=float))


def spherical_frame(theta: float, phi: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit vectors r_hat, theta_hat, phi_hat."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    return (
        np.array([st * cp, st * sp, ct]),
        np.array([ct * cp, ct * sp, -st]),
        np.array([-sp, cp, 0.0]),
    )


@dataclass(frozen=True, eq=False)
class CentralForceField:
    """
    Central-state potential written as

        V + Q = G_r(r) + G_theta(theta) / r^2 - A / (r^2 sin^2 theta),

    with G_r = V + Q_r + alpha_theta^2/(2m r^2), G_theta = Q_theta +
    (Q_phi + A)/sin^2 - alpha_theta^2/2m and A = alpha_phi^2/2m for a
    circulating state (0 at rest). The continuation makes G_r = E and
    G_theta = 0. With ``quantum`` off only V(r) acts.
    """
    potential: CentralPotential
    units: Units
    radial: Tuple[float, float]
    polar: Tuple[float, float]
    r_max: float
    G_r: np.ndarray
    G_theta: np.ndarray
    circulation: float = 0.0
    quantum: bool = True
    energy: Optional[float] = None
    r_min: float = 0.0

    @classmethod
    def from_state(cls, state: SeparableCentralState, potential: CentralPotential,
                   quantum: bool = True, stationary: bool = True) -> "CentralForceField":
        units = state.units
        rg, pg = state.radial_grid, state.polar_grid
        r = rg.points
        theta = pg.points
        sin2 = np.sin(theta) ** 2
        k_theta = state.alpha_theta_sq / (2.0 * units.mass)

        V = evaluate_potential(potential, rg, units).values
        Q_r, _ = radial_q(state.R_r, rg, units)
        G_r = V + Q_r + k_theta / r ** 2
        tol_r = curvature_tolerance(r * state.R_r, rg.spacing, state.energy, units)
        G_r = _continued(G_r, np.full(r.size, state.energy), tol_r, stationary)

        circulating = state.mode is MotionMode.CIRCULATING
        A = state.alpha_phi ** 2 / (2.0 * units.mass) if circulating else 0.0
        Q_phi = azimuthal_q(state.parity, state.m, units)
        Q_theta, _ = polar_q(state.R_theta, pg, units)
        G_theta = Q_theta + (Q_phi + A) / sin2 - k_theta
        tol_theta = polar_curvature_tolerance(state.R_theta, pg, k_theta, units)
        G_theta = _continued(G_theta, np.zeros(theta.size), tol_theta, stationary)

        logger.debug("Central force field", quantum=quantum, mode=state.mode.value,
                     energy=state.energy, circulation=A)
        return cls(potential=potential, units=units, radial=(r[0], rg.spacing),
                   polar=(theta[0], pg.spacing), r_max=rg.r_max, G_r=G_r, G_theta=G_theta,
                   circulation=A, quantum=quantum, energy=state.energy)

    @classmethod
    def classical(cls, potential: CentralPotential, units: Units = Units(),
                  r_max: float = np.inf, r_min: float = 0.0) -> "CentralForceField":
        """Q-off field of a bare central potential; trajectories stop outside (r_min, r_max]."""
        return cls(potential=potential, units=units, radial=(0.0, 1.0), polar=(0.0, 1.0),
                   r_max=r_max, G_r=np.zeros(4), G_theta=np.zeros(4), quantum=False, r_min=r_min)

    @property
    def dimension(self) -> int:
        return 3

    def inside(self, x: np.ndarray) -> bool:
        r = float(np.linalg.norm(x))
        return max(self.r_min, 0.0) < r <= self.r_max and np.hypot(x[0], x[1]) > 0.0

    def spherical_gradient(self, r: float, theta: float) -> Tuple[float, float, float]:
        """(V + Q, d/dr, d/dtheta) at (r, theta)."""
        if not self.quantum:
            return (float(self.potential.value(r, self.units)),
                    float(self.potential.derivative(r, self.units)), 0.0)
        g_r, dg_r = lagrange4(self.G_r, self.radial[0], self.radial[1], r)
        g_t, dg_t = lagrange4(self.G_theta, self.polar[0], self.polar[1], theta)
        s, c = np.sin(theta), np.cos(theta)
        A = self.circulation
        value = g_r + g_t / r ** 2 - A / (r * r * s * s)
        d_r = dg_r - 2.0 * g_t / r ** 3 + 2.0 * A / (r ** 3 * s * s)
        d_theta = dg_t / r ** 2 + 2.0 * A * c / (r * r * s ** 3)
        return float(value), float(d_r), float(d_theta)

    def force(self, x: np.ndarray) -> np.ndarray:
        r, theta, phi = cartesian_to_spherical(x)
        _, d_r, d_theta = self.spherical_gradient(r, theta)
        r_hat, theta_hat, _ = spherical_frame(theta, phi)
        return -(d_r * r_hat + (d_theta / r) * theta_hat)

    def hamiltonian(self, x: np.ndarray, P: np.ndarray) -> float:
        r, theta, _ = cartesian_to_spherical(x)
        return float(P @ P) / (2.0 * self.units.mass) + self.spherical_gradient(r, theta)[0]

    def to_cartesian(self, q, p) -> Tuple[np.ndarray, np.ndarray]:
        """(r, theta, phi), (p_r, p_theta, p_phi) to Cartesian position and momentum."""
        r, theta, phi = (float(v) for v in q)
        p_r, p_theta, p_phi = (float(v) for v in p)
        r_hat, theta_hat, phi_hat = spherical_frame(theta, phi)
        P = p_r * r_hat + (p_theta / r) * theta_hat + (p_phi / (r * np.sin(theta))) * phi_hat
        return r * r_hat, P

    def from_cartesian(self, x, P) -> Tuple[np.ndarray, np.ndarray]:
        r, theta, phi = cartesian_to_spherical(x)
        r_hat, theta_hat, phi_hat = spherical_frame(theta, phi)
        momenta = np.array([P @ r_hat, r * (P @ theta_hat), r * np.sin(theta) * (P @ phi_hat)])
        return np.array([r, theta, phi]), momenta

    def generalized_force(self, q, p) -> np.ndarray:
        """-dH/d(r, theta, phi), centrifugal terms included."""
        r, theta, _ = (float(v) for v in q)
        _, p_theta, p_phi = (float(v) for v in p)
        m = self.units.mass
        s, c = np.sin(theta), np.cos(theta)
        _, d_r, d_theta = self.spherical_gradient(r, theta)
        return np.array([
            -d_r + p_theta ** 2 / (m * r ** 3) + p_phi ** 2 / (m * r ** 3 * s * s),
            -d_theta + p_phi ** 2 * c / (m * r * r * s ** 3),
            0.0,
        ])


def cartesian_to_spherical(x: np.ndarray) -> Tuple[float, float, float]:
    r = float(np.linalg.norm(x))
    theta = float(np.arccos(np.clip(x[2] / r, -1.0, 1.0)))
    phi = float(np.arctan2(x[1], x[0])) % (2.0 * np.pi)
    return r, theta, phi


ForceField = Union[ForceField1D, CentralForceField]


def force_field(state: Union[StationaryState1D, SeparableCentralState],
                potential: Union[Potential1D, CentralPotential], quantum: bool = True,
                stationary: bool = True) -> ForceField:
    """Force field of a 1D or central state."""
    if isinstance(state, StationaryState1D):
        if not isinstance(potential, Potential1D):
            raise ConsistencyError("A 1D state needs a 1D potential")
        return ForceField1D.from_state(state, potential, quantum, stationary)
    if isinstance(state, SeparableCentralState):
        if not isinstance(potential, CentralPotential):
            raise ConsistencyError("A central state needs a central potential")
        return CentralForceField.from_state(state, potential, quantum, stationary)
    raise ValidationError(f"Unsupported state type {type(state).__name__}", field="state")


def effective_force(field: ForceField, q, p=None) -> np.ndarray:
    """
    Generalized forces -dH/dq at a phase point: -d(V+Q)/dx on a line and
    (p_r, p_theta, p_phi) rates, centrifugal terms included, for a central
    state. Momenta default to zero.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.zeros(q.size) if p is None else np.atleast_1d(np.asarray(p, dtype=float))
    if q.size != field.dimension or p.size != field.dimension:
        raise ValidationError(f"Phase point must have {field.dimension} coordinates and momenta",
                              field="q")
    return field.generalized_force(q, p)
