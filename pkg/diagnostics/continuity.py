#!/usr/bin/env python3
"""
Continuity Diagnostics

For a stationary product state the continuity condition div(R^2 grad S) = 0
splits into

    f_r + f_theta + f_phi / sin^2(theta) = 0,

with f_phi = c_phi, f_theta + c_phi / sin^2(theta) = c_theta, f_r = -c_theta
and the fluxes lambda_r = r^2 R_r^2 W_r', lambda_theta = sin(theta) R_theta^2 W_theta',
lambda_phi = R_phi^2 W_phi'. Bound states force every constant to zero.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from core.config import get_settings
from core.exceptions import ConsistencyError, ValidationError
from core.models import (
    AzimuthalParity,
    MotionMode,
    SeparableCentralState,
    StationaryState1D,
    normalize,
)
from core.observability import StructuredLogger
from quantum.potential import node_mask

logger = StructuredLogger("diagnostics.continuity")


def phi_samples(n: Optional[int] = None) -> np.ndarray:
    """n azimuthal samples on [0, 2 pi), offset by a third of a step."""
    n = get_settings().numerics.phi_samples if n is None else n
    return (np.arange(n) + 1.0 / 3.0) * (2.0 * np.pi / n)


def azimuthal_norm(parity: AzimuthalParity) -> float:
    """Integral of R_phi^2 over one turn."""
    return 2.0 * np.pi if parity is AzimuthalParity.CONST else np.pi


def normalized_components(state: SeparableCentralState) -> Tuple[np.ndarray, np.ndarray, float]:
    """Unit-norm R_r (weight r^2), R_theta (weight sin theta) and the R_phi scale."""
    r = state.radial_grid.points
    theta = state.polar_grid.points
    R_r = normalize(state.R_r, state.radial_grid, weight=r ** 2)
    R_theta = normalize(state.R_theta, state.polar_grid, weight=np.sin(theta))
    return R_r, R_theta, 1.0 / np.sqrt(azimuthal_norm(state.parity))


@dataclass(frozen=True, eq=False)
class ActionGradients:
    """dW_r/dr on the radial grid, dW_theta/dtheta on the polar grid, dW_phi/dphi on phi samples."""
    dW_r: np.ndarray
    dW_theta: np.ndarray
    dW_phi: np.ndarray
    phi: np.ndarray

    @classmethod
    def for_state(cls, state: SeparableCentralState, mode: Optional[MotionMode] = None,
                  phi: Optional[np.ndarray] = None) -> "ActionGradients":
        """Gradients implied by the declared mode: all zero at rest, dW_phi = alpha_phi when circulating."""
        mode = state.mode if mode is None else mode
        if mode is None:
            raise ValidationError("A motion mode (rest or circulating) must be declared", field="mode")
        mode = MotionMode(mode)
        phi = phi_samples() if phi is None else np.asarray(phi, dtype=float)
        p_phi = state.alpha_phi if mode is MotionMode.CIRCULATING else 0.0
        return cls(
            dW_r=np.zeros(state.radial_grid.n_points),
            dW_theta=np.zeros(state.polar_grid.n_points),
            dW_phi=np.full(phi.size, p_phi),
            phi=phi,
        )

    def with_radial(self, dW_r: np.ndarray) -> "ActionGradients":
        return ActionGradients(np.asarray(dW_r, dtype=float), self.dW_theta, self.dW_phi, self.phi)


def radial_gradient_for_constant(state: SeparableCentralState, f_r: float) -> np.ndarray:
    """
    dW_r/dr making f_r equal to a prescribed constant:
    r^2 R^2 W_r' = f_r * integral_0^r R^2.
    """
    r = state.radial_grid.points
    R_r, _, _ = normalized_components(state)
    r0 = np.concatenate(([0.0], r))
    density = np.concatenate(([R_r[0] ** 2], R_r ** 2))
    flux = f_r * cumulative_trapezoid(density, r0, initial=0.0)[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        grad = flux / (r ** 2 * R_r ** 2)
    grad[~np.isfinite(grad)] = 0.0
    return grad


@dataclass(frozen=True, eq=False)
class ContinuityFields:
    f_r: np.ndarray
    f_theta: np.ndarray
    f_phi: np.ndarray
    radial_mask: np.ndarray
    polar_mask: np.ndarray
    phi_mask: np.ndarray
    theta: np.ndarray
    phi: np.ndarray


def _periodic_derivative(values: np.ndarray, phi: np.ndarray) -> np.ndarray:
    step = 2.0 * np.pi / phi.size
    return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * step)


def continuity_fields(state: SeparableCentralState,
                      gradients: Optional[ActionGradients] = None) -> ContinuityFields:
    """
    f_r = (1/R_r^2) d/dr(r^2 R_r^2 W_r'), f_theta = (1/(R_theta^2 sin)) d/dtheta(sin R_theta^2 W_theta'),
    f_phi = (1/R_phi^2) d/dphi(R_phi^2 W_phi'), by finite differences and node-masked.
    """
    gradients = ActionGradients.for_state(state) if gradients is None else gradients
    eps = get_settings().numerics.node_epsilon
    r = state.radial_grid.points
    theta = state.polar_grid.points
    phi = gradients.phi
    if gradients.dW_r.shape != r.shape or gradients.dW_theta.shape != theta.shape:
        raise ConsistencyError("Action gradients do not match the state grids")

    R_r, R_theta, scale = normalized_components(state)
    R_phi = scale * state.R_phi(phi)

    radial_mask = node_mask(R_r, eps)
    polar_mask = node_mask(R_theta, eps)
    phi_mask = node_mask(R_phi, eps)

    with np.errstate(divide="ignore", invalid="ignore"):
        f_r = np.gradient(r ** 2 * R_r ** 2 * gradients.dW_r, r, edge_order=2) / R_r ** 2
        f_theta = np.gradient(np.sin(theta) * R_theta ** 2 * gradients.dW_theta, theta,
                              edge_order=2) / (np.sin(theta) * R_theta ** 2)
        f_phi = _periodic_derivative(R_phi ** 2 * gradients.dW_phi, phi) / R_phi ** 2
    f_r[radial_mask] = np.nan
    f_theta[polar_mask] = np.nan
    f_phi[phi_mask] = np.nan
    return ContinuityFields(f_r, f_theta, f_phi, radial_mask, polar_mask, phi_mask, theta, phi)


def continuity_residual(fields: ContinuityFields) -> float:
    """max |f_r + f_theta + f_phi / sin^2(theta)| over unmasked (r, theta, phi) samples."""
    sin2 = np.sin(fields.theta) ** 2
    f_r = fields.f_r[~fields.radial_mask]
    f_theta = fields.f_theta[~fields.polar_mask]
    f_phi = fields.f_phi[~fields.phi_mask]
    sin2 = sin2[~fields.polar_mask]
    if f_r.size == 0 or f_theta.size == 0 or f_phi.size == 0:
        raise ConsistencyError("Every continuity sample is node-masked")
    # the total is separable: its extreme values come from the extremes per axis
    angular = f_theta[:, None] + f_phi[None, :] / sin2[:, None]
    total_hi = np.max(f_r) + np.max(angular)
    total_lo = np.min(f_r) + np.min(angular)
    return float(max(abs(total_hi), abs(total_lo)))


def is_constant(values: np.ndarray) -> bool:
    """std/|mean| below the relative tolerance, or std below the absolute one when mean ~ 0."""
    numerics = get_settings().numerics
    values = values[np.isfinite(values)]
    if values.size == 0:
        return False
    mean, std = float(np.mean(values)), float(np.std(values))
    if abs(mean) <= numerics.constancy_abs_tol:
        return std < numerics.constancy_abs_tol
    return std / abs(mean) < numerics.constancy_rel_tol or std < numerics.constancy_abs_tol


@dataclass(frozen=True)
class SeparationConstants:
    c_phi: float
    c_phi_std: float
    c_theta: float
    c_theta_std: float
    c_theta_radial: float
    c_theta_radial_std: float
    separable: bool

    @property
    def agreement(self) -> float:
        """|c_theta from the polar channel - c_theta from the radial channel|."""
        return abs(self.c_theta - self.c_theta_radial)


def extract_separation_constants(fields: ContinuityFields) -> SeparationConstants:
    """
    c_phi = mean(f_phi), c_theta = mean(f_theta + c_phi/sin^2) and -mean(f_r).

    ``separable`` is False when any channel fails the constancy test.
    """
    f_phi = fields.f_phi[~fields.phi_mask]
    c_phi = float(np.mean(f_phi))
    angular = (fields.f_theta + c_phi / np.sin(fields.theta) ** 2)[~fields.polar_mask]
    radial = -fields.f_r[~fields.radial_mask]
    separable = is_constant(f_phi) and is_constant(angular) and is_constant(radial)
    if not separable:
        logger.warning("Continuity fields are not separable-stationary")
    return SeparationConstants(
        c_phi=c_phi, c_phi_std=float(np.std(f_phi)),
        c_theta=float(np.mean(angular)), c_theta_std=float(np.std(angular)),
        c_theta_radial=float(np.mean(radial)), c_theta_radial_std=float(np.std(radial)),
        separable=separable,
    )


@dataclass(frozen=True)
class FluxConstant:
    mean: float
    std: float


def _flux(values: np.ndarray, mask: np.ndarray) -> FluxConstant:
    kept = values[~mask]
    return FluxConstant(float(np.mean(kept)), float(np.std(kept)))


class Verdict(str, Enum):
    BOUND = "bound"
    UNBOUND = "unbound"


@dataclass(frozen=True, eq=False)
class ContinuityReport:
    """Diagnostic record of the continuity decomposition of one state."""
    fields: ContinuityFields
    constants: SeparationConstants
    lambda_r: FluxConstant
    lambda_theta: FluxConstant
    lambda_phi: FluxConstant
    residual_norm: float
    verdict: Verdict

    @property
    def c_phi(self) -> float:
        return self.constants.c_phi

    @property
    def c_theta(self) -> float:
        return self.constants.c_theta


def continuity_report(state: SeparableCentralState, gradients: Optional[ActionGradients] = None,
                      tolerance: float = 1e-10) -> ContinuityReport:
    """Fields, separation constants, fluxes and the bound/unbound verdict."""
    gradients = ActionGradients.for_state(state) if gradients is None else gradients
    fields = continuity_fields(state, gradients)
    constants = extract_separation_constants(fields)
    R_r, R_theta, scale = normalized_components(state)
    r = state.radial_grid.points
    theta = state.polar_grid.points
    R_phi = scale * state.R_phi(gradients.phi)

    lambda_r = _flux(r ** 2 * R_r ** 2 * gradients.dW_r, fields.radial_mask)
    lambda_theta = _flux(np.sin(theta) * R_theta ** 2 * gradients.dW_theta, fields.polar_mask)
    lambda_phi = _flux(R_phi ** 2 * gradients.dW_phi, fields.phi_mask)
    residual = continuity_residual(fields)

    bound = (
        residual < tolerance
        and abs(constants.c_phi) < tolerance
        and abs(constants.c_theta) < tolerance
        and abs(lambda_r.mean) < tolerance and lambda_r.std < tolerance
        and abs(lambda_theta.mean) < tolerance and lambda_theta.std < tolerance
    )
    verdict = Verdict.BOUND if bound else Verdict.UNBOUND
    logger.debug("Continuity report", residual=residual, c_phi=constants.c_phi,
                 c_theta=constants.c_theta, verdict=verdict.value)
    return ContinuityReport(fields, constants, lambda_r, lambda_theta, lambda_phi, residual, verdict)


class Coordinate(str, Enum):
    RADIAL = "r"
    POLAR = "theta"


@dataclass(frozen=True)
class TurningPointResult:
    """Boundary flux difference and the integral it must equal."""
    lhs: float
    rhs: float
    window: Optional[Tuple[float, float]]
    applicable: bool

    def consistent(self, tolerance: float = 1e-8) -> bool:
        return self.applicable and abs(self.lhs - self.rhs) <= tolerance


def _turning_points(gradient: np.ndarray) -> np.ndarray:
    """Samples where the gradient vanishes or changes sign."""
    zero = np.flatnonzero(gradient == 0.0)
    change = np.flatnonzero(np.sign(gradient[1:]) * np.sign(gradient[:-1]) < 0)
    return np.union1d(zero, change)


def verify_turning_point_argument(state: SeparableCentralState, gradient: np.ndarray, constant: float,
                                  coordinate: Coordinate = Coordinate.RADIAL,
                                  window: Optional[Tuple[int, int]] = None) -> TurningPointResult:
    """
    Integrate the separated continuity equation between turning points.

    Radial: [r^2 R_r^2 W_r'] over the window equals -c_theta * integral R_r^2 dr.
    Polar: [sin R_theta^2 W_theta'] equals -c_phi * integral R_theta^2 / sin dtheta.

    ``window`` is a pair of sample indices; by default the outermost turning
    points of the gradient (the whole grid when the gradient is identically
    zero). Without turning points the result is not applicable.
    """
    R_r, R_theta, _ = normalized_components(state)
    if Coordinate(coordinate) is Coordinate.RADIAL:
        x = state.radial_grid.points
        flux = x ** 2 * R_r ** 2 * gradient
        density = R_r ** 2
    else:
        x = state.polar_grid.points
        flux = np.sin(x) * R_theta ** 2 * gradient
        density = R_theta ** 2 / np.sin(x)
    gradient = np.asarray(gradient, dtype=float)

    if window is None:
        if not np.any(gradient):
            lo, hi = 0, x.size - 1
        else:
            points = _turning_points(gradient)
            if points.size < 2:
                logger.info("No turning-point window", coordinate=str(coordinate))
                return TurningPointResult(float("nan"), float("nan"), None, applicable=False)
            lo, hi = int(points[0]), int(points[-1])
    else:
        lo, hi = window
        if not (abs(gradient[lo]) <= 1e-12 and abs(gradient[hi]) <= 1e-12):
            return TurningPointResult(float("nan"), float("nan"), (x[lo], x[hi]), applicable=False)

    lhs = float(flux[hi] - flux[lo])
    rhs = float(-constant * trapezoid(density[lo:hi + 1], x[lo:hi + 1]))
    return TurningPointResult(lhs, rhs, (float(x[lo]), float(x[hi])), applicable=True)


class FluxVerdict(str, Enum):
    REST = "rest"
    MOVING = "moving"
    NON_STATIONARY = "non-stationary"


@dataclass(frozen=True)
class Flux1D:
    """lambda = R^2 p of a 1D state."""
    mean: float
    std: float
    verdict: FluxVerdict


def continuity_flux_1d(state: StationaryState1D, momentum: Optional[np.ndarray] = None) -> Flux1D:
    """
    d/dx(R^2 p) = 0 makes R^2 p = lambda constant: lambda = 0 is a state at
    rest, lambda != 0 never stops (unbound), a varying lambda is not stationary.
    """
    p = state.momentum if momentum is None else np.asarray(momentum, dtype=float)
    R = normalize(state.R, state.grid)
    flux = R ** 2 * p
    mean, std = float(np.mean(flux)), float(np.std(flux))
    tol = get_settings().numerics.constancy_abs_tol
    if not is_constant(flux):
        verdict = FluxVerdict.NON_STATIONARY
    elif abs(mean) <= tol:
        verdict = FluxVerdict.REST
    else:
        verdict = FluxVerdict.MOVING
    return Flux1D(mean, std, verdict)
