#!/usr/bin/env python3
"""
Operator-Ratio Diagnostics

Builds psi = R exp(iS/hbar) of a product state on a sparse tensor sample set
and evaluates H psi / psi, L^2 psi / psi, Lz^2 psi / psi and Lz psi / psi.
The real parts of the first three are constant and equal to E, alpha_theta^2
and alpha_phi^2 for a bound state; Lz psi / psi is constant only when the
state circulates.
"""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from core.config import get_settings
from core.exceptions import DegenerateInputError
from core.models import MotionMode, SeparableCentralState
from core.observability import StructuredLogger, measure_performance
from core.potentials import CentralPotential, evaluate_potential
from quantum.potential import polar_laplacian_ratio, radial_laplacian_ratio

from .continuity import ActionGradients, continuity_report, phi_samples

logger = StructuredLogger("diagnostics.operators")

MAX_RADIAL_SAMPLES = 400


@dataclass(frozen=True, eq=False)
class RatioSampleSet:
    """Tensor sample set (r, theta, phi) and the samples that take part."""
    radial_index: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    keep: np.ndarray

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.keep))


def ratio_samples(state: SeparableCentralState, phi: Optional[np.ndarray] = None) -> RatioSampleSet:
    """
    Radial samples thinned to at most a few hundred, every polar sample and
    the offset phi samples, restricted to a probability weight
    (r R_r R_theta R_phi)^2 sin(theta) of at least density_floor * max.
    """
    numerics = get_settings().numerics
    phi = phi_samples() if phi is None else np.asarray(phi, dtype=float)
    stride = max(1, int(np.ceil(state.radial_grid.n_points / MAX_RADIAL_SAMPLES)))
    index = np.arange(0, state.radial_grid.n_points, stride)
    r = state.radial_grid.points[index]
    theta = state.polar_grid.points

    weight = (
        (r * state.R_r[index])[:, None, None] ** 2
        * (state.R_theta ** 2 * np.sin(theta))[None, :, None]
        * (state.R_phi(phi) ** 2)[None, None, :]
    )
    peak = weight.max()
    if not peak > 0:
        raise DegenerateInputError("Operator ratios of an identically zero state")
    keep = weight >= numerics.density_floor * peak
    return RatioSampleSet(index, r, theta, phi, keep)


@dataclass(frozen=True, eq=False)
class OperatorRatio:
    """Statistics of one ratio O psi / psi over the kept samples."""
    name: str
    real_mean: float
    real_max_deviation: float
    imag_max: float
    predicted: float
    predicted_imag: float
    field: np.ndarray

    def is_constant(self, tolerance: float) -> bool:
        """Real-part spread within a relative tolerance."""
        floor = get_settings().numerics.constancy_abs_tol
        return self.real_max_deviation <= tolerance * max(abs(self.real_mean), abs(self.predicted)) + floor

    def matches(self, tolerance: float) -> bool:
        """Constant and equal to the predicted value."""
        floor = get_settings().numerics.constancy_abs_tol
        scale = max(abs(self.predicted), abs(self.real_mean))
        return self.is_constant(tolerance) and abs(self.real_mean - self.predicted) <= tolerance * scale + floor


@dataclass(frozen=True, eq=False)
class OperatorRatioReport:
    hamiltonian: OperatorRatio
    angular_sq: OperatorRatio
    lz_sq: OperatorRatio
    lz: OperatorRatio
    samples: RatioSampleSet
    tolerance: float

    def ratios(self) -> Dict[str, OperatorRatio]:
        return {r.name: r for r in (self.hamiltonian, self.angular_sq, self.lz_sq, self.lz)}

    @property
    def eigen_consistent(self) -> bool:
        """H, L^2 and Lz^2 ratios match E, alpha_theta^2, alpha_phi^2 with imaginary parts below 1e-8."""
        return all(
            ratio.matches(self.tolerance) and ratio.imag_max < 1e-8
            for ratio in (self.hamiltonian, self.angular_sq, self.lz_sq)
        )


def _summarize(name: str, values: np.ndarray, keep: np.ndarray, predicted: float,
               predicted_imag: float) -> OperatorRatio:
    kept = values[keep]
    real = kept.real
    mean = float(np.mean(real))
    return OperatorRatio(
        name=name,
        real_mean=mean,
        real_max_deviation=float(np.max(np.abs(real - mean))),
        imag_max=float(np.max(np.abs(kept.imag - predicted_imag))),
        predicted=predicted,
        predicted_imag=predicted_imag,
        field=np.where(keep, values, np.nan + 0j),
    )


@measure_performance("operator_ratios", logger)
def operator_ratios(state: SeparableCentralState, potential: CentralPotential,
                    mode: Optional[MotionMode] = None) -> OperatorRatioReport:
    """
    Finite-difference operator ratios on psi = R exp(iS/hbar) at t = 0.

    Radial and polar derivatives are second-order differences of the sampled
    amplitudes; phi derivatives are closed form. The tolerance is
    50 * max(h_r, h_theta)^2, relative.

    Raises:
        DegenerateInputError: Every sample is masked
    """
    units = state.units
    hbar = units.hbar
    mode = MotionMode(state.mode if mode is None else mode)
    samples = ratio_samples(state)
    gradients = ActionGradients.for_state(state, mode, samples.phi)
    continuity = continuity_report(state, gradients)

    A_r_full, radial_mask = radial_laplacian_ratio(state.R_r, state.radial_grid)
    A_r = A_r_full[samples.radial_index]
    A_theta, polar_mask = polar_laplacian_ratio(state.R_theta, state.polar_grid)

    # psi_phi = R_phi exp(i p phi / hbar) in closed form
    p = gradients.dW_phi
    R_phi = state.R_phi(samples.phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = state.R_phi(samples.phi, order=1) / R_phi
        d2 = state.R_phi(samples.phi, order=2) / R_phi
        B_phi = d1 + 1j * p / hbar
        A_phi = d2 + 2j * (p / hbar) * d1 - (p / hbar) ** 2

    keep = (
        samples.keep
        & ~radial_mask[samples.radial_index][:, None, None]
        & ~polar_mask[None, :, None]
        & np.isfinite(A_phi)[None, None, :]
    )
    if not np.any(keep):
        raise DegenerateInputError("Every operator-ratio sample is node-masked")

    r = samples.r[:, None, None]
    sin2 = np.sin(samples.theta)[None, :, None] ** 2
    V = evaluate_potential(potential, state.radial_grid, units).values[samples.radial_index]

    angular = A_theta[None, :, None] + A_phi[None, None, :] / sin2
    laplacian = A_r[:, None, None] + angular / r ** 2
    H_ratio = -units.kinetic * laplacian + V[:, None, None]
    L2_ratio = np.broadcast_to(-hbar ** 2 * angular, keep.shape)
    Lz2_ratio = np.broadcast_to(-hbar ** 2 * A_phi[None, None, :], keep.shape)
    Lz_ratio = np.broadcast_to(-1j * hbar * B_phi[None, None, :], keep.shape)

    if mode is MotionMode.CIRCULATING:
        alpha_phi = state.alpha_phi
    else:
        alpha_phi = state.m * hbar
    c_theta, c_phi = continuity.c_theta, continuity.c_phi
    h = max(state.radial_grid.spacing, state.polar_grid.spacing)
    tolerance = 50.0 * h * h

    report = OperatorRatioReport(
        hamiltonian=_summarize("H", H_ratio, keep, state.energy, 0.0),
        angular_sq=_summarize("L2", L2_ratio, keep, state.alpha_theta_sq, -hbar * c_theta),
        lz_sq=_summarize("Lz2", Lz2_ratio, keep, alpha_phi ** 2, -hbar * c_phi),
        lz=_summarize("Lz", Lz_ratio, keep, state.p_phi if mode is MotionMode.CIRCULATING else 0.0, 0.0),
        samples=samples,
        tolerance=tolerance,
    )
    logger.debug("Operator ratios", samples=int(np.count_nonzero(keep)),
                 H_mean=report.hamiltonian.real_mean, L2_mean=report.angular_sq.real_mean,
                 Lz2_mean=report.lz_sq.real_mean, eigen_consistent=report.eigen_consistent)
    return report
