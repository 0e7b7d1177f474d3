#!/usr/bin/env python3
"""
Quantum Potential
Q = -(hbar^2 / 2m) (laplacian R) / R from sampled amplitudes, in 1D and in
the separated spherical form Q_r + Q_theta / r^2 + Q_phi / (r^2 sin^2 theta).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.config import get_settings
from core.exceptions import DegenerateInputError, GridSizeError, ConsistencyError
from core.models import (
    AzimuthalParity,
    Grid1D,
    PolarGrid,
    RadialGrid,
    SeparableCentralState,
    Units,
)


def second_difference(values: np.ndarray, h: float) -> np.ndarray:
    """
    Second derivative with central differences inside and one-sided
    second-order stencils at both ends (first-order with only 3 samples).
    """
    y = np.asarray(values, dtype=float)
    n = y.size
    if n < 3:
        raise GridSizeError(n)
    d2 = np.empty(n)
    d2[1:-1] = y[2:] - 2.0 * y[1:-1] + y[:-2]
    if n >= 4:
        d2[0] = 2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]
        d2[-1] = 2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]
    else:
        d2[0] = d2[-1] = d2[1]
    return d2 / (h * h)


def first_difference(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative, second order everywhere."""
    y = np.asarray(values, dtype=float)
    if y.size < 3:
        raise GridSizeError(y.size)
    d1 = np.empty(y.size)
    d1[1:-1] = y[2:] - y[:-2]
    d1[0] = -3.0 * y[0] + 4.0 * y[1] - y[2]
    d1[-1] = 3.0 * y[-1] - 4.0 * y[-2] + y[-3]
    return d1 / (2.0 * h)


def node_mask(values: np.ndarray, node_epsilon: Optional[float] = None) -> np.ndarray:
    """True where |R| < node_epsilon * max|R|."""
    eps = get_settings().numerics.node_epsilon if node_epsilon is None else node_epsilon
    magnitude = np.abs(np.asarray(values, dtype=float))
    peak = magnitude.max()
    if peak == 0.0:
        raise DegenerateInputError("Quantum potential of an identically zero amplitude")
    return magnitude < eps * peak


def _ratio(numerator: np.ndarray, R: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.full(R.shape, np.nan)
    keep = ~mask
    out[keep] = numerator[keep] / R[keep]
    return out


def curvature_tolerance(R: np.ndarray, h: float, energy: float, units: Units = Units()) -> np.ndarray:
    """
    Pointwise bound on the truncation error of Q from second differences:
    10 h^2 (hbar^2/2m) |d4R / R| + 10 h^2 |E|, with d4R from fourth differences.
    """
    y = np.asarray(R, dtype=float)
    d4 = np.zeros(y.size)
    if y.size >= 5:
        d4[2:-2] = y[4:] - 4.0 * y[3:-1] + 6.0 * y[2:-2] - 4.0 * y[1:-3] + y[:-4]
        d4[:2] = d4[2]
        d4[-2:] = d4[-3]
    with np.errstate(divide="ignore", invalid="ignore"):
        curvature = np.abs(d4 / (h ** 4 * y))
    curvature[~np.isfinite(curvature)] = np.inf
    return 10.0 * h * h * (units.kinetic * curvature + abs(energy))


def polar_curvature_tolerance(R_theta: np.ndarray, grid: PolarGrid, energy: float,
                              units: Units = Units()) -> np.ndarray:
    """curvature_tolerance plus the cot(theta) R'/R truncation term, 10 h^2 (hbar^2/2m) |cot d3R / R|."""
    y = np.asarray(R_theta, dtype=float)
    h = grid.spacing
    d3 = np.zeros(y.size)
    if y.size >= 5:
        d3[2:-2] = 0.5 * (y[4:] - 2.0 * y[3:-1] + 2.0 * y[1:-3] - y[:-4])
        d3[:2] = d3[2]
        d3[-2:] = d3[-3]
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.abs(d3 / (h ** 3 * y) / np.tan(grid.points))
    slope[~np.isfinite(slope)] = np.inf
    return curvature_tolerance(y, h, energy, units) + 10.0 * h * h * units.kinetic * slope


@dataclass(frozen=True, eq=False)
class QField1D:
    """Sampled quantum potential; masked samples hold NaN."""
    grid: Grid1D
    Q: np.ndarray
    node_mask: np.ndarray

    @property
    def unmasked(self) -> np.ndarray:
        return ~self.node_mask


def quantum_potential_1d(R, grid: Grid1D, units: Units = Units(),
                         node_epsilon: Optional[float] = None) -> QField1D:
    """
    Q_i = -(hbar^2/2m) (R_{i+1} - 2 R_i + R_{i-1}) / (h^2 R_i).

    Samples inside a node-exclusion window are masked, not evaluated.

    Raises:
        GridSizeError: Fewer than 3 samples
        DegenerateInputError: R identically zero
    """
    values = np.asarray(R, dtype=float)
    if values.size < 3:
        raise GridSizeError(values.size)
    if values.size != grid.n_points:
        raise ConsistencyError(f"R has {values.size} samples, grid has {grid.n_points}")
    mask = node_mask(values, node_epsilon)
    d2 = second_difference(values, grid.spacing)
    Q = -units.kinetic * _ratio(d2, values, mask)
    return QField1D(grid=grid, Q=Q, node_mask=mask)


@dataclass(frozen=True, eq=False)
class QFieldSpherical:
    """
    Separated quantum potential of a product state.

    Q_phi is a closed-form constant; the radial and polar parts are sampled
    on the state's grids with NaN at masked samples.
    """
    radial_grid: RadialGrid
    Q_r: np.ndarray
    radial_mask: np.ndarray
    polar_grid: PolarGrid
    Q_theta: np.ndarray
    polar_mask: np.ndarray
    Q_phi: float
    units: Units = field(default_factory=Units)

    def total(self) -> np.ndarray:
        """Q_r + Q_theta / r^2 + Q_phi / (r^2 sin^2 theta) on the (r, theta) tensor grid."""
        r = self.radial_grid.points[:, None]
        sin_t = np.sin(self.polar_grid.points)[None, :]
        return self.Q_r[:, None] + self.Q_theta[None, :] / r ** 2 + self.Q_phi / (r ** 2 * sin_t ** 2)

    def mask(self) -> np.ndarray:
        return self.radial_mask[:, None] | self.polar_mask[None, :]


def azimuthal_q(parity: AzimuthalParity, m: int, units: Units = Units()) -> float:
    """Q_phi = (hbar^2/2m) m^2 for cos/sin, 0 for a constant R_phi."""
    if parity is AzimuthalParity.CONST:
        return 0.0
    return units.kinetic * m * m


def radial_laplacian_ratio(R_r: np.ndarray, grid: RadialGrid, node_epsilon: Optional[float] = None):
    """
    (1/r^2) d/dr(r^2 dR/dr) / R = u'' / u with u = r R and the virtual
    sample u(0) = 0. Returns (ratio, mask).
    """
    values = np.asarray(R_r, dtype=float)
    u = np.concatenate(([0.0], grid.points * values))
    d2u = second_difference(u, grid.spacing)[1:]
    mask = node_mask(values, node_epsilon)
    return _ratio(d2u, u[1:], mask), mask


def polar_laplacian_ratio(R_theta: np.ndarray, grid: PolarGrid, node_epsilon: Optional[float] = None):
    """(R'' + cot(theta) R') / R. Returns (ratio, mask)."""
    theta = grid.points
    h = grid.spacing
    values = np.asarray(R_theta, dtype=float)
    lap = second_difference(values, h) + first_difference(values, h) / np.tan(theta)
    mask = node_mask(values, node_epsilon)
    return _ratio(lap, values, mask), mask


def radial_q(R_r: np.ndarray, grid: RadialGrid, units: Units = Units(),
             node_epsilon: Optional[float] = None):
    ratio, mask = radial_laplacian_ratio(R_r, grid, node_epsilon)
    return -units.kinetic * ratio, mask


def polar_q(R_theta: np.ndarray, grid: PolarGrid, units: Units = Units(),
            node_epsilon: Optional[float] = None):
    ratio, mask = polar_laplacian_ratio(R_theta, grid, node_epsilon)
    return -units.kinetic * ratio, mask


def quantum_potential_spherical(state: SeparableCentralState,
                                node_epsilon: Optional[float] = None) -> QFieldSpherical:
    """Separated quantum potential of an assembled product state."""
    units = state.units
    Q_r, radial_mask = radial_q(state.R_r, state.radial_grid, units, node_epsilon)
    Q_theta, polar_mask = polar_q(state.R_theta, state.polar_grid, units, node_epsilon)
    return QFieldSpherical(
        radial_grid=state.radial_grid, Q_r=Q_r, radial_mask=radial_mask,
        polar_grid=state.polar_grid, Q_theta=Q_theta, polar_mask=polar_mask,
        Q_phi=azimuthal_q(state.parity, state.m, units), units=units,
    )
