#!/usr/bin/env python3
"""
Domain Models
Immutable grids, units and state containers shared by solvers and diagnostics.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import (
    DegenerateInputError,
    GridSizeError,
    InvalidParameterError,
    ConsistencyError,
)

# Bound shells of a Coulomb-like potential decay well inside 40 n^2 natural lengths
SHELL_REACH = 40.0
RADIAL_SPACING = 0.01


def frozen_array(values, dtype=float) -> np.ndarray:
    """Copy into a read-only array."""
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Units:
    """Action and mass scales; natural units by default."""
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise InvalidParameterError("hbar", self.hbar, "hbar > 0")
        if not self.mass > 0:
            raise InvalidParameterError("mass", self.mass, "mass > 0")

    @property
    def kinetic(self) -> float:
        """hbar^2 / 2m, the prefactor of the Laplacian in H and Q."""
        return self.hbar ** 2 / (2.0 * self.mass)

    @property
    def shooting(self) -> float:
        """2m / hbar^2, the prefactor of (V - E) in R'' = g R."""
        return 2.0 * self.mass / self.hbar ** 2


@dataclass(frozen=True)
class Grid1D:
    """Uniform lattice on [x_min, x_max] including both ends."""
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise GridSizeError(self.n_points)
        if not self.x_max > self.x_min:
            raise InvalidParameterError("x_max", self.x_max, f"x_max > x_min = {self.x_min}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self, factor: int = 2) -> "Grid1D":
        """Same interval with the spacing divided by factor."""
        return Grid1D(self.x_min, self.x_max, (self.n_points - 1) * factor + 1)


@dataclass(frozen=True)
class PolarGrid:
    """Uniform lattice on the open interval (0, pi); the poles are never sampled."""
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise GridSizeError(self.n_points)

    @property
    def spacing(self) -> float:
        return np.pi / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.n_points) + 1.0) * self.spacing


@dataclass(frozen=True)
class RadialGrid:
    """Uniform lattice on (0, r_max]; r = 0 is a virtual sample where u = rR vanishes."""
    r_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise GridSizeError(self.n_points)
        if not self.r_max > 0:
            raise InvalidParameterError("r_max", self.r_max, "r_max > 0")

    @classmethod
    def for_shells(cls, n_max: int, length: float = 1.0, spacing: float = RADIAL_SPACING) -> "RadialGrid":
        """Lattice out to SHELL_REACH * n_max^2 * length, the reach of shells up to n_max."""
        if n_max < 1:
            raise InvalidParameterError("n_max", n_max, "n_max >= 1")
        if not (length > 0 and spacing > 0):
            raise InvalidParameterError("spacing", spacing, "positive length and spacing")
        r_max = SHELL_REACH * n_max ** 2 * length
        return cls(r_max, max(3, int(round(r_max / spacing))))

    @property
    def spacing(self) -> float:
        return self.r_max / self.n_points

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.n_points) + 1.0) * self.spacing


def uniformity_error(points: np.ndarray) -> float:
    """max |x_{i+1} - x_i - h| relative to |h|."""
    steps = np.diff(points)
    h = (points[-1] - points[0]) / (len(points) - 1)
    return float(np.max(np.abs(steps - h)) / abs(h))


def normalize(R, grid, weight: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Scale a field to unit norm with trapezoidal quadrature.

    The sign is fixed so the first nonzero sample is positive.

    Args:
        R: Field samples on grid
        grid: Any grid exposing ``points``
        weight: Optional quadrature weight (r^2 for radial, sin(theta) for polar)

    Raises:
        DegenerateInputError: If the field is identically zero
    """
    values = np.asarray(R, dtype=float)
    x = grid.points
    if values.shape != x.shape:
        raise ConsistencyError(
            f"Field has {values.size} samples but grid has {x.size}",
            context={"field": values.size, "grid": x.size}
        )
    density = values ** 2 if weight is None else values ** 2 * weight
    norm_sq = trapezoid(density, x)
    nonzero = np.flatnonzero(values)
    if nonzero.size == 0 or not norm_sq > 0:
        raise DegenerateInputError("Cannot normalize an identically zero field")
    sign = 1.0 if values[nonzero[0]] > 0 else -1.0
    return sign * values / np.sqrt(norm_sq)


def count_nodes(values: np.ndarray) -> int:
    """Sign changes between consecutive nonzero samples."""
    signs = np.sign(values[values != 0])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True, eq=False)
class StationaryState1D:
    """
    Bound conservative state on a 1D grid.

    R may change sign; S = -E t so the particle momentum is zero everywhere.
    """
    grid: Grid1D
    R: np.ndarray
    energy: float
    nodes: int
    units: Units = field(default_factory=Units)

    def __post_init__(self):
        values = frozen_array(self.R)
        if values.shape != (self.grid.n_points,):
            raise ConsistencyError(
                f"R has shape {values.shape}, grid has {self.grid.n_points} points"
            )
        if not np.any(values):
            raise DegenerateInputError("Stationary state amplitude is identically zero")
        object.__setattr__(self, "R", values)

    @property
    def momentum(self) -> np.ndarray:
        """Bohmian momentum dS/dx, zero for a bound stationary state."""
        return np.zeros(self.grid.n_points)

    def norm(self) -> float:
        return float(trapezoid(self.R ** 2, self.grid.points))


class AzimuthalParity(str, Enum):
    """Closed forms of the azimuthal amplitude R_phi."""
    COS = "cos"
    SIN = "sin"
    CONST = "const"


class MotionMode(str, Enum):
    """The two admissible azimuthal cases."""
    REST = "rest"
    CIRCULATING = "circulating"


def azimuthal_amplitude(parity: AzimuthalParity, m: int, phi: np.ndarray, order: int = 0) -> np.ndarray:
    """R_phi and its first/second phi-derivatives in closed form."""
    phi = np.asarray(phi, dtype=float)
    if parity is AzimuthalParity.CONST:
        return np.ones_like(phi) if order == 0 else np.zeros_like(phi)
    angle = m * phi
    if parity is AzimuthalParity.COS:
        forms = (np.cos(angle), -m * np.sin(angle), -m * m * np.cos(angle))
    else:
        forms = (np.sin(angle), m * np.cos(angle), -m * m * np.sin(angle))
    return forms[order]


@dataclass(frozen=True, eq=False)
class SeparableCentralState:
    """
    Product state R = R_r(r) R_theta(theta) R_phi(phi) of a central potential.

    In rest mode all momenta vanish (S = -E t); in circulating mode R_phi is
    constant and S = alpha_phi * phi - E t.
    """
    radial_grid: RadialGrid
    R_r: np.ndarray
    polar_grid: PolarGrid
    R_theta: np.ndarray
    parity: AzimuthalParity
    m: int
    energy: float
    alpha_theta_sq: float
    alpha_phi: float
    mode: MotionMode = MotionMode.REST
    units: Units = field(default_factory=Units)
    n: Optional[int] = None
    l: Optional[int] = None

    def __post_init__(self):
        radial = frozen_array(self.R_r)
        polar = frozen_array(self.R_theta)
        if radial.shape != (self.radial_grid.n_points,):
            raise ConsistencyError("R_r does not match the radial grid")
        if polar.shape != (self.polar_grid.n_points,):
            raise ConsistencyError("R_theta does not match the polar grid")
        if self.m < 0:
            raise InvalidParameterError("m", self.m, "integer m >= 0")
        if self.mode is MotionMode.CIRCULATING and self.parity is not AzimuthalParity.CONST:
            raise ConsistencyError("Circulating mode requires a constant R_phi")
        if self.mode is MotionMode.REST and self.parity is AzimuthalParity.SIN and self.m == 0:
            raise InvalidParameterError("parity", "sin", "m >= 1 for sin(m phi)")
        object.__setattr__(self, "R_r", radial)
        object.__setattr__(self, "R_theta", polar)

    def R_phi(self, phi, order: int = 0) -> np.ndarray:
        return azimuthal_amplitude(self.parity, self.m, phi, order)

    @property
    def p_phi(self) -> float:
        """Canonical azimuthal momentum of the trajectory."""
        return self.alpha_phi if self.mode is MotionMode.CIRCULATING else 0.0

    def action(self, phi, t: float = 0.0) -> np.ndarray:
        """Hamilton's principal function S(phi, t) of the state."""
        phi = np.asarray(phi, dtype=float)
        return self.p_phi * phi - self.energy * t

    def amplitude(self, phi: np.ndarray) -> np.ndarray:
        """Tensor samples R(r, theta, phi) with shape (n_r, n_theta, n_phi)."""
        return (
            self.R_r[:, None, None]
            * self.R_theta[None, :, None]
            * self.R_phi(phi)[None, None, :]
        )

    def scaled(self, factor: float) -> "SeparableCentralState":
        """Same state with the radial amplitude multiplied by factor."""
        return SeparableCentralState(
            radial_grid=self.radial_grid, R_r=self.R_r * factor,
            polar_grid=self.polar_grid, R_theta=self.R_theta,
            parity=self.parity, m=self.m, energy=self.energy,
            alpha_theta_sq=self.alpha_theta_sq, alpha_phi=self.alpha_phi,
            mode=self.mode, units=self.units, n=self.n, l=self.l,
        )
