#!/usr/bin/env python3
"""
Potential Definitions
1D and central potentials with pointwise evaluation over the lattices in core.models.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import DomainError, InvalidParameterError, ConsistencyError
from .models import Grid1D, RadialGrid, Units, frozen_array

# Relative slack when checking that a grid lies inside a domain
_DOMAIN_SLACK = 1e-12


class PotentialKind(str, Enum):
    """Supported potential shapes."""
    BOX = "box"
    HARMONIC = "harmonic"
    FINITE_WELL = "finite_well"
    COULOMB = "coulomb"
    HARMONIC3D = "harmonic3d"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class SampledPotential:
    """Potential values on a grid plus the hard-wall flags of its two ends."""
    values: np.ndarray
    hard_walls: Tuple[bool, bool] = (False, False)

    @property
    def any_wall(self) -> bool:
        return any(self.hard_walls)


def _tabulated_spline(x, v) -> CubicSpline:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape != v.shape or x.size < 2:
        raise ConsistencyError("Tabulated potential needs matching 1D abscissae and values (>= 2 samples)")
    if np.any(np.diff(x) <= 0):
        raise InvalidParameterError("samples", "unsorted", "strictly increasing abscissae")
    if not np.all(np.isfinite(v)):
        raise InvalidParameterError("samples", "non-finite", "finite potential values")
    return CubicSpline(x, v) if x.size >= 4 else CubicSpline(x, v, bc_type="natural")


def _check_cover(points: np.ndarray, lo: float, hi: float, what: str):
    slack = _DOMAIN_SLACK * max(1.0, abs(lo), abs(hi))
    if points[0] < lo - slack or points[-1] > hi + slack:
        raise DomainError(
            f"Grid [{points[0]}, {points[-1]}] is not covered by {what} [{lo}, {hi}]",
            context={"grid": (float(points[0]), float(points[-1])), "domain": (lo, hi)}
        )


@dataclass(frozen=True, eq=False)
class Potential1D:
    """
    One-dimensional potential.

    Build with the named constructors: ``box``, ``harmonic``, ``finite_well``
    and ``tabulated``. The box is V = 0 on (0, a) with hard walls enforced as
    Dirichlet boundary conditions, never as large values.
    """
    kind: PotentialKind
    a: float = 1.0
    omega: float = 1.0
    depth: float = 0.0
    x_samples: Optional[np.ndarray] = None
    v_samples: Optional[np.ndarray] = None
    _spline: Optional[CubicSpline] = field(default=None, repr=False)

    @classmethod
    def box(cls, a: float = 1.0) -> "Potential1D":
        if not a > 0:
            raise InvalidParameterError("a", a, "a > 0")
        return cls(PotentialKind.BOX, a=a)

    @classmethod
    def harmonic(cls, omega: float = 1.0) -> "Potential1D":
        if not omega > 0:
            raise InvalidParameterError("omega", omega, "omega > 0")
        return cls(PotentialKind.HARMONIC, omega=omega)

    @classmethod
    def finite_well(cls, depth: float, a: float) -> "Potential1D":
        """Well V = -depth on |x| < a/2, zero outside."""
        if not depth > 0:
            raise InvalidParameterError("depth", depth, "depth > 0")
        if not a > 0:
            raise InvalidParameterError("a", a, "a > 0")
        return cls(PotentialKind.FINITE_WELL, a=a, depth=depth)

    @classmethod
    def tabulated(cls, x, values) -> "Potential1D":
        spline = _tabulated_spline(x, values)
        return cls(
            PotentialKind.TABULATED,
            x_samples=frozen_array(x), v_samples=frozen_array(values), _spline=spline
        )

    @property
    def domain(self) -> Tuple[float, float]:
        if self.kind is PotentialKind.BOX:
            return (0.0, self.a)
        if self.kind is PotentialKind.TABULATED:
            return (float(self.x_samples[0]), float(self.x_samples[-1]))
        return (-np.inf, np.inf)

    def value(self, x, units: Units = Units()) -> np.ndarray:
        """V(x) without domain checks (the box is zero everywhere)."""
        x = np.asarray(x, dtype=float)
        if self.kind is PotentialKind.BOX:
            return np.zeros_like(x)
        if self.kind is PotentialKind.HARMONIC:
            return 0.5 * units.mass * self.omega ** 2 * x ** 2
        if self.kind is PotentialKind.FINITE_WELL:
            return np.where(np.abs(x) < 0.5 * self.a, -self.depth, 0.0)
        return self._spline(x)

    def derivative(self, x, units: Units = Units()) -> np.ndarray:
        """dV/dx; the finite well's steps contribute nothing away from the edges."""
        x = np.asarray(x, dtype=float)
        if self.kind is PotentialKind.HARMONIC:
            return units.mass * self.omega ** 2 * x
        if self.kind is PotentialKind.TABULATED:
            return self._spline(x, 1)
        return np.zeros_like(x)


@dataclass(frozen=True, eq=False)
class CentralPotential:
    """Spherically symmetric potential V(r)."""
    kind: PotentialKind
    Z: float = 1.0
    omega: float = 1.0
    r_samples: Optional[np.ndarray] = None
    v_samples: Optional[np.ndarray] = None
    _spline: Optional[CubicSpline] = field(default=None, repr=False)

    @classmethod
    def coulomb(cls, Z: float = 1.0) -> "CentralPotential":
        if not Z > 0:
            raise InvalidParameterError("Z", Z, "Z > 0")
        return cls(PotentialKind.COULOMB, Z=Z)

    @classmethod
    def harmonic3d(cls, omega: float = 1.0) -> "CentralPotential":
        if not omega > 0:
            raise InvalidParameterError("omega", omega, "omega > 0")
        return cls(PotentialKind.HARMONIC3D, omega=omega)

    @classmethod
    def tabulated(cls, r, values) -> "CentralPotential":
        r = np.asarray(r, dtype=float)
        if r.size and r[0] <= 0:
            raise InvalidParameterError("samples", float(r[0]), "radial abscissae r > 0")
        spline = _tabulated_spline(r, values)
        return cls(
            PotentialKind.TABULATED,
            r_samples=frozen_array(r), v_samples=frozen_array(values), _spline=spline
        )

    @property
    def domain(self) -> Tuple[float, float]:
        if self.kind is PotentialKind.TABULATED:
            return (float(self.r_samples[0]), float(self.r_samples[-1]))
        return (0.0, np.inf)

    def natural_length(self, units: Units = Units()) -> float:
        """Bohr radius hbar^2 / (m Z), oscillator length sqrt(hbar / (m omega)), or 1 for tables."""
        if self.kind is PotentialKind.COULOMB:
            return units.hbar ** 2 / (units.mass * self.Z)
        if self.kind is PotentialKind.HARMONIC3D:
            return float(np.sqrt(units.hbar / (units.mass * self.omega)))
        return 1.0

    def value(self, r, units: Units = Units()) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind is PotentialKind.COULOMB:
            return -self.Z / r
        if self.kind is PotentialKind.HARMONIC3D:
            return 0.5 * units.mass * self.omega ** 2 * r ** 2
        return self._spline(r)

    def derivative(self, r, units: Units = Units()) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind is PotentialKind.COULOMB:
            return self.Z / r ** 2
        if self.kind is PotentialKind.HARMONIC3D:
            return units.mass * self.omega ** 2 * r
        return self._spline(r, 1)

    def origin_expansion(self, grid: RadialGrid, units: Units = Units()) -> Tuple[float, float]:
        """
        Coefficients (Z, V0) of V(r) ~ -Z/r + V0 near the origin.

        Tabulated potentials are extrapolated linearly in r*V from the
        first two grid samples.
        """
        if self.kind is PotentialKind.COULOMB:
            return self.Z, 0.0
        if self.kind is PotentialKind.HARMONIC3D:
            return 0.0, 0.0
        r = grid.points[:2]
        rv = r * self.value(r, units)
        v0 = (rv[1] - rv[0]) / (r[1] - r[0])
        return float(-(rv[0] - v0 * r[0])), float(v0)


AnyPotential = Union[Potential1D, CentralPotential]


def evaluate_potential(p: AnyPotential, grid, units: Units = Units()) -> SampledPotential:
    """
    Sample a potential on a grid.

    Raises:
        DomainError: If the grid leaves the potential's domain (box interval,
            tabulated range) or a 1D potential is paired with a radial grid
    """
    points = grid.points
    if isinstance(p, CentralPotential):
        if not isinstance(grid, RadialGrid):
            raise DomainError("Central potentials are evaluated on a RadialGrid")
        lo, hi = p.domain
        if p.kind is PotentialKind.TABULATED:
            _check_cover(points, lo, hi, "tabulated samples")
        return SampledPotential(frozen_array(p.value(points, units)))

    if not isinstance(grid, Grid1D):
        raise DomainError("1D potentials are evaluated on a Grid1D")
    lo, hi = p.domain
    walls = (False, False)
    if p.kind is PotentialKind.BOX:
        _check_cover(points, lo, hi, "box")
        slack = _DOMAIN_SLACK * max(1.0, hi)
        walls = (abs(points[0] - lo) <= slack, abs(points[-1] - hi) <= slack)
    elif p.kind is PotentialKind.TABULATED:
        _check_cover(points, lo, hi, "tabulated samples")
    return SampledPotential(frozen_array(p.value(points, units)), walls)
