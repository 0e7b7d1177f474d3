#!/usr/bin/env python3
"""
Central-Potential Solver

Separated azimuthal, polar and radial equations with all momenta zero
(rest mode), or with p_phi = alpha_phi and a constant R_phi (circulating
mode). Produces the constants alpha_phi, alpha_theta^2, E and the
assembled product states.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from core.config import ParallelConfig, get_settings
from core.exceptions import (
    ConfigurationError,
    ConsistencyError,
    ConvergenceError,
    DiagnosticFailure,
    InvalidParameterError,
)
from core.models import (
    AzimuthalParity,
    MotionMode,
    PolarGrid,
    RadialGrid,
    SeparableCentralState,
    Units,
    count_nodes,
    frozen_array,
    normalize,
)
from core.observability import StructuredLogger, measure_performance
from core.potentials import CentralPotential, evaluate_potential

from .eigensolver import ShootingConfig
from .numerov import EigenvalueSearch, SturmProblem, stitch
from .potential import azimuthal_q

logger = StructuredLogger("central")

# Mercator lattice for the polar equation: x = ln tan(theta / 2)
MERCATOR_HALF_WIDTH = 18.0
MERCATOR_SPACING = 0.004

# Relative agreement required between alpha_theta^2 of polar and radial inputs
ALPHA_CONSISTENCY = 1e-6


@dataclass(frozen=True)
class AzimuthalSolution:
    m: int
    alpha_phi: float
    parity: AzimuthalParity
    mode: MotionMode
    Q_phi: float


@dataclass(frozen=True, eq=False)
class PolarSolution:
    l: int
    m: int
    alpha_theta_sq: float
    R_theta: np.ndarray
    grid: PolarGrid
    iterations: int = 0
    closed_form_error: float = 0.0


@dataclass(frozen=True, eq=False)
class RadialSolution:
    n_r: int
    energy: float
    R_r: np.ndarray
    grid: RadialGrid
    alpha_theta_sq: float
    iterations: int = 0
    mismatch: float = 0.0
    units: Units = field(default_factory=Units)

    @property
    def u(self) -> np.ndarray:
        return self.grid.points * self.R_r


def solve_azimuthal(m: int, parity: AzimuthalParity = AzimuthalParity.COS,
                    units: Units = Units()) -> AzimuthalSolution:
    """
    Rest-mode azimuthal solution: R_phi = cos(m phi) or sin(m phi), alpha_phi = m hbar.

    From p_phi^2 + 2m Q_phi = alpha_phi^2 with p_phi = 0; single-valued
    R_phi forces integer m.
    """
    parity = AzimuthalParity(parity)
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise InvalidParameterError("m", m, "integer m >= 0")
    m = int(m)
    if parity is AzimuthalParity.SIN and m == 0:
        raise InvalidParameterError("parity", "sin", "m >= 1 (sin(0 phi) vanishes identically)")
    if m == 0:
        parity = AzimuthalParity.CONST
    elif parity is AzimuthalParity.CONST:
        raise InvalidParameterError("parity", "const", "cos or sin for m >= 1 in rest mode")
    return AzimuthalSolution(m=m, alpha_phi=m * units.hbar, parity=parity,
                             mode=MotionMode.REST, Q_phi=azimuthal_q(parity, m, units))


def circulating_azimuthal(alpha_phi: float, units: Units = Units()) -> AzimuthalSolution:
    """
    Circulating solution: constant R_phi, p_phi = alpha_phi, Q_phi = 0.

    alpha_phi is not quantized here; the winding diagnostic decides whether
    it is admissible.
    """
    if not np.isfinite(alpha_phi):
        raise InvalidParameterError("alpha_phi", alpha_phi, "finite value")
    m = int(round(abs(alpha_phi) / units.hbar))
    return AzimuthalSolution(m=m, alpha_phi=float(alpha_phi), parity=AzimuthalParity.CONST,
                             mode=MotionMode.CIRCULATING, Q_phi=0.0)


def mercator_points(polar_grid: PolarGrid) -> np.ndarray:
    """Uniform Mercator lattice wide enough to contain every polar sample."""
    edge = abs(np.log(np.tan(0.5 * polar_grid.points[0])))
    half = max(MERCATOR_HALF_WIDTH, edge + 5.0)
    n = int(np.ceil(2.0 * half / MERCATOR_SPACING)) + 1
    return np.linspace(-half, half, n)


def _sech_power(x: float, mu: float) -> float:
    return float(np.cosh(x) ** -mu) if mu > 0 else 1.0


def polar_problem(mu: float, x: np.ndarray) -> SturmProblem:
    """R'' = (mu^2 - A sech^2 x) R with R ~ sech^mu x at both ends."""
    h = float(x[1] - x[0])
    forward = (_sech_power(x[0], mu), _sech_power(x[1], mu))
    backward = (_sech_power(x[-1], mu), _sech_power(x[-2], mu))
    return SturmProblem(
        q=np.full(x.size, mu * mu), w=1.0 / np.cosh(x) ** 2, h=h,
        forward_start=lambda lam: forward, backward_start=lambda lam: backward,
    )


@measure_performance("solve_polar", logger)
def solve_polar(m: float, l_max: int, grid: PolarGrid, units: Units = Units(),
                tol: float = 1e-10) -> List[PolarSolution]:
    """
    Polar solutions for l = m .. l_max by shooting on alpha_theta^2.

    Each R_theta is normalized with weight sin(theta) and regular at the
    poles (R ~ sin(theta)^m).

    The shooting runs in the Mercator coordinate x = ln tan(theta / 2),
    where the equation has no first-derivative term and the poles sit at
    x = -inf and +inf; profiles are splined back onto the theta lattice.

    Raises:
        InvalidParameterError: l_max < m
        ConfigurationError: Grid samples at or beyond a pole
        DiagnosticFailure: Bisection does not converge
    """
    if m < 0:
        raise InvalidParameterError("m", m, "m >= 0")
    if l_max < m:
        raise InvalidParameterError("l_max", l_max, f"l_max >= m = {m}")
    theta = grid.points
    if np.any(np.sin(theta) <= 0.0):
        raise ConfigurationError("Polar grid must exclude both poles")

    x = mercator_points(grid)
    problem = polar_problem(float(m), x)
    search = EigenvalueSearch(problem, tol)
    wanted = int(np.floor(l_max - m)) + 1
    lower = m * m - 1.0
    upper = search.grow_upper(lower, (l_max + 1.0) * (l_max + 1.5), wanted)
    try:
        roots = search.locate_all(lower, upper, wanted)
    except ConvergenceError as exc:
        raise DiagnosticFailure([f"polar bisection m={m}: {exc.message}"]) from exc
    if len(roots) < wanted:
        raise DiagnosticFailure([f"polar bisection m={m}: found {len(roots)} of {wanted} states"])

    x_theta = np.log(np.tan(0.5 * theta))
    solutions = []
    for root in roots:
        l = m + root.index
        profile = stitch(problem, search.shot(root.value))
        R_theta = normalize(CubicSpline(x, profile)(x_theta), grid, weight=np.sin(theta))
        alpha_sq = root.value * units.hbar ** 2
        exact = l * (l + 1) * units.hbar ** 2
        error = abs(alpha_sq - exact) / exact if exact else abs(alpha_sq)
        if error > 1e-6:
            logger.warning("alpha_theta^2 departs from l(l+1) hbar^2", l=l, m=m, alpha_theta_sq=alpha_sq)
        solutions.append(PolarSolution(
            l=int(round(l)), m=int(round(m)), alpha_theta_sq=alpha_sq, R_theta=frozen_array(R_theta),
            grid=grid, iterations=root.iterations, closed_form_error=error,
        ))
    return solutions


def angular_exponent(alpha_theta_sq: float, units: Units = Units()) -> float:
    """L with L(L+1) = alpha_theta^2 / hbar^2."""
    a = max(alpha_theta_sq / units.hbar ** 2, 0.0)
    return 0.5 * (np.sqrt(1.0 + 4.0 * a) - 1.0)


def effective_potential(potential: CentralPotential, alpha_theta_sq: float, r,
                        units: Units = Units()) -> np.ndarray:
    """V(r) + alpha_theta^2 / (2 m r^2)."""
    r = np.asarray(r, dtype=float)
    return potential.value(r, units) + alpha_theta_sq / (2.0 * units.mass * r ** 2)


def radial_problem(potential: CentralPotential, alpha_theta_sq: float, grid: RadialGrid,
                   units: Units, match_fraction: float = 0.5) -> SturmProblem:
    """
    u'' = [(2m/hbar^2)(V - E) + L(L+1)/r^2] u with the regular series start
    u ~ r^{L+1} (1 + a r + b r^2) at the origin and u = 0 at r_max.
    """
    r = grid.points
    V = evaluate_potential(potential, grid, units).values
    L = angular_exponent(alpha_theta_sq, units)
    s = units.shooting
    Z, V0 = potential.origin_expansion(grid, units)
    a = -0.5 * s * Z / (L + 1.0)

    def series_start(energy: float):
        b = s * ((V0 - energy) - Z * a) / (4.0 * L + 6.0)
        u = r[:2] ** (L + 1.0) * (1.0 + a * r[:2] + b * r[:2] ** 2)
        return float(u[0]), float(u[1])

    return SturmProblem(
        q=s * V + L * (L + 1.0) / r ** 2, w=s, h=grid.spacing,
        forward_start=series_start, match_fraction=match_fraction,
    )


@measure_performance("solve_radial", logger)
def solve_radial(potential: CentralPotential, alpha_theta_sq: float, grid: RadialGrid,
                 units: Units = Units(), config: ShootingConfig = ShootingConfig()) -> List[RadialSolution]:
    """
    Radial solutions ordered by node count, via u = r R_r.

    The default bracket runs from the minimum of the effective potential to
    its value at r_max. States that do not decay at r_max are dropped with a
    warning.
    """
    if alpha_theta_sq < 0:
        raise InvalidParameterError("alpha_theta_sq", alpha_theta_sq, ">= 0")
    problem = radial_problem(potential, alpha_theta_sq, grid, units, config.match_point)
    search = EigenvalueSearch(problem, config.bisection_tol)
    r = grid.points
    if config.energy_bracket is not None:
        lower, upper = config.energy_bracket
    else:
        v_eff = effective_potential(potential, alpha_theta_sq, r, units)
        lower, upper = float(np.min(v_eff)), float(v_eff[-1])
    roots = search.locate_all(lower, upper, config.max_states)
    if len(roots) < config.max_states:
        logger.warning("Radial bracket holds fewer states than requested",
                       found=len(roots), requested=config.max_states, alpha_theta_sq=alpha_theta_sq)

    solutions = []
    for root in roots:
        u = normalize(stitch(problem, search.shot(root.value)), grid)
        tail = abs(u[-2])
        if tail > config.decay_threshold:
            logger.warning("Radial state rejected: not confined", index=root.index,
                           energy=root.value, boundary_value=tail)
            continue
        R_r = u / r
        solutions.append(RadialSolution(
            n_r=count_nodes(R_r), energy=root.value, R_r=frozen_array(R_r), grid=grid,
            alpha_theta_sq=alpha_theta_sq, iterations=root.iterations, mismatch=root.mismatch,
            units=units,
        ))
        logger.debug("Radial state solved", n_r=root.index, energy=root.value)
    return solutions


def solve_channels(potential: CentralPotential, l_values: Iterable[int], grid: RadialGrid,
                   units: Units = Units(), config: ShootingConfig = ShootingConfig(),
                   parallel: Optional[ParallelConfig] = None,
                   n_max: Optional[int] = None) -> Dict[int, List[RadialSolution]]:
    """
    Radial spectra for several l channels, optionally on a thread pool; order
    is preserved. With n_max, channel l asks for the n_max - l states with
    n = n_r + l + 1 <= n_max.
    """
    parallel = parallel or get_settings().parallel
    l_values = list(l_values)

    def run(l: int) -> List[RadialSolution]:
        channel = config if n_max is None else config.model_copy(update={"max_states": max(n_max - l, 1)})
        return solve_radial(potential, l * (l + 1) * units.hbar ** 2, grid, units, channel)

    if parallel.enabled and len(l_values) > 1:
        with ThreadPoolExecutor(max_workers=parallel.max_workers) as pool:
            spectra = list(pool.map(run, l_values))
    else:
        spectra = [run(l) for l in l_values]
    return dict(zip(l_values, spectra))


def assemble_state(radial: RadialSolution, polar: PolarSolution,
                   azimuthal: AzimuthalSolution) -> SeparableCentralState:
    """
    Product state R_r R_theta R_phi with its constants of motion.

    Raises:
        ConsistencyError: alpha_theta^2 of the radial and polar inputs differ,
            or the polar solution belongs to another m
    """
    exact = max(abs(polar.alpha_theta_sq), abs(radial.alpha_theta_sq))
    gap = abs(polar.alpha_theta_sq - radial.alpha_theta_sq)
    if gap > ALPHA_CONSISTENCY * max(exact, 1e-2):
        raise ConsistencyError(
            "Radial and polar solutions carry different alpha_theta^2",
            context={"radial": radial.alpha_theta_sq, "polar": polar.alpha_theta_sq}
        )
    if polar.m != azimuthal.m:
        raise ConsistencyError(
            f"Polar solution has m={polar.m}, azimuthal has m={azimuthal.m}",
            context={"polar_m": polar.m, "azimuthal_m": azimuthal.m}
        )
    logger.debug("Assembling state", n_r=radial.n_r, l=polar.l, m=azimuthal.m)
    return SeparableCentralState(
        radial_grid=radial.grid, R_r=radial.R_r,
        polar_grid=polar.grid, R_theta=polar.R_theta,
        parity=azimuthal.parity, m=azimuthal.m, energy=radial.energy,
        alpha_theta_sq=polar.alpha_theta_sq, alpha_phi=azimuthal.alpha_phi,
        mode=azimuthal.mode, units=radial.units, n=radial.n_r + polar.l + 1, l=polar.l,
    )


@dataclass
class CentralSpectrum:
    """Bound product states keyed by (n, l, m), with the channel solutions they came from."""
    states: Dict[Tuple[int, int, int], SeparableCentralState]
    polar: Dict[Tuple[int, int], PolarSolution]
    radial: Dict[int, List[RadialSolution]]

    def energies(self) -> Dict[Tuple[int, int], float]:
        """E per (n, l)."""
        return {(key[0], key[1]): state.energy for key, state in self.states.items()}

    def missing(self, n_max: int) -> List[Tuple[int, int, int]]:
        """Keys (n, l, m) with n <= n_max, 0 <= l < n, 0 <= m <= l that were not solved."""
        expected = [(n, l, m) for n in range(1, n_max + 1) for l in range(n) for m in range(l + 1)]
        return [key for key in expected if key not in self.states]


def solve_central_spectrum(potential: CentralPotential, n_max: int, radial_grid: RadialGrid,
                           polar_grid: PolarGrid, units: Units = Units(),
                           config: ShootingConfig = ShootingConfig(),
                           parity: AzimuthalParity = AzimuthalParity.COS,
                           mode: MotionMode = MotionMode.REST,
                           parallel: Optional[ParallelConfig] = None) -> CentralSpectrum:
    """
    Every state with n <= n_max, 0 <= l < n and 0 <= m <= l.

    Rest states use cos(m phi) or sin(m phi) (const for m = 0); circulating
    states carry p_phi = m hbar with a constant R_phi.
    """
    if n_max < 1:
        raise InvalidParameterError("n_max", n_max, "n_max >= 1")
    l_max = n_max - 1
    polar = {}
    for m in range(l_max + 1):
        for solution in solve_polar(m, l_max, polar_grid, units):
            polar[(solution.l, m)] = solution
    radial = solve_channels(potential, range(l_max + 1), radial_grid, units, config, parallel, n_max=n_max)

    states = {}
    for l, solutions in radial.items():
        for solution in solutions:
            n = solution.n_r + l + 1
            if n > n_max:
                continue
            for m in range(l + 1):
                if mode is MotionMode.CIRCULATING:
                    azimuthal = circulating_azimuthal(m * units.hbar, units)
                else:
                    azimuthal = solve_azimuthal(m, parity if m else AzimuthalParity.CONST, units)
                states[(n, l, m)] = assemble_state(solution, polar[(l, m)], azimuthal)
    logger.info("Central spectrum solved", n_max=n_max, states=len(states), mode=MotionMode(mode).value)
    return CentralSpectrum(states=states, polar=polar, radial=radial)
