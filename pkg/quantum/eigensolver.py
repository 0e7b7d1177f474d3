#!/usr/bin/env python3
"""
1D Bound-State Solver
Quantizes d2R/dx2 + (2m/hbar^2)(E - V) R = 0 by Numerov shooting with
node-count bisection, producing stationary states at rest (S = -E t).
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.exceptions import ConvergenceError
from core.models import Grid1D, StationaryState1D, Units, count_nodes, normalize
from core.observability import StructuredLogger, measure_performance
from core.potentials import Potential1D, evaluate_potential

from .numerov import Direction, EigenvalueSearch, SturmProblem, stitch
from .potential import QField1D, curvature_tolerance, quantum_potential_1d

logger = StructuredLogger("eigensolver")


class ShootingConfig(BaseModel):
    """
    Shooting parameters.

    energy_bracket defaults to [min V, min(V at the two ends)] for soft
    boundaries and to an automatically widened range with hard walls.
    """
    model_config = ConfigDict(frozen=True)

    energy_bracket: Optional[Tuple[float, float]] = None
    max_states: int = Field(default=10, ge=1, le=500)
    bisection_tol: float = Field(default=1e-10, gt=0.0, lt=1e-2)
    match_point: float = Field(default=0.5, gt=0.0, lt=1.0)
    decay_threshold: float = Field(default=1e-8, gt=0.0)

    @model_validator(mode="after")
    def check_bracket(self):
        if self.energy_bracket is not None:
            lo, hi = self.energy_bracket
            if not lo < hi:
                raise ValueError(f"energy_bracket must satisfy E_lo < E_hi, got {self.energy_bracket}")
        return self


@dataclass(frozen=True)
class StateConvergence:
    """Search record of one state."""
    index: int
    iterations: int
    mismatch: float
    residual: float


@dataclass(frozen=True)
class RejectedState:
    """State dropped by post-solve verification."""
    index: int
    energy: float
    boundary_value: float
    reason: str


@dataclass
class SpectrumResult1D:
    """Ordered bound states with their search records."""
    states: List[StationaryState1D]
    convergence: List[StateConvergence]
    partial: bool = False
    rejected: List[RejectedState] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.states])


def eigenstate_residual(R: np.ndarray, V: np.ndarray, energy: float, h: float,
                        units: Units = Units()) -> float:
    """max |R'' + (2m/hbar^2)(E - V) R| h^2 / max|R| over interior samples."""
    R = np.asarray(R, dtype=float)
    d2 = R[2:] - 2.0 * R[1:-1] + R[:-2]
    source = h * h * units.shooting * (energy - V[1:-1]) * R[1:-1]
    return float(np.max(np.abs(d2 + source)) / np.max(np.abs(R)))


def default_bracket(V: np.ndarray, walls: Tuple[bool, bool]) -> Tuple[float, float]:
    lo = float(np.min(V))
    soft = [float(v) for v, wall in zip((V[0], V[-1]), walls) if not wall]
    hi = min(soft) if soft else lo
    return lo, hi


@measure_performance("solve_bound_states_1d", logger)
def solve_bound_states_1d(potential: Potential1D, grid: Grid1D, units: Units = Units(),
                          config: ShootingConfig = ShootingConfig()) -> SpectrumResult1D:
    """
    Lowest ``config.max_states`` bound states of a 1D potential.

    Returns a partial result (``partial=True``) when the bracket holds fewer
    states. States whose normalized amplitude does not decay at a soft
    boundary are rejected and listed in ``rejected``.
    """
    sampled = evaluate_potential(potential, grid, units)
    V = sampled.values
    h = grid.spacing
    problem = SturmProblem(q=units.shooting * V, w=units.shooting, h=h,
                           match_fraction=config.match_point)
    search = EigenvalueSearch(problem, config.bisection_tol)

    if config.energy_bracket is not None:
        lower, upper = config.energy_bracket
    else:
        lower, upper = default_bracket(V, sampled.hard_walls)
        if sampled.any_wall:
            # lowest box level over the full width, then widen until enough states
            width = grid.x_max - grid.x_min
            upper = search.grow_upper(lower, lower + units.kinetic * (np.pi / width) ** 2 * 2.0,
                                      config.max_states)
    if not upper > lower:
        raise ConvergenceError(
            "Empty energy bracket: potential is not confining on this grid",
            context={"lower": lower, "upper": upper}
        )

    roots = search.locate_all(lower, upper, config.max_states)
    result = SpectrumResult1D(states=[], convergence=[])
    if len(roots) < config.max_states:
        result.partial = True
        message = f"Bracket [{lower}, {upper}] holds {len(roots)} of {config.max_states} requested states"
        result.warnings.append(message)
        logger.warning(message, found=len(roots), requested=config.max_states)

    for root in roots:
        shot = search.shot(root.value)
        R = normalize(stitch(problem, shot), grid)
        energy = root.value
        nodes = count_nodes(R)
        for end, wall in ((1, sampled.hard_walls[0]), (-2, sampled.hard_walls[1])):
            if not wall and abs(R[end]) > config.decay_threshold:
                reason = f"amplitude {abs(R[end]):.3e} at the boundary exceeds decay threshold"
                result.rejected.append(RejectedState(root.index, energy, float(abs(R[end])), reason))
                logger.warning("State rejected: not confined", index=root.index, energy=energy,
                               boundary_value=float(abs(R[end])))
                break
        else:
            if nodes != root.index:
                result.warnings.append(f"state {root.index} has {nodes} nodes")
                logger.warning("Node count differs from state index", index=root.index, nodes=nodes)
            result.states.append(StationaryState1D(grid=grid, R=R, energy=energy, nodes=nodes, units=units))
            result.convergence.append(StateConvergence(
                index=root.index, iterations=root.iterations, mismatch=root.mismatch,
                residual=eigenstate_residual(R, V, energy, h, units)
            ))
            logger.debug("State solved", index=root.index, energy=energy, iterations=root.iterations)
    return result


def shoot(potential: Potential1D, energy: float, grid: Grid1D, units: Units = Units(),
          direction: Direction = Direction.FORWARD, stop: Optional[int] = None):
    """
    Single Numerov shot at a trial energy.

    Returns (R, log-derivative at the stopping sample, interior node count);
    R covers the integrated samples in lattice order.
    """
    V = evaluate_potential(potential, grid, units).values
    problem = SturmProblem(q=units.shooting * V, w=units.shooting, h=grid.spacing)
    R = problem.integrate(energy, direction, stop)
    h = grid.spacing
    if direction is Direction.FORWARD:
        end, slope = R[-1], (3.0 * R[-1] - 4.0 * R[-2] + R[-3]) / (2.0 * h)
    else:
        end, slope = R[0], (-3.0 * R[0] + 4.0 * R[1] - R[2]) / (2.0 * h)
    log_derivative = slope / end if end != 0.0 else np.inf
    interior = R[1:-1] if len(R) == grid.n_points else R
    return R, float(log_derivative), count_nodes(interior)


@dataclass(frozen=True, eq=False)
class StationarityReport:
    """Pointwise Q + V - E of a 1D eigenstate."""
    q_field: QField1D
    deviation: np.ndarray
    tolerance: np.ndarray
    max_relative: float

    @property
    def within_tolerance(self) -> bool:
        keep = self.q_field.unmasked
        return bool(np.all(np.abs(self.deviation[keep]) <= self.tolerance[keep]))


def stationarity_residual(state: StationaryState1D, potential: Potential1D) -> StationarityReport:
    """Q + V - E on unmasked samples, with the pointwise curvature tolerance."""
    units = state.units
    V = evaluate_potential(potential, state.grid, units).values
    q_field = quantum_potential_1d(state.R, state.grid, units)
    deviation = q_field.Q + V - state.energy
    tolerance = curvature_tolerance(state.R, state.grid.spacing, state.energy, units)
    keep = q_field.unmasked
    scale = abs(state.energy) if state.energy != 0 else 1.0
    return StationarityReport(
        q_field=q_field, deviation=deviation, tolerance=tolerance,
        max_relative=float(np.max(np.abs(deviation[keep])) / scale),
    )
