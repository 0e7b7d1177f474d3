#!/usr/bin/env python3
"""
Rest Check
A bound stationary state is at rest: (q, p = 0) is a fixed point of the
Q-on canonical flow at every point of the support, including m != 0
states in the real-eigenfunction convention.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.config import ParallelConfig, get_settings
from core.exceptions import MaskedSampleError, ValidationError
from core.models import MotionMode, SeparableCentralState, StationaryState1D
from core.observability import StructuredLogger, measure_performance
from core.potentials import CentralPotential, Potential1D
from quantum.potential import node_mask

from .fields import CentralForceField, ForceField, force_field
from .integrator import PhasePoint, integrate_canonical

logger = StructuredLogger("dynamics.rest")

State = Union[StationaryState1D, SeparableCentralState]


@dataclass(frozen=True)
class RestVerdict:
    point: Tuple[float, ...]
    displacement: float
    passed: bool
    skipped: bool = False
    note: str = ""


@dataclass(frozen=True)
class RestCheckReport:
    verdicts: List[RestVerdict]
    tolerance: float
    quantum: bool

    @property
    def checked(self) -> List[RestVerdict]:
        return [v for v in self.verdicts if not v.skipped]

    @property
    def all_passed(self) -> bool:
        checked = self.checked
        return bool(checked) and all(v.passed for v in checked)

    @property
    def max_displacement(self) -> float:
        return max((v.displacement for v in self.checked), default=float("nan"))


def sample_points(state: State, count: int, seed: int = 0) -> List[Tuple[float, ...]]:
    """
    Random interior points where the probability weight is at least
    density_floor of its maximum, jittered within half a lattice step.
    """
    rng = np.random.default_rng(seed)
    floor = get_settings().numerics.density_floor

    def draw(weight: np.ndarray, points: np.ndarray, h: float) -> np.ndarray:
        candidates = np.flatnonzero(weight >= floor * weight.max())
        candidates = candidates[(candidates > 0) & (candidates < points.size - 1)]
        picks = rng.choice(candidates, size=count, replace=candidates.size < count)
        return points[picks] + rng.uniform(-0.5, 0.5, size=count) * h

    if isinstance(state, StationaryState1D):
        grid = state.grid
        return [(float(x),) for x in draw(state.R ** 2, grid.points, grid.spacing)]

    r = state.radial_grid.points
    theta = state.polar_grid.points
    radii = draw((r * state.R_r) ** 2, r, state.radial_grid.spacing)
    angles = draw(state.R_theta ** 2 * np.sin(theta), theta, state.polar_grid.spacing)
    azimuths = []
    while len(azimuths) < count:
        phi = rng.uniform(0.0, 2.0 * np.pi)
        if state.R_phi(phi) ** 2 >= floor:
            azimuths.append(phi)
    return [(float(a), float(b), float(c)) for a, b, c in zip(radii, angles, azimuths)]


def _in_node_window(state: State, point: Tuple[float, ...]) -> bool:
    if isinstance(state, StationaryState1D):
        grid = state.grid
        i = int(round((point[0] - grid.x_min) / grid.spacing))
        return bool(node_mask(state.R)[min(max(i, 0), grid.n_points - 1)])
    rg, pg = state.radial_grid, state.polar_grid
    i = min(max(int(round(point[0] / rg.spacing)) - 1, 0), rg.n_points - 1)
    j = min(max(int(round(point[1] / pg.spacing)) - 1, 0), pg.n_points - 1)
    eps = get_settings().numerics.node_epsilon
    return bool(node_mask(state.R_r)[i] or node_mask(state.R_theta)[j]
                or abs(state.R_phi(point[2])) < eps)


@measure_performance("rest_check", logger)
def rest_check(state: State, potential: Union[Potential1D, CentralPotential],
               points: Optional[Sequence[Sequence[float]]] = None, count: int = 10,
               dt: float = 1e-3, n_steps: int = 10_000, quantum: bool = True, seed: int = 0,
               parallel: Optional[ParallelConfig] = None) -> RestCheckReport:
    """
    Integrate from (q0, p = 0) at each point; a point passes when its
    largest displacement stays below rest_tolerance. Points inside a node
    window are skipped with a note.
    """
    settings = get_settings()
    tolerance = settings.numerics.rest_tolerance
    parallel = parallel or settings.parallel
    field_ = force_field(state, potential, quantum=quantum)
    chosen = [tuple(float(v) for v in p) for p in points] if points is not None \
        else sample_points(state, count, seed)

    def run(point: Tuple[float, ...]) -> RestVerdict:
        if _in_node_window(state, point):
            return RestVerdict(point, float("nan"), False, skipped=True, note="node window")
        try:
            trajectory = integrate_canonical(field_, PhasePoint.at_rest(*point), dt, n_steps)
        except MaskedSampleError as exc:
            return RestVerdict(point, float("nan"), False, skipped=True, note=exc.message)
        displacement = trajectory.max_displacement()
        note = "left the domain" if trajectory.exited else ""
        passed = displacement < tolerance and not trajectory.exited
        return RestVerdict(point, displacement, passed, note=note)

    if parallel.enabled and len(chosen) > 1:
        with ThreadPoolExecutor(max_workers=parallel.max_workers) as pool:
            verdicts = list(pool.map(run, chosen))
    else:
        verdicts = [run(point) for point in chosen]

    report = RestCheckReport(verdicts, tolerance, quantum)
    logger.info("Rest check", quantum=quantum, points=len(verdicts),
                passed=sum(v.passed for v in verdicts), max_displacement=report.max_displacement)
    return report


@dataclass(frozen=True)
class CirculationResult:
    """Spread of r and theta and the mean azimuthal rate of a circulating trajectory."""
    r_spread: float
    theta_spread: float
    phi_rate: float
    expected_rate: float


def circulation_check(state: SeparableCentralState, potential: CentralPotential,
                      point: Tuple[float, float, float], dt: float = 1e-3,
                      n_steps: int = 10_000) -> CirculationResult:
    """
    Launch a circulating state with p_phi = alpha_phi: r and theta stay
    fixed while phi advances at alpha_phi / (m r^2 sin^2 theta).
    """
    if state.mode is not MotionMode.CIRCULATING:
        raise ValidationError("Circulation check needs a circulating state", field="mode")
    field_: ForceField = CentralForceField.from_state(state, potential)
    r, theta, _ = point
    trajectory = integrate_canonical(field_, PhasePoint(q=point, p=(0.0, 0.0, state.alpha_phi)), dt, n_steps)
    unwrapped = np.unwrap(trajectory.q[:, 2])
    rate = float(np.polyfit(trajectory.t, unwrapped, 1)[0])
    return CirculationResult(
        r_spread=float(np.ptp(trajectory.q[:, 0])),
        theta_spread=float(np.ptp(trajectory.q[:, 1])),
        phi_rate=rate,
        expected_rate=state.alpha_phi / (state.units.mass * r * r * np.sin(theta) ** 2),
    )
