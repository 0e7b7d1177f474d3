#!/usr/bin/env python3
"""
Reproduce
The full verification battery: analytic spectra, stationarity of Q + V,
angular quantization from continuity, continuity and operator-ratio
identities, the rest theorem with classical controls, winding, scale
invariance and integrator energy drift. Each claim writes its own CSV and
contributes one line to summary.csv.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from core.exceptions import DiagnosticFailure
from core.models import (
    AzimuthalParity,
    Grid1D,
    MotionMode,
    PolarGrid,
    RadialGrid,
    SeparableCentralState,
    StationaryState1D,
    Units,
)
from core.observability import StructuredLogger
from core.potentials import CentralPotential, Potential1D
from diagnostics import (
    ActionGradients,
    Coordinate,
    action_winding,
    continuity_report,
    operator_ratios,
    radial_gradient_for_constant,
    verify_turning_point_argument,
)
from dynamics import ForceField1D, PhasePoint, classical_orbit, energy_drift, integrate_canonical
from quantum import (
    ShootingConfig,
    quantum_potential_1d,
    quantum_potential_spherical,
    solve_azimuthal,
    solve_bound_states_1d,
    solve_central_spectrum,
    solve_channels,
    solve_polar,
    stationarity_residual,
)
from quantum.central import CentralSpectrum
from quantum.oracles import box_energy, box_state, harmonic_energy, hydrogen_energy

from . import battery
from .artifacts import checks_frame, write_csv
from .battery import Check, bounded, exceeding
from .config_file import RunConfig

logger = StructuredLogger("cli.reproduce")

BOX_POINTS = 2001
SPECTRUM_TOLERANCE = 1e-6
HYDROGEN_TOLERANCE = 1e-5
EIGENFUNCTION_TOLERANCE = 1e-5
STATIONARITY_TOLERANCE = 1e-4
REFINEMENT_GAIN = 3.5
ANGULAR_TOLERANCE = 1e-8
VIOLATION_THRESHOLD = 0.1
SCALING_FACTORS = (-3.0, 0.01, 7.0)
SCALING_TOLERANCE = 1e-8
CLASSICAL_ENERGY = -0.2

# hydrogen table: h = 0.01 out to 40 n_max^2
HYDROGEN_N_MAX = 5

# states used by the continuity, ratio and rest claims
BATTERY_N_MAX = 3
POLAR_POINTS = 201


@dataclass(frozen=True)
class ClaimResult:
    key: str
    title: str
    checks: List[Check]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]


class Reproduction:
    """Solved states shared across claims, computed on first use."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.units: Units = config.units.build()
        self.seed = config.run.seed
        self.rest_points = config.trajectory.rest_points

    # 1D
    def box_states(self, n_points: int = BOX_POINTS) -> Tuple[Potential1D, List[StationaryState1D]]:
        potential = Potential1D.box(1.0)
        grid = Grid1D(0.0, 1.0, n_points)
        result = solve_bound_states_1d(potential, grid, self.units, ShootingConfig(max_states=10))
        return potential, result.states

    @cached_property
    def box(self) -> Tuple[Potential1D, List[StationaryState1D]]:
        return self.box_states()

    @cached_property
    def harmonic(self) -> Tuple[Potential1D, List[StationaryState1D]]:
        potential = Potential1D.harmonic(1.0)
        grid = Grid1D(-10.0, 10.0, BOX_POINTS)
        result = solve_bound_states_1d(potential, grid, self.units, ShootingConfig(max_states=10))
        return potential, result.states

    # central
    @cached_property
    def coulomb(self) -> CentralPotential:
        return CentralPotential.coulomb(1.0)

    @cached_property
    def hydrogen_table(self):
        grid = RadialGrid.for_shells(HYDROGEN_N_MAX)
        return solve_channels(self.coulomb, range(HYDROGEN_N_MAX), grid, self.units,
                              ShootingConfig(), n_max=HYDROGEN_N_MAX)

    def _spectrum(self, mode: MotionMode) -> CentralSpectrum:
        return solve_central_spectrum(
            self.coulomb, BATTERY_N_MAX, RadialGrid.for_shells(BATTERY_N_MAX), PolarGrid(POLAR_POINTS),
            self.units, ShootingConfig(), AzimuthalParity.COS, mode,
        )

    @cached_property
    def rest_spectrum(self) -> CentralSpectrum:
        return self._spectrum(MotionMode.REST)

    @cached_property
    def circulating_spectrum(self) -> CentralSpectrum:
        return self._spectrum(MotionMode.CIRCULATING)

    def hydrogen_state(self, key=(2, 1, 1)) -> SeparableCentralState:
        return self.rest_spectrum.states[key]


def coverage_check(spectrum: CentralSpectrum, label: str, n_max: int = BATTERY_N_MAX) -> Check:
    """Fails when any (n, l, m) with n <= n_max is absent from the spectrum."""
    missing = spectrum.missing(n_max)
    name = f"{label} holds every state with n <= {n_max}"
    if missing:
        name += " (missing " + ", ".join(f"({n},{l},{m})" for n, l, m in missing) + ")"
    return Check(name, len(missing), 0, not missing)


def claim_box_spectrum(ctx: Reproduction) -> List[Check]:
    _, states = ctx.box
    checks = []
    for index, state in enumerate(states):
        n = index + 1
        exact = box_energy(n, 1.0, ctx.units)
        checks.append(bounded(f"E_{n} relative error", abs(state.energy - exact) / exact, SPECTRUM_TOLERANCE))
        reference = box_state(n, state.grid.points)
        sign = np.sign(np.dot(state.R, reference)) or 1.0
        checks.append(bounded(f"R_{n} max distance to sqrt(2) sin(n pi x)",
                              np.max(np.abs(sign * state.R - reference)), EIGENFUNCTION_TOLERANCE))
    if len(states) < 10:
        checks.append(Check("states found", len(states), 10, False))
    return checks


def claim_signed_amplitude(ctx: Reproduction) -> List[Check]:
    state = ctx.box[1][1]
    return [
        Check("n=2 node count", state.nodes, 1, state.nodes == 1),
        Check("n=2 amplitude takes both signs", float(np.min(state.R)), 0.0,
              bool(np.min(state.R) < 0.0 < np.max(state.R))),
    ]


def claim_stationarity(ctx: Reproduction) -> List[Check]:
    potential, coarse = ctx.box
    _, fine = ctx.box_states(2 * BOX_POINTS - 1)
    checks = []
    for index, (a, b) in enumerate(zip(coarse, fine)):
        n = index + 1
        r_coarse = stationarity_residual(a, potential).max_relative
        r_fine = stationarity_residual(b, potential).max_relative
        checks.append(bounded(f"box n={n} max |Q + V - E| / |E|", r_coarse, STATIONARITY_TOLERANCE))
        gain = r_coarse / r_fine if r_fine > 0 else np.inf
        checks.append(Check(f"box n={n} refinement gain at {2 * BOX_POINTS - 1} points", gain,
                            REFINEMENT_GAIN, bool(gain > REFINEMENT_GAIN)))
    harmonic, states = ctx.harmonic
    for index, state in enumerate(states):
        report = stationarity_residual(state, harmonic)
        keep = report.q_field.unmasked
        worst = float(np.max(np.abs(report.deviation[keep]) / report.tolerance[keep]))
        checks.append(Check(f"harmonic n={index} |Q + V - E| / pointwise tolerance", worst, 1.0,
                            report.within_tolerance))
    return checks


def claim_harmonic_spectrum(ctx: Reproduction) -> List[Check]:
    _, states = ctx.harmonic
    checks = [
        bounded(f"E_{n} relative error", abs(s.energy - harmonic_energy(n, 1.0, ctx.units))
                / harmonic_energy(n, 1.0, ctx.units), SPECTRUM_TOLERANCE)
        for n, s in enumerate(states)
    ]
    if len(states) < 10:
        checks.append(Check("states found", len(states), 10, False))
    return checks


def claim_hydrogen_spectrum(ctx: Reproduction) -> List[Check]:
    by_n: Dict[int, List[float]] = {}
    checks = []
    for l in range(HYDROGEN_N_MAX):
        found = {s.n_r + l + 1 for s in ctx.hydrogen_table.get(l, [])}
        absent = [n for n in range(l + 1, HYDROGEN_N_MAX + 1) if n not in found]
        checks.append(Check(f"l={l} channel holds n = {l + 1}..{HYDROGEN_N_MAX}", len(absent), 0, not absent))
    for l, solutions in ctx.hydrogen_table.items():
        for solution in solutions:
            n = solution.n_r + l + 1
            if n > HYDROGEN_N_MAX:
                continue
            exact = hydrogen_energy(n, 1.0, ctx.units)
            checks.append(bounded(f"n={n} l={l} relative error", abs(solution.energy - exact) / abs(exact),
                                  HYDROGEN_TOLERANCE))
            by_n.setdefault(n, []).append(solution.energy)
    for n, energies in sorted(by_n.items()):
        spread = (max(energies) - min(energies)) / abs(hydrogen_energy(n, 1.0, ctx.units))
        checks.append(Check(f"n={n} degeneracy across {len(energies)} l values", spread, HYDROGEN_TOLERANCE,
                            bool(spread < HYDROGEN_TOLERANCE and len(energies) == n)))
    return checks


def claim_angular(ctx: Reproduction) -> List[Check]:
    grid = PolarGrid(POLAR_POINTS)
    l_max = 5
    checks = []
    for m in range(l_max + 1):
        for solution in solve_polar(m, l_max, grid, ctx.units):
            checks.append(bounded(f"alpha_theta^2 l={solution.l} m={m}", solution.closed_form_error,
                                  ANGULAR_TOLERANCE))
        parities = (AzimuthalParity.CONST,) if m == 0 else (AzimuthalParity.COS, AzimuthalParity.SIN)
        for parity in parities:
            azimuthal = solve_azimuthal(m, parity, ctx.units)
            checks.append(Check(f"alpha_phi m={m} {parity.value}", azimuthal.alpha_phi, m * ctx.units.hbar,
                                azimuthal.alpha_phi == m * ctx.units.hbar))
    return checks


def _impostor(ctx: Reproduction) -> SeparableCentralState:
    """1s radial amplitude under an l = 1 polar factor, declared at E_1."""
    ground = ctx.rest_spectrum.states[(1, 0, 0)]
    polar = ctx.rest_spectrum.polar[(1, 0)]
    return SeparableCentralState(
        radial_grid=ground.radial_grid, R_r=ground.R_r, polar_grid=polar.grid, R_theta=polar.R_theta,
        parity=AzimuthalParity.CONST, m=0, energy=ground.energy, alpha_theta_sq=polar.alpha_theta_sq,
        alpha_phi=0.0, mode=MotionMode.REST, units=ground.units, n=1, l=1,
    )


def claim_continuity(ctx: Reproduction) -> List[Check]:
    checks = []
    for label, spectrum in (("rest", ctx.rest_spectrum), ("circulating", ctx.circulating_spectrum)):
        checks.append(coverage_check(spectrum, f"{label} spectrum"))
        for _, state in sorted(spectrum.states.items()):
            checks += battery.continuity_checks(state)

    ground = ctx.rest_spectrum.states[(1, 0, 0)]
    r = ground.radial_grid.points
    injected = continuity_report(ground, ActionGradients.for_state(ground).with_radial(r))
    checks.append(exceeding("injected W_r' = r residual", injected.residual_norm, VIOLATION_THRESHOLD))

    impostor = _impostor(ctx)
    ratio = operator_ratios(impostor, ctx.coulomb).hamiltonian
    deviation = ratio.real_max_deviation + abs(ratio.real_mean - impostor.energy)
    checks.append(exceeding("mismatched-E impostor H ratio deviation", deviation, VIOLATION_THRESHOLD))
    return checks


def claim_turning_points(ctx: Reproduction) -> List[Check]:
    checks = [coverage_check(ctx.rest_spectrum, "rest spectrum")]
    for _, state in sorted(ctx.rest_spectrum.states.items()):
        checks += battery.turning_point_checks(state)

    ground = ctx.rest_spectrum.states[(1, 0, 0)]
    gradient = radial_gradient_for_constant(ground, -5.0)
    synthetic = continuity_report(ground, ActionGradients.for_state(ground).with_radial(gradient))
    checks.append(bounded("synthetic c_theta recovered from the radial channel",
                          synthetic.constants.c_theta_radial - 5.0, 1e-2))
    result = verify_turning_point_argument(ground, np.zeros(ground.radial_grid.n_points), 5.0, Coordinate.RADIAL)
    checks.append(exceeding("synthetic c_theta = 5 turning-point RHS", result.rhs, VIOLATION_THRESHOLD))
    checks.append(exceeding("synthetic c_theta = 5 LHS - RHS", result.lhs - result.rhs, VIOLATION_THRESHOLD))
    return checks


def claim_operator_ratios(ctx: Reproduction) -> List[Check]:
    checks = []
    for label, spectrum in (("rest", ctx.rest_spectrum), ("circulating", ctx.circulating_spectrum)):
        checks.append(coverage_check(spectrum, f"{label} spectrum"))
        for _, state in sorted(spectrum.states.items()):
            checks += battery.ratio_checks(state, ctx.coulomb)
    return checks


def claim_rest(ctx: Reproduction) -> List[Check]:
    count, seed = ctx.rest_points, ctx.seed
    box, box_states = ctx.box
    harmonic, harmonic_states = ctx.harmonic
    hydrogen = ctx.hydrogen_state((2, 1, 1))
    return [
        battery.rest_checks(box_states[1], box, count, seed, name="box n=2"),
        battery.rest_checks(harmonic_states[1], harmonic, count, seed, name="harmonic n=1"),
        battery.rest_checks(hydrogen, ctx.coulomb, count, seed, name="hydrogen (2,1,1)"),
        battery.rest_checks(harmonic_states[1], harmonic, count, seed, quantum=False, name="harmonic n=1"),
        battery.rest_checks(hydrogen, ctx.coulomb, count, seed, quantum=False, name="hydrogen (2,1,1)"),
    ]


def claim_winding(ctx: Reproduction) -> List[Check]:
    checks = [coverage_check(ctx.circulating_spectrum, "circulating spectrum")]
    checks += [battery.winding_check(state) for _, state in sorted(ctx.circulating_spectrum.states.items())]
    phi = np.linspace(0.0, 2.0 * np.pi, 257)
    half = action_winding(np.full(phi.size, 1.5 * ctx.units.hbar), phi, ctx.units)
    checks.append(bounded("alpha_phi = 1.5 hbar winding - 1.5", half.winding - 1.5, 1e-10))
    checks.append(Check("alpha_phi = 1.5 hbar flagged non-integer", half.distance, 1e-10, not half.integer))
    return checks


def _relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    keep = np.isfinite(a) & np.isfinite(b)
    scale = max(float(np.max(np.abs(a[keep]))), 1e-300)
    return float(np.max(np.abs(a[keep] - b[keep])) / scale)


def claim_scaling(ctx: Reproduction) -> List[Check]:
    checks = []
    _, box_states = ctx.box
    state_1d = box_states[2]
    base_1d = quantum_potential_1d(state_1d.R, state_1d.grid, ctx.units).Q
    hydrogen = ctx.hydrogen_state((2, 1, 1))
    base_q = quantum_potential_spherical(hydrogen)
    base_report = continuity_report(hydrogen)
    base_ratios = operator_ratios(hydrogen, ctx.coulomb)
    for c in SCALING_FACTORS:
        scaled_1d = quantum_potential_1d(c * state_1d.R, state_1d.grid, ctx.units).Q
        checks.append(bounded(f"c={c:g} 1D Q", _relative_gap(base_1d, scaled_1d), SCALING_TOLERANCE))
        scaled = hydrogen.scaled(c)
        q = quantum_potential_spherical(scaled)
        checks.append(bounded(f"c={c:g} Q_r", _relative_gap(base_q.Q_r, q.Q_r), SCALING_TOLERANCE))
        report = continuity_report(scaled)
        checks.append(bounded(f"c={c:g} continuity residual", report.residual_norm - base_report.residual_norm,
                              SCALING_TOLERANCE))
        ratios = operator_ratios(scaled, ctx.coulomb)
        for base, other in zip((base_ratios.hamiltonian, base_ratios.angular_sq, base_ratios.lz_sq),
                               (ratios.hamiltonian, ratios.angular_sq, ratios.lz_sq)):
            gap = abs(other.real_mean - base.real_mean) / max(abs(base.real_mean), 1e-300)
            checks.append(bounded(f"c={c:g} {base.name} ratio", gap, SCALING_TOLERANCE))
    return checks


def claim_energy_drift(ctx: Reproduction) -> List[Check]:
    field_ = ForceField1D.classical(Potential1D.harmonic(1.0), ctx.units, bounds=(-10.0, 10.0))
    start = PhasePoint.at_rest(1.0)
    small = energy_drift(integrate_canonical(field_, start, 1e-3, 10_000, "harmonic classical"))
    large = energy_drift(integrate_canonical(field_, start, 0.5, 200, "harmonic classical"))
    return [
        bounded("dt=1e-3 max |H - H0|", small.max_deviation, 1e-6),
        exceeding("dt=0.5 max |H - H0|", large.max_deviation, 1e-3),
    ]


def claim_classical_orbits(ctx: Reproduction) -> List[Check]:
    checks = []
    cases = (("l=0 radial", 0.0, 0.0, 5000), ("l=0.7 inclined", 0.7, 0.3, 30_000))
    for label, l, inclination, n_steps in cases:
        orbit = classical_orbit(ctx.coulomb, CLASSICAL_ENERGY, l, ctx.units, n_steps=n_steps,
                                inclination=inclination)
        checks += [
            bounded(f"{label} max |p_phi - p_phi(0)|", orbit.p_phi_drift, 1e-9),
            bounded(f"{label} max |alpha_theta^2 - l^2|", orbit.alpha_theta_sq_drift, 1e-9),
            bounded(f"{label} max |H - E|", orbit.energy_drift, 1e-3),
        ]
    inner, _ = orbit.reference.turning_points
    checks.append(bounded("l=0.7 pericenter relative to the inner turning point",
                          abs(orbit.r_range[0] - inner) / inner, 1e-2))
    return checks


CLAIMS: List[Tuple[str, str, Callable[[Reproduction], List[Check]]]] = [
    ("box_spectrum", "Box spectrum and eigenfunctions", claim_box_spectrum),
    ("signed_amplitude", "Sign-changing amplitude accepted", claim_signed_amplitude),
    ("stationarity", "Q + V = E on every 1D eigenstate", claim_stationarity),
    ("harmonic_spectrum", "Harmonic spectrum", claim_harmonic_spectrum),
    ("hydrogen_spectrum", "Hydrogen spectrum and l degeneracy", claim_hydrogen_spectrum),
    ("angular", "Angular constants from continuity", claim_angular),
    ("continuity", "Continuity verdicts and synthetic violations", claim_continuity),
    ("turning_points", "Turning-point argument", claim_turning_points),
    ("operator_ratios", "Constants of motion are operator eigenvalues", claim_operator_ratios),
    ("rest", "Bound states at rest; classical controls move", claim_rest),
    ("winding", "Action winding", claim_winding),
    ("scaling", "Invariance under R -> cR", claim_scaling),
    ("energy_drift", "Verlet energy drift", claim_energy_drift),
    ("classical_orbits", "Q-off orbits keep p_phi, alpha_theta^2 and E", claim_classical_orbits),
]


def run_claims(config: RunConfig, only: Optional[List[str]] = None) -> List[ClaimResult]:
    """Evaluate the claims (all, or the keys in ``only``) in order."""
    ctx = Reproduction(config)
    results = []
    for key, title, claim in CLAIMS:
        if only is not None and key not in only:
            continue
        checks = [Check(c.name, c.value, c.tolerance, c.passed, key) for c in claim(ctx)]
        result = ClaimResult(key, title, checks)
        logger.info("Claim evaluated", claim=key, checks=len(checks), passed=result.passed)
        results.append(result)
    return results


def summary_frame(results: List[ClaimResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"claim": r.key, "description": r.title, "checks [1]": len(r.checks),
          "failed [1]": len(r.failed), "passed": r.passed} for r in results],
        columns=["claim", "description", "checks [1]", "failed [1]", "passed"],
    )


def reproduce(config: RunConfig, console: Console) -> int:
    """Write <claim>.csv and summary.csv; exit 3 when any claim fails."""
    out: Path = config.run.out
    results = run_claims(config)
    for result in results:
        write_csv(checks_frame(c.row() for c in result.checks), out / f"{result.key}.csv")
    write_csv(summary_frame(results), out / "summary.csv")

    table = Table(title="reproduce")
    table.add_column("claim")
    table.add_column("checks", justify="right")
    table.add_column("status")
    for result in results:
        status = "[green]pass[/green]" if result.passed else f"[red]FAIL[/red] ({len(result.failed)})"
        table.add_row(result.title, str(len(result.checks)), status)
    console.print(table)

    failed = [name for r in results for name in r.failed]
    if failed:
        raise DiagnosticFailure(failed)
    return 0
