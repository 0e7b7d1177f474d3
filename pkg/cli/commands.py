#!/usr/bin/env python3
"""
Commands
solve1d, solve-central, verify and trajectory. Each takes the validated run
configuration, writes its artifacts under ``run.out`` and returns the exit
status; failures propagate as library exceptions carrying exit codes.
"""

from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from core.exceptions import ConfigurationError, ConvergenceError, DiagnosticFailure
from core.models import StationaryState1D
from core.observability import StructuredLogger
from core.potentials import PotentialKind
from dynamics import PhasePoint, energy_drift, force_field, integrate_canonical
from quantum import solve_bound_states_1d, solve_central_spectrum
from quantum.central import CentralSpectrum
from quantum.oracles import box_energy, harmonic3d_energy, harmonic_energy, hydrogen_energy

from .artifacts import (
    checks_frame,
    column,
    load_state_bundle,
    save_state_bundle,
    spectrum_frame,
    states_frame,
    trajectory_frame,
    write_csv,
)
from .battery import state_checks
from .config_file import PotentialSpec, RunConfig

logger = StructuredLogger("cli.commands")


def _oracle_1d(config: RunConfig, count: int) -> Optional[Dict[int, float]]:
    spec = config.potential
    units = config.units.build()
    if spec.kind is PotentialKind.BOX:
        return {i: box_energy(i + 1, spec.a, units) for i in range(count)}
    if spec.kind is PotentialKind.HARMONIC:
        return {i: harmonic_energy(i, spec.omega, units) for i in range(count)}
    return None


def _oracle_central(config: RunConfig, n: int, l: int) -> Optional[float]:
    spec = config.potential
    units = config.units.build()
    if spec.kind is PotentialKind.COULOMB:
        return hydrogen_energy(n, spec.z, units)
    if spec.kind is PotentialKind.HARMONIC3D:
        return harmonic3d_energy(n - l - 1, l, spec.omega, units)
    return None


def solve_1d_states(config: RunConfig):
    units = config.units.build()
    potential = config.potential.build_1d()
    grid = config.grid.grid_1d(potential)
    result = solve_bound_states_1d(potential, grid, units, config.shooting.build())
    if not result.states:
        raise ConvergenceError("No bound state found in the energy bracket",
                               context={"potential": config.potential.kind.value})
    return potential, result


def solve1d(config: RunConfig, console: Console) -> int:
    """Spectrum and eigenfunctions of a 1D potential: spectrum.csv and states.csv."""
    potential, result = solve_1d_states(config)
    out = config.run.out
    spectrum = spectrum_frame(result.states, _oracle_1d(config, len(result.states)))
    write_csv(spectrum, out / "spectrum.csv")
    write_csv(states_frame(result.states, potential), out / "states.csv")

    table = Table(title=f"{config.potential.kind.value} spectrum")
    for name in spectrum.columns:
        table.add_column(escape(name), justify="right")
    for row in spectrum.itertuples(index=False):
        table.add_row(*(f"{v:.10g}" if isinstance(v, float) else str(v) for v in row))
    console.print(table)
    for warning in result.warnings:
        console.print(f"[yellow]warning:[/yellow] {escape(warning)}")
    return 0


def solve_central(config: RunConfig) -> Tuple[object, CentralSpectrum]:
    spec = config.central
    potential = config.potential.build_central()
    units = config.units.build()
    spectrum = solve_central_spectrum(
        potential, spec.n_max, config.grid.radial_grid(potential, spec.n_max, units), config.grid.polar_grid(),
        units, config.shooting.build(), spec.parity, spec.mode,
    )
    if spec.state not in spectrum.states:
        raise ConvergenceError(f"State {spec.state} was not found", context={"state": spec.state})
    return potential, spectrum


def solve_central_command(config: RunConfig, console: Console) -> int:
    """spectrum.csv, angular.csv and the bundle of the selected state under state/."""
    potential, spectrum = solve_central(config)
    out = config.run.out

    rows = []
    for (n, l, m), state in sorted(spectrum.states.items()):
        exact = _oracle_central(config, n, l)
        rows.append({
            "n [1]": n, "l [1]": l, "m [1]": m,
            column("energy", "energy"): state.energy,
            column("exact", "energy"): np.nan if exact is None else exact,
            "relative_error [1]": np.nan if exact is None else abs(state.energy - exact) / abs(exact),
            column("alpha_theta_sq", "action^2"): state.alpha_theta_sq,
            column("alpha_phi", "action"): state.alpha_phi,
        })
    frame = pd.DataFrame(rows)
    write_csv(frame, out / "spectrum.csv")
    write_csv(pd.DataFrame([
        {"l [1]": l, "m [1]": m, column("alpha_theta_sq", "action^2"): s.alpha_theta_sq,
         "relative_error [1]": s.closed_form_error}
        for (l, m), s in sorted(spectrum.polar.items())
    ]), out / "angular.csv")
    save_state_bundle(spectrum.states[config.central.state], out / "state", config.potential.describe(),
                      central=potential)

    table = Table(title=f"{config.potential.kind.value} states")
    for name in ("n", "l", "m", "E", "exact", "alpha_theta^2"):
        table.add_column(name, justify="right")
    for row in rows:
        table.add_row(str(row["n [1]"]), str(row["l [1]"]), str(row["m [1]"]),
                      f"{row[column('energy', 'energy')]:.10g}", f"{row[column('exact', 'energy')]:.10g}",
                      f"{row[column('alpha_theta_sq', 'action^2')]:.10g}")
    console.print(table)
    return 0


def _bundle_potential(entries: Dict[str, str]) -> PotentialSpec:
    data = {k: v for k, v in entries.items() if v != ""}
    return PotentialSpec.model_validate(data)


def verify(config: RunConfig, console: Console, state_dir: Optional[Path] = None) -> int:
    """
    Diagnostic battery over a stored bundle (``--state``) or the configured
    state; report.csv plus a pass/fail table. Any failure exits with 3.
    """
    if state_dir is not None:
        state, entries = load_state_bundle(state_dir)
        potential = _bundle_potential(entries).build_central() if entries else config.potential.build_central()
    else:
        potential, spectrum = solve_central(config)
        state = spectrum.states[config.central.state]

    checks = state_checks(state, potential, config.trajectory.rest_points, config.run.seed)
    write_csv(checks_frame(c.row() for c in checks), config.run.out / "report.csv")
    console.print(_checks_table("verify", checks))
    failed = [c.name for c in checks if not c.passed]
    if failed:
        raise DiagnosticFailure(failed)
    return 0


def _checks_table(title: str, checks) -> Table:
    table = Table(title=title)
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("tolerance", justify="right")
    table.add_column("status")
    for c in checks:
        status = "[green]pass[/green]" if c.passed else "[red]FAIL[/red]"
        table.add_row(escape(c.name), f"{c.value:.3e}", f"{c.tolerance:.1e}", status)
    return table


def trajectory(config: RunConfig, console: Console) -> int:
    """
    Canonical trajectory of a 1D state (``trajectory.state`` index) or the
    configured central state; trajectory.csv and summary.csv.
    """
    spec = config.trajectory
    quantum = not config.run.classical
    if config.potential.is_central:
        potential, spectrum = solve_central(config)
        state = spectrum.states[config.central.state]
        default_q = (float(state.radial_grid.points[np.argmax(np.abs(state.radial_grid.points * state.R_r))]),
                     0.5 * np.pi if state.m > 0 else 0.25 * np.pi, 0.1)
        state_id = "({},{},{})".format(*config.central.state)
    else:
        potential, result = solve_1d_states(config)
        if spec.state >= len(result.states):
            raise ConfigurationError(f"trajectory.state={spec.state} but only {len(result.states)} states were solved")
        state: StationaryState1D = result.states[spec.state]
        default_q = (float(state.grid.points[np.argmax(np.abs(state.R))]),)
        state_id = str(spec.state)

    q0 = tuple(spec.q0) if spec.q0 is not None else default_q
    p0 = tuple(spec.p0) if spec.p0 is not None else (0.0,) * len(q0)
    field_ = force_field(state, potential, quantum=quantum)
    path = integrate_canonical(field_, PhasePoint(q=q0, p=p0), spec.dt, spec.n_steps, state_id)
    drift = energy_drift(path)
    displacement = path.max_displacement()

    out = config.run.out
    write_csv(trajectory_frame(path), out / "trajectory.csv")
    summary = pd.DataFrame([{
        "state": state_id, "quantum": quantum, column("dt", "time"): spec.dt, "steps [1]": path.steps,
        "exited": path.exited, column("max_energy_drift", "energy"): drift.max_deviation,
        column("max_displacement", "length"): displacement,
        "at_rest": bool(displacement < 1e-9 and not path.exited),
    }])
    write_csv(summary, out / "summary.csv")
    console.print(f"state {state_id}  quantum={quantum}  steps={path.steps}  "
                  f"drift={drift.max_deviation:.3e}  displacement={displacement:.3e}"
                  + ("  [yellow](left the domain)[/yellow]" if path.exited else ""))
    return 0
