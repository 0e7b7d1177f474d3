#!/usr/bin/env python3
"""
Artifacts
CSV outputs with unit-annotated headers, and state bundles (radial.csv,
polar.csv, constants.csv) that carry a central state from solve-central to
verify. Floats are written with 17 significant digits so a bundle reloads
bit-identically.
"""

from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from core.exceptions import ConfigurationError, ConsistencyError
from core.models import (
    AzimuthalParity,
    MotionMode,
    PolarGrid,
    RadialGrid,
    SeparableCentralState,
    StationaryState1D,
    Units,
    uniformity_error,
)
from core.observability import StructuredLogger
from core.potentials import CentralPotential, Potential1D, evaluate_potential
from quantum.potential import quantum_potential_1d, quantum_potential_spherical

logger = StructuredLogger("cli.artifacts")

FLOAT_FORMAT = "%.17g"

RADIAL_FILE = "radial.csv"
POLAR_FILE = "polar.csv"
CONSTANTS_FILE = "constants.csv"


def column(name: str, unit: str) -> str:
    return f"{name} [{unit}]"


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("Artifact written", path=str(path), rows=len(frame))
    return path


def spectrum_frame(states: Iterable[StationaryState1D], oracle: Optional[Mapping[int, float]] = None) -> pd.DataFrame:
    rows = []
    for index, state in enumerate(states):
        row = {"index [1]": index, column("energy", "energy"): state.energy, "nodes [1]": state.nodes}
        if oracle is not None and index in oracle:
            exact = oracle[index]
            row[column("exact", "energy")] = exact
            row["relative_error [1]"] = abs(state.energy - exact) / abs(exact)
        rows.append(row)
    return pd.DataFrame(rows)


def states_frame(states: Iterable[StationaryState1D], potential: Potential1D) -> pd.DataFrame:
    """x and V, then R, Q and Q + V - E per state; masked Q samples are left empty."""
    states = list(states)
    grid = states[0].grid
    V = evaluate_potential(potential, grid, states[0].units).values
    data = {column("x", "length"): grid.points, column("V", "energy"): V}
    for index, state in enumerate(states):
        Q = quantum_potential_1d(state.R, grid, state.units).Q
        data[column(f"R_{index}", "length^-1/2")] = state.R
        data[column(f"Q_{index}", "energy")] = Q
        data[column(f"Q+V-E_{index}", "energy")] = Q + V - state.energy
    return pd.DataFrame(data)


def trajectory_frame(trajectory) -> pd.DataFrame:
    """One row per step: t, coordinates, conjugate momenta, H."""
    units = {"x": "length", "r": "length", "theta": "rad", "phi": "rad"}
    momenta = {"x": "momentum", "r": "momentum", "theta": "action", "phi": "action"}
    data = {column("t", "time"): trajectory.t}
    for i, name in enumerate(trajectory.coordinates):
        data[column(name, units[name])] = trajectory.q[:, i]
    for i, name in enumerate(trajectory.coordinates):
        data[column(f"p_{name}", momenta[name])] = trajectory.p[:, i]
    data[column("H", "energy")] = trajectory.H
    return pd.DataFrame(data)


def checks_frame(rows: Iterable[Tuple[str, float, float, bool]]) -> pd.DataFrame:
    """(check, value, tolerance, passed) rows of a diagnostic battery."""
    return pd.DataFrame(
        [{"check": c, "value [1]": v, "tolerance [1]": t, "passed": bool(p)} for c, v, t, p in rows],
        columns=["check", "value [1]", "tolerance [1]", "passed"],
    )


def save_state_bundle(state: SeparableCentralState, directory: Path,
                      potential: Optional[Mapping[str, object]] = None,
                      central: Optional[CentralPotential] = None) -> Path:
    """
    Write radial.csv, polar.csv and constants.csv of a central state.

    Amplitudes come first in radial.csv and polar.csv, followed by the
    separated quantum potential Q_r and Q_theta; Q_phi is a constant. With
    ``central``, radial.csv also carries V and Q_r + V_eff - E, where
    V_eff = V + alpha_theta^2 / (2 m r^2).
    """
    directory = Path(directory)
    q_field = quantum_potential_spherical(state)
    r = state.radial_grid.points
    radial = {
        column("r", "length"): r,
        column("R_r", "length^-3/2"): state.R_r,
        column("Q_r", "energy"): q_field.Q_r,
    }
    if central is not None:
        V = evaluate_potential(central, state.radial_grid, state.units).values
        v_eff = V + state.alpha_theta_sq / (2.0 * state.units.mass * r ** 2)
        radial[column("V", "energy")] = V
        radial[column("Q_r+V_eff-E", "energy")] = q_field.Q_r + v_eff - state.energy
    write_csv(pd.DataFrame(radial), directory / RADIAL_FILE)
    write_csv(pd.DataFrame({
        column("theta", "rad"): state.polar_grid.points,
        column("R_theta", "1"): state.R_theta,
        column("Q_theta", "energy length^2"): q_field.Q_theta,
    }), directory / POLAR_FILE)

    constants = [
        ("energy", state.energy, "energy"),
        ("alpha_theta_sq", state.alpha_theta_sq, "action^2"),
        ("alpha_phi", state.alpha_phi, "action"),
        ("m", state.m, "1"),
        ("n", "" if state.n is None else state.n, "1"),
        ("l", "" if state.l is None else state.l, "1"),
        ("parity", state.parity.value, "1"),
        ("mode", state.mode.value, "1"),
        ("hbar", state.units.hbar, "action"),
        ("mass", state.units.mass, "mass"),
        ("r_max", state.radial_grid.r_max, "length"),
        ("Q_phi", q_field.Q_phi, "energy length^2"),
    ]
    for key, value in (potential or {}).items():
        constants.append((f"potential.{key}", value, "1"))
    frame = pd.DataFrame(
        [{"quantity": k, "value": repr(v) if isinstance(v, float) else str(v), "unit": u} for k, v, u in constants]
    )
    write_csv(frame, directory / CONSTANTS_FILE)
    logger.info("State bundle saved", directory=str(directory), n=state.n, l=state.l, m=state.m)
    return directory


def load_state_bundle(directory: Path) -> Tuple[SeparableCentralState, Dict[str, str]]:
    """
    Rebuild a state from its bundle.

    Returns the state and the ``potential.*`` entries of constants.csv.

    Raises:
        ConfigurationError: Missing or unreadable bundle files
        ConsistencyError: Samples that do not lie on a uniform lattice
    """
    directory = Path(directory)
    try:
        radial = pd.read_csv(directory / RADIAL_FILE, float_precision="round_trip")
        polar = pd.read_csv(directory / POLAR_FILE, float_precision="round_trip")
        constants = pd.read_csv(directory / CONSTANTS_FILE, dtype=str, keep_default_na=False)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"Cannot read state bundle {directory}: {exc}") from exc

    values = dict(zip(constants["quantity"], constants["value"]))
    r = radial.iloc[:, 0].to_numpy(float)
    theta = polar.iloc[:, 0].to_numpy(float)
    radial_grid = RadialGrid(float(values["r_max"]), r.size)
    polar_grid = PolarGrid(theta.size)
    if uniformity_error(r) > 1e-9 or not np.allclose(r, radial_grid.points, rtol=1e-12, atol=0.0):
        raise ConsistencyError(f"{directory / RADIAL_FILE} is not a uniform radial lattice")
    if not np.allclose(theta, polar_grid.points, rtol=1e-12, atol=0.0):
        raise ConsistencyError(f"{directory / POLAR_FILE} is not a uniform open polar lattice")

    def optional_int(key: str) -> Optional[int]:
        return int(values[key]) if values.get(key) else None

    state = SeparableCentralState(
        radial_grid=radial_grid, R_r=radial.iloc[:, 1].to_numpy(float),
        polar_grid=polar_grid, R_theta=polar.iloc[:, 1].to_numpy(float),
        parity=AzimuthalParity(values["parity"]), m=int(values["m"]),
        energy=float(values["energy"]), alpha_theta_sq=float(values["alpha_theta_sq"]),
        alpha_phi=float(values["alpha_phi"]), mode=MotionMode(values["mode"]),
        units=Units(float(values["hbar"]), float(values["mass"])),
        n=optional_int("n"), l=optional_int("l"),
    )
    potential = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("potential.")}
    return state, potential
