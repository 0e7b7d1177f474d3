#!/usr/bin/env python3
"""
Convergence Study
Grid refinement of the shooting energies (Numerov, fourth order) and of the
finite-difference quantum potential (second order), with wall time per solve.

    python benchmarks/convergence_study.py --levels 5
"""

import argparse
import os
import sys
import time
from typing import Callable, Dict, List

import numpy as np
from rich.console import Console
from rich.table import Table

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.models import Grid1D, PolarGrid
from core.observability import StructuredLogger
from core.potentials import Potential1D
from quantum import ShootingConfig, quantum_potential_1d, solve_bound_states_1d, solve_polar
from quantum.oracles import box_energy, harmonic_energy

logger = StructuredLogger("benchmark")


def timed(func: Callable[[], float]) -> Dict[str, float]:
    start = time.perf_counter()
    error = func()
    return {"error": error, "seconds": time.perf_counter() - start}


def box_energy_error(n_points: int) -> float:
    """Worst relative error of the three lowest box levels."""
    result = solve_bound_states_1d(Potential1D.box(), Grid1D(0.0, 1.0, n_points),
                                   config=ShootingConfig(max_states=3))
    return max(abs(s.energy - box_energy(i + 1)) / box_energy(i + 1) for i, s in enumerate(result.states))


def harmonic_energy_error(n_points: int) -> float:
    result = solve_bound_states_1d(Potential1D.harmonic(), Grid1D(-10.0, 10.0, n_points),
                                   config=ShootingConfig(max_states=3))
    return max(abs(s.energy - harmonic_energy(i)) / harmonic_energy(i) for i, s in enumerate(result.states))


def gaussian_q_error(n_points: int) -> float:
    """max |Q - (1/2 - x^2/2)| on |x| < 3 for the oscillator ground state."""
    grid = Grid1D(-8.0, 8.0, n_points)
    x = grid.points
    field = quantum_potential_1d(np.exp(-0.5 * x * x), grid)
    band = (np.abs(x) < 3.0) & field.unmasked
    return float(np.max(np.abs(field.Q[band] - (0.5 - 0.5 * x[band] ** 2))))


def polar_error(n_points: int) -> float:
    solutions = solve_polar(1, 3, PolarGrid(n_points))
    return max(s.closed_form_error for s in solutions)


STUDIES = [
    ("box energies", box_energy_error, 101, 4),
    ("harmonic energies", harmonic_energy_error, 201, 4),
    ("gaussian Q", gaussian_q_error, 201, 2),
    ("polar alpha_theta^2", polar_error, 51, 4),
]


def run_study(name: str, func: Callable[[int], float], base: int, levels: int) -> List[Dict[str, float]]:
    rows = []
    for level in range(levels):
        # halving the spacing on a lattice that includes both ends
        n_points = (base - 1) * 2 ** level + 1
        row = timed(lambda: func(n_points))
        row["n_points"] = n_points
        rows.append(row)
        logger.info("Refinement level", study=name, n_points=n_points, error=row["error"],
                    seconds=round(row["seconds"], 4))
    return rows


def observed_order(rows: List[Dict[str, float]]) -> float:
    """Least-squares slope of log(error) against log(n)."""
    usable = [r for r in rows if r["error"] > 1e-14]
    if len(usable) < 2:
        return float("nan")
    n = np.log([r["n_points"] for r in usable])
    e = np.log([r["error"] for r in usable])
    return float(-np.polyfit(n, e, 1)[0])


def print_study(console: Console, name: str, expected: int, rows: List[Dict[str, float]]):
    table = Table(title=f"{name} (expected order {expected})")
    table.add_column("n_points", justify="right")
    table.add_column("error", justify="right")
    table.add_column("ratio", justify="right")
    table.add_column("seconds", justify="right")
    previous = None
    for row in rows:
        ratio = "" if previous is None or row["error"] == 0 else f"{previous / row['error']:.2f}"
        table.add_row(str(row["n_points"]), f"{row['error']:.3e}", ratio, f"{row['seconds']:.3f}")
        previous = row["error"]
    console.print(table)
    console.print(f"observed order: {observed_order(rows):.2f}\n")


def main():
    parser = argparse.ArgumentParser(description="Grid convergence of the shooting solver and Q")
    parser.add_argument("--levels", type=int, default=4, help="number of refinement levels")
    parser.add_argument("--only", choices=[s[0] for s in STUDIES], action="append")
    args = parser.parse_args()

    console = Console()
    for name, func, base, expected in STUDIES:
        if args.only and name not in args.only:
            continue
        print_study(console, name, expected, run_study(name, func, base, args.levels))


if __name__ == "__main__":
    main()
