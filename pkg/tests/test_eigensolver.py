#!/usr/bin/env python3
"""
Shooting engine and 1D bound-state tests against closed-form spectra.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from core.exceptions import ConvergenceError, InvalidParameterError
from core.models import Grid1D, Units
from core.potentials import Potential1D
from quantum import (
    Direction,
    EigenvalueSearch,
    ShootingConfig,
    SturmProblem,
    matched_shot,
    shoot,
    solve_bound_states_1d,
    stationarity_residual,
    stitch,
)
from quantum.numerov import numerov
from quantum.oracles import box_energy, box_state, harmonic_energy, harmonic_state


def free_string(n_points=1001):
    """-R'' = lam R on [0, 1] with Dirichlet ends: lam_k = (k pi)^2."""
    return SturmProblem(q=np.zeros(n_points), w=1.0, h=1.0 / (n_points - 1))


def test_numerov_reproduces_a_sine():
    h, k = 1e-3, 2.0
    x = h * np.arange(1001)
    y = numerov(np.full(x.size, k * k), h, 0.0, np.sin(k * h))
    assert np.max(np.abs(y - np.sin(k * x))) < 1e-8


def test_numerov_rescales_instead_of_overflowing():
    y = numerov(np.full(4000, -400.0), 0.01, 0.0, 0.01)
    assert np.all(np.isfinite(y))
    assert y[-1] > 0


@pytest.mark.parametrize("kwargs", [
    {"q": np.zeros(2), "w": 1.0, "h": 0.1},
    {"q": np.array([0.0, np.inf, 0.0, 0.0]), "w": 1.0, "h": 0.1},
    {"q": np.zeros(10), "w": 0.0, "h": 0.1},
    {"q": np.zeros(10), "w": 1.0, "h": 0.1, "match_fraction": 1.5},
])
def test_sturm_problem_rejects_bad_input(kwargs):
    with pytest.raises(InvalidParameterError):
        SturmProblem(**kwargs)


def test_matched_shot_counts_eigenvalues_below():
    problem = free_string()
    assert matched_shot(problem, 5.0).count == 0
    assert matched_shot(problem, 20.0).count == 1
    assert matched_shot(problem, 50.0).count == 2


def test_search_locates_only_what_the_bracket_holds():
    search = EigenvalueSearch(free_string(), 1e-12)
    roots = search.locate_all(1.0, 100.0, 5)
    assert [root.index for root in roots] == [0, 1, 2]
    for root in roots:
        assert root.value == pytest.approx(((root.index + 1) * np.pi) ** 2, rel=1e-7)
        assert root.resolved


def test_stitched_profile_is_continuous():
    problem = free_string()
    root = EigenvalueSearch(problem, 1e-12).locate_all(1.0, 30.0, 1)[0]
    profile = stitch(problem, matched_shot(problem, root.value))
    profile /= np.max(np.abs(profile))
    x = np.linspace(0.0, 1.0, problem.size)
    assert np.max(np.abs(profile - np.sin(np.pi * x))) < 1e-6


def test_box_spectrum_matches_closed_form(box_spectrum):
    assert not box_spectrum.partial
    assert len(box_spectrum.states) == 10
    for n, state in enumerate(box_spectrum.states, start=1):
        assert state.energy == pytest.approx(box_energy(n), rel=1e-6), f"level {n}"
        assert state.nodes == n - 1


def test_box_eigenfunctions_match_closed_form(box_spectrum):
    for n, state in enumerate(box_spectrum.states[:4], start=1):
        reference = box_state(n, state.grid.points)
        assert np.max(np.abs(state.R - reference)) < 1e-5, f"level {n}"


def test_harmonic_spectrum_matches_closed_form(harmonic_spectrum):
    assert len(harmonic_spectrum.states) == 10
    for n, state in enumerate(harmonic_spectrum.states):
        assert state.energy == pytest.approx(harmonic_energy(n), rel=1e-6), f"level {n}"
        assert state.nodes == n


def test_harmonic_eigenfunctions_up_to_sign(harmonic_spectrum):
    for n, state in enumerate(harmonic_spectrum.states[:4]):
        reference = harmonic_state(n, state.grid.points)
        sign = np.sign(np.dot(state.R, reference))
        assert np.max(np.abs(sign * state.R - reference)) < 1e-5, f"level {n}"


def test_convergence_records_are_small(harmonic_spectrum):
    assert len(harmonic_spectrum.convergence) == len(harmonic_spectrum.states)
    for record in harmonic_spectrum.convergence:
        assert record.residual < 1e-6


def test_shallow_well_returns_partial_spectrum():
    result = solve_bound_states_1d(Potential1D.finite_well(10.0, 2.0), Grid1D(-8.0, 8.0, 3201),
                                   Units(), ShootingConfig(max_states=10))
    assert result.partial
    assert len(result.states) == 3
    assert result.warnings, "partial spectra carry a warning"
    assert np.all((result.energies > -10.0) & (result.energies < 0.0))
    assert np.all(np.diff(result.energies) > 0)


def test_explicit_bracket_limits_the_search(harmonic_potential):
    result = solve_bound_states_1d(harmonic_potential, Grid1D(-10.0, 10.0, 2001), Units(),
                                   ShootingConfig(energy_bracket=(1.0, 3.0), max_states=5))
    assert result.energies == pytest.approx([1.5, 2.5], rel=1e-6)


def test_flat_potential_has_no_bracket():
    x = np.linspace(-1.0, 1.0, 21)
    flat = Potential1D.tabulated(x, np.zeros_like(x))
    with pytest.raises(ConvergenceError):
        solve_bound_states_1d(flat, Grid1D(-1.0, 1.0, 101))


def test_shooting_config_validation():
    with pytest.raises(ValidationError):
        ShootingConfig(energy_bracket=(1.0, 0.0))
    with pytest.raises(ValidationError):
        ShootingConfig(max_states=0)


def test_units_scale_the_spectrum():
    units = Units(hbar=2.0, mass=0.5)
    result = solve_bound_states_1d(Potential1D.box(1.0), Grid1D(0.0, 1.0, 2001), units,
                                   ShootingConfig(max_states=2))
    assert result.energies == pytest.approx([box_energy(1, units=units), box_energy(2, units=units)],
                                            rel=1e-6)


def test_single_shot_counts_nodes(box_potential):
    grid = Grid1D(0.0, 1.0, 2001)
    between = 0.5 * (box_energy(1) + box_energy(2))
    R, _, nodes = shoot(box_potential, between, grid)
    assert R.size == grid.n_points
    assert nodes == 1
    _, _, nodes = shoot(box_potential, between, grid, direction=Direction.BACKWARD)
    assert nodes == 1


def test_stationarity_of_box_ground_state(box_spectrum, box_potential):
    report = stationarity_residual(box_spectrum.states[0], box_potential)
    assert report.within_tolerance
    assert report.max_relative < 1e-4


def test_stationarity_of_harmonic_states(harmonic_spectrum, harmonic_potential):
    for state in harmonic_spectrum.states[:5]:
        report = stationarity_residual(state, harmonic_potential)
        assert report.within_tolerance, f"E = {state.energy}"


def test_stitch_avoids_a_node_on_the_matching_sample():
    problem = free_string()
    root = EigenvalueSearch(problem, 1e-12).locate_all(30.0, 60.0, 1)[0]
    shot = matched_shot(problem, root.value)
    assert shot.index == (problem.size - 1) // 2
    profile = stitch(problem, shot)
    profile /= profile[250]
    x = np.linspace(0.0, 1.0, problem.size)
    assert np.max(np.abs(profile - np.sin(2.0 * np.pi * x))) < 1e-6
    h = problem.h
    curvature = (profile[2:] - 2.0 * profile[1:-1] + profile[:-2]) / h ** 2
    inner = profile[1:-1]
    keep = np.abs(inner) > 1e-3
    local = -curvature[keep] / inner[keep]
    assert np.max(np.abs(local / root.value - 1.0)) < 1e-4


@pytest.mark.parametrize("n", range(1, 11))
def test_stationarity_of_box_levels(box_spectrum, box_potential, n):
    report = stationarity_residual(box_spectrum.states[n - 1], box_potential)
    assert report.within_tolerance, f"level {n}"
    assert report.max_relative < 1e-4, f"level {n}: {report.max_relative:.3e}"


@pytest.mark.parametrize("n", [2, 5, 10])
def test_stationarity_improves_with_refinement(box_potential, n):
    residuals = []
    for n_points in (1001, 4001):
        result = solve_bound_states_1d(box_potential, Grid1D(0.0, 1.0, n_points), Units(),
                                       ShootingConfig(max_states=n))
        residuals.append(stationarity_residual(result.states[n - 1], box_potential).max_relative)
    coarse, fine = residuals
    assert fine < coarse / 8.0, f"level {n}: {coarse:.3e} -> {fine:.3e}"


def test_energy_error_shrinks_with_the_lattice_spacing(box_potential):
    errors = []
    for n_points in (201, 401):
        result = solve_bound_states_1d(box_potential, Grid1D(0.0, 1.0, n_points), Units(),
                                       ShootingConfig(max_states=10))
        errors.append(abs(result.states[9].energy / box_energy(10) - 1.0))
    coarse, fine = errors
    assert coarse > 1e-8
    assert fine < coarse / 4.0, f"{coarse:.3e} -> {fine:.3e}"
