#!/usr/bin/env python3
"""
Canonical dynamics under V + Q: interpolation, Verlet integration, the rest
check, circulating launches and the classical references.
"""

import numpy as np
import pytest

from core.exceptions import (
    ConsistencyError,
    GridSizeError,
    InvalidParameterError,
    MaskedSampleError,
    NoClassicalOrbitError,
    ValidationError,
)
from dynamics import (
    CentralForceField,
    ForceField1D,
    PhasePoint,
    circular_orbit,
    circulation_check,
    classical_orbit,
    classical_reference,
    effective_force,
    energy_drift,
    force_field,
    integrate_canonical,
    lagrange4,
    rest_check,
    sample_points,
)


class TestInterpolation:
    def test_cubic_is_reproduced_exactly(self):
        x = 0.1 * np.arange(20)
        value, slope = lagrange4(x ** 3 - 2.0 * x, 0.0, 0.1, 0.537)
        assert value == pytest.approx(0.537 ** 3 - 2.0 * 0.537, abs=1e-12)
        assert slope == pytest.approx(3.0 * 0.537 ** 2 - 2.0, abs=1e-10)

    def test_stencil_is_clamped_at_the_ends(self):
        x = 0.1 * np.arange(10)
        value, _ = lagrange4(x ** 2, 0.0, 0.1, 0.95)
        assert value == pytest.approx(0.95 ** 2, abs=1e-12)

    def test_masked_stencil_raises(self):
        values = np.ones(10)
        values[5] = np.nan
        with pytest.raises(MaskedSampleError):
            lagrange4(values, 0.0, 1.0, 4.5)
        assert lagrange4(values, 0.0, 1.0, 1.5)[0] == pytest.approx(1.0)

    def test_needs_four_samples(self):
        with pytest.raises(GridSizeError):
            lagrange4(np.ones(3), 0.0, 1.0, 1.0)


class TestIntegrator:
    @pytest.fixture
    def oscillator(self, harmonic_potential):
        return ForceField1D.classical(harmonic_potential, bounds=(-10.0, 10.0))

    def test_verlet_follows_the_oscillator(self, oscillator):
        trajectory = integrate_canonical(oscillator, PhasePoint(q=(1.0,), p=(0.0,)), 1e-3, 10_000)
        assert trajectory.steps == 10_000
        assert trajectory.q[-1, 0] == pytest.approx(np.cos(10.0), abs=1e-5)
        drift = energy_drift(trajectory)
        assert drift.max_deviation < 1e-6
        assert drift.max_rate < 1e-4

    def test_coarse_step_drifts(self, oscillator):
        trajectory = integrate_canonical(oscillator, PhasePoint(q=(1.0,), p=(0.0,)), 0.5, 200)
        assert energy_drift(trajectory).max_deviation > 1e-3

    def test_negative_step_runs_backwards(self, oscillator):
        trajectory = integrate_canonical(oscillator, PhasePoint(q=(1.0,), p=(0.0,)), -1e-3, 1000)
        assert trajectory.t[-1] == pytest.approx(-1.0)
        assert trajectory.q[-1, 0] == pytest.approx(np.cos(1.0), abs=1e-6)
        assert trajectory.p[-1, 0] == pytest.approx(np.sin(1.0), abs=1e-6)

    def test_reversed_flow_returns_to_the_start(self, oscillator):
        forward = integrate_canonical(oscillator, PhasePoint(q=(1.0,), p=(0.3,)), 1e-3, 2000)
        back = integrate_canonical(oscillator, forward.point(-1), -1e-3, 2000)
        assert back.q[-1, 0] == pytest.approx(1.0, abs=1e-10)
        assert back.p[-1, 0] == pytest.approx(0.3, abs=1e-10)
        assert back.t[-1] == pytest.approx(0.0, abs=1e-12)

    def test_leaving_the_domain_truncates(self, box_potential):
        field = ForceField1D.classical(box_potential)
        trajectory = integrate_canonical(field, PhasePoint(q=(0.5,), p=(1.0,)), 1e-3, 2000)
        assert trajectory.exited
        assert trajectory.steps < 2000
        assert trajectory.q[-1, 0] <= 1.0

    @pytest.mark.parametrize("dt, n_steps, q", [
        (0.0, 10, 0.0),
        (np.nan, 10, 0.0),
        (1e-3, 0, 0.0),
        (1e-3, 10, 20.0),
    ])
    def test_rejects_bad_requests(self, oscillator, dt, n_steps, q):
        with pytest.raises(ValidationError):
            integrate_canonical(oscillator, PhasePoint.at_rest(q), dt, n_steps)

    def test_phase_point_needs_matching_momenta(self):
        with pytest.raises(ValidationError):
            PhasePoint(q=(1.0, 2.0), p=(0.0,))


class TestForceFields:
    def test_classical_force_on_the_state_lattice(self, harmonic_spectrum, harmonic_potential):
        field = force_field(harmonic_spectrum.states[0], harmonic_potential, quantum=False)
        assert effective_force(field, 1.0) == pytest.approx([-1.0])

    def test_quantum_force_vanishes_for_eigenstates(self, harmonic_spectrum, harmonic_potential):
        field = force_field(harmonic_spectrum.states[1], harmonic_potential)
        for x in (-2.0, -0.7, 0.4, 1.3):
            assert abs(effective_force(field, x)[0]) < 1e-9

    def test_state_and_potential_must_agree(self, box_spectrum, coulomb):
        with pytest.raises(ConsistencyError):
            force_field(box_spectrum.states[0], coulomb)

    def test_phase_point_dimension_is_checked(self, box_spectrum, box_potential):
        field = force_field(box_spectrum.states[0], box_potential)
        with pytest.raises(ValidationError):
            effective_force(field, [0.1, 0.2])


class TestRestCheck:
    def test_box_state_stays_put(self, box_spectrum, box_potential):
        report = rest_check(box_spectrum.states[1], box_potential, count=3, n_steps=1000)
        assert len(report.checked) == 3
        assert report.all_passed, report.verdicts

    def test_harmonic_state_stays_put(self, harmonic_spectrum, harmonic_potential):
        report = rest_check(harmonic_spectrum.states[1], harmonic_potential, count=3, n_steps=1000)
        assert report.all_passed, report.verdicts

    def test_quantum_hamiltonian_stays_at_the_eigenvalue(self, harmonic_spectrum, harmonic_potential):
        state = harmonic_spectrum.states[1]
        field = force_field(state, harmonic_potential)
        trajectory = integrate_canonical(field, PhasePoint.at_rest(0.7), 1e-3, 1000)
        assert np.max(np.abs(trajectory.H - state.energy)) < 1e-9

    def test_quantum_hamiltonian_of_a_hydrogen_state(self, hydrogen_211, coulomb):
        field = force_field(hydrogen_211, coulomb)
        trajectory = integrate_canonical(field, PhasePoint.at_rest(2.0, 1.0, 0.3), 1e-3, 1000)
        assert np.max(np.abs(trajectory.H - hydrogen_211.energy)) < 1e-8

    @pytest.mark.parametrize("spectrum, potential, index", [
        ("box_spectrum", "box_potential", 1),
        ("harmonic_spectrum", "harmonic_potential", 1),
    ])
    def test_ten_points_over_ten_thousand_steps(self, request, spectrum, potential, index):
        state = request.getfixturevalue(spectrum).states[index]
        report = rest_check(state, request.getfixturevalue(potential), count=10, n_steps=10_000)
        assert len(report.checked) == 10
        assert report.all_passed, report.verdicts

    def test_hydrogen_ten_points_over_ten_thousand_steps(self, hydrogen_211, coulomb):
        report = rest_check(hydrogen_211, coulomb, count=10, n_steps=10_000)
        assert len(report.checked) == 10
        assert report.all_passed, report.verdicts

    def test_classical_control_moves(self, harmonic_spectrum, harmonic_potential):
        report = rest_check(harmonic_spectrum.states[1], harmonic_potential, count=3, n_steps=1000,
                            quantum=False)
        assert not any(v.passed for v in report.checked)
        assert report.max_displacement > 1e-3

    def test_hydrogen_state_stays_put(self, hydrogen_211, coulomb):
        report = rest_check(hydrogen_211, coulomb, count=3, n_steps=1000)
        assert report.all_passed, report.verdicts

    def test_node_points_are_skipped(self, box_spectrum, box_potential):
        report = rest_check(box_spectrum.states[1], box_potential, points=[(0.5,)], n_steps=10)
        assert report.verdicts[0].skipped
        assert report.verdicts[0].note == "node window"
        assert not report.all_passed

    def test_sample_points_are_reproducible(self, hydrogen_211):
        first = sample_points(hydrogen_211, 5, seed=7)
        assert first == sample_points(hydrogen_211, 5, seed=7)
        assert first != sample_points(hydrogen_211, 5, seed=8)
        for r, theta, phi in first:
            assert 0.0 < r < hydrogen_211.radial_grid.r_max
            assert 0.0 < theta < np.pi
            assert 0.0 <= phi < 2.0 * np.pi


class TestCentralDynamics:
    def test_circular_orbit_keeps_its_radius(self, coulomb):
        orbit = circular_orbit(coulomb, 2.0)
        assert orbit.angular_momentum == pytest.approx(np.sqrt(2.0))
        assert orbit.energy == pytest.approx(-0.25)
        trajectory = integrate_canonical(CentralForceField.classical(coulomb), orbit.initial_point(),
                                         1e-3, 2000)
        assert np.ptp(trajectory.q[:, 0]) < 1e-5
        assert energy_drift(trajectory).max_deviation < 1e-6

    def test_circular_orbit_needs_a_positive_radius(self, coulomb):
        with pytest.raises(InvalidParameterError):
            circular_orbit(coulomb, -1.0)

    def test_classical_turning_points(self, coulomb):
        reference = classical_reference(coulomb, -0.2, np.sqrt(2.0))
        assert reference.circular_radius == pytest.approx(2.0, rel=1e-6)
        assert reference.minimum == pytest.approx(-0.25, rel=1e-9)
        inner, outer = reference.turning_points
        assert inner == pytest.approx((1.0 - np.sqrt(0.2)) / 0.4, rel=1e-8)
        assert outer == pytest.approx((1.0 + np.sqrt(0.2)) / 0.4, rel=1e-8)

    def test_energy_below_the_minimum_has_no_orbit(self, coulomb):
        with pytest.raises(NoClassicalOrbitError):
            classical_reference(coulomb, -0.3, np.sqrt(2.0))

    def test_circulating_state_circles_at_fixed_radius(self, circulating_spectrum, coulomb):
        state = circulating_spectrum.states[(2, 1, 1)]
        result = circulation_check(state, coulomb, (2.0, 0.5 * np.pi, 0.3), n_steps=2000)
        assert result.r_spread < 1e-4
        assert result.theta_spread < 1e-4
        assert result.phi_rate == pytest.approx(result.expected_rate, rel=1e-3)
        assert result.expected_rate == pytest.approx(0.25)

    def test_circulation_check_rejects_rest_states(self, hydrogen_211, coulomb):
        with pytest.raises(ValidationError):
            circulation_check(hydrogen_211, coulomb, (2.0, 0.5 * np.pi, 0.3))


class TestClassicalOrbits:
    def test_radial_orbit_has_no_circular_radius(self, coulomb):
        reference = classical_reference(coulomb, -0.2, 0.0)
        assert reference.circular_radius is None
        inner, outer = reference.turning_points
        assert inner == 0.0
        assert outer == pytest.approx(5.0, rel=1e-9)

    def test_radial_orbit_keeps_its_constants(self, coulomb):
        orbit = classical_orbit(coulomb, -0.2, 0.0, n_steps=5000)
        assert not orbit.trajectory.exited
        assert orbit.p_phi_drift < 1e-12
        assert orbit.alpha_theta_sq_drift < 1e-12
        assert orbit.energy_drift < 1e-6
        assert orbit.r_range[1] == pytest.approx(5.0, rel=1e-9)
        assert orbit.r_range[0] < 5.0

    def test_radial_fall_stops_short_of_the_origin(self, coulomb):
        orbit = classical_orbit(coulomb, -0.2, 0.0, n_steps=20_000)
        assert orbit.trajectory.exited
        assert orbit.r_range[0] > 0.5
        assert orbit.energy_drift < 1e-4

    def test_inclined_orbit_keeps_its_constants(self, coulomb):
        orbit = classical_orbit(coulomb, -0.2, 0.7, n_steps=30_000, inclination=0.3)
        assert not orbit.trajectory.exited
        assert orbit.trajectory.p[0, 2] == pytest.approx(0.7 * np.cos(0.3))
        assert orbit.p_phi_drift < 1e-9
        assert orbit.alpha_theta_sq_drift < 1e-9
        assert orbit.energy_drift < 1e-3
        inner, outer = orbit.reference.turning_points
        assert orbit.r_range[0] == pytest.approx(inner, rel=1e-2)
        assert orbit.r_range[1] == pytest.approx(outer, rel=1e-3)
        assert np.ptp(orbit.trajectory.q[:, 1]) > 0.5

    def test_classical_orbit_runs_backwards(self, coulomb):
        orbit = classical_orbit(coulomb, -0.2, 0.7, n_steps=2000, inclination=0.3)
        field = CentralForceField.classical(coulomb)
        back = integrate_canonical(field, orbit.trajectory.point(-1), -1e-3, 2000)
        assert np.allclose(back.cartesian[-1], orbit.trajectory.cartesian[0], atol=1e-8)

    @pytest.mark.parametrize("angular_momentum", [-0.5, np.nan])
    def test_rejects_bad_angular_momentum(self, coulomb, angular_momentum):
        with pytest.raises(InvalidParameterError):
            classical_reference(coulomb, -0.2, angular_momentum)
