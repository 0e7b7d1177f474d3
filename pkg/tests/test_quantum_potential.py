#!/usr/bin/env python3
"""
Quantum potential Q = -(hbar^2/2m) laplacian(R)/R: closed forms, node
masking, scale invariance and the separated spherical form.
"""

import numpy as np
import pytest

from core.exceptions import ConsistencyError, DegenerateInputError, GridSizeError
from core.models import AzimuthalParity, Grid1D, Units
from quantum import curvature_tolerance, quantum_potential_1d, quantum_potential_spherical
from quantum.oracles import box_energy, box_state
from quantum.potential import azimuthal_q, node_mask, second_difference


def test_second_difference_is_exact_on_quadratics():
    grid = Grid1D(-1.0, 1.0, 21)
    d2 = second_difference(3.0 * grid.points ** 2 - grid.points, grid.spacing)
    assert d2 == pytest.approx(np.full(21, 6.0), abs=1e-9)


def test_box_state_has_flat_quantum_potential():
    grid = Grid1D(0.0, 1.0, 2001)
    field = quantum_potential_1d(box_state(1, grid.points), grid)
    interior = field.Q[1:-1]
    assert np.all(np.isfinite(interior))
    assert np.max(np.abs(interior - box_energy(1))) / box_energy(1) < 1e-6


def test_gaussian_quantum_potential_within_curvature_tolerance():
    grid = Grid1D(-8.0, 8.0, 1601)
    x = grid.points
    R = np.exp(-0.5 * x * x)
    field = quantum_potential_1d(R, grid)
    expected = 0.5 - 0.5 * x * x
    tolerance = curvature_tolerance(R, grid.spacing, 0.5)
    keep = field.unmasked
    assert np.all(np.abs(field.Q[keep] - expected[keep]) <= tolerance[keep])


def test_nodes_are_masked_not_evaluated():
    grid = Grid1D(0.0, 1.0, 2001)
    field = quantum_potential_1d(box_state(2, grid.points), grid)
    assert field.node_mask[1000], "the node at x = 1/2 is masked"
    assert np.isnan(field.Q[1000])
    assert field.node_mask[0] and field.node_mask[-1]
    assert np.count_nonzero(field.node_mask) < 10


def test_node_mask_threshold():
    R = np.array([1.0, 5e-6, 5e-7, 1.0])
    assert list(node_mask(R)) == [False, False, True, False]
    assert list(node_mask(R, node_epsilon=1e-5)) == [False, True, True, False]


@pytest.mark.parametrize("factor", [-3.0, 0.01, 7.0])
def test_quantum_potential_ignores_amplitude_scale(factor):
    grid = Grid1D(-6.0, 6.0, 601)
    R = (1.0 + grid.points) * np.exp(-0.5 * grid.points ** 2)
    base = quantum_potential_1d(R, grid)
    scaled = quantum_potential_1d(factor * R, grid)
    assert np.array_equal(base.node_mask, scaled.node_mask)
    np.testing.assert_allclose(scaled.Q, base.Q, rtol=1e-9, atol=1e-12, equal_nan=True)


def test_quantum_potential_input_errors():
    grid = Grid1D(0.0, 1.0, 11)
    with pytest.raises(DegenerateInputError):
        quantum_potential_1d(np.zeros(11), grid)
    with pytest.raises(ConsistencyError):
        quantum_potential_1d(np.ones(10), grid)
    with pytest.raises(GridSizeError):
        second_difference(np.ones(2), 0.1)


def test_units_enter_through_the_kinetic_prefactor():
    grid = Grid1D(0.0, 1.0, 2001)
    R = box_state(1, grid.points)
    plain = quantum_potential_1d(R, grid)
    heavy = quantum_potential_1d(R, grid, Units(hbar=1.0, mass=4.0))
    np.testing.assert_allclose(heavy.Q[1:-1], plain.Q[1:-1] / 4.0, rtol=1e-12)


def test_azimuthal_term():
    assert azimuthal_q(AzimuthalParity.CONST, 3) == 0.0
    assert azimuthal_q(AzimuthalParity.COS, 2) == pytest.approx(2.0)
    assert azimuthal_q(AzimuthalParity.SIN, 1, Units(hbar=2.0)) == pytest.approx(2.0)


def test_radial_quantum_potential_balances_the_effective_potential(hydrogen_1s, hydrogen_211):
    for state in (hydrogen_1s, hydrogen_211):
        field = quantum_potential_spherical(state)
        r = state.radial_grid.points
        band = (r > 0.5) & (r < 10.0) & ~field.radial_mask
        balance = field.Q_r - 1.0 / r + state.alpha_theta_sq / (2.0 * r ** 2)
        assert np.max(np.abs(balance[band] - state.energy)) < 1e-3, f"(n,l) = ({state.n},{state.l})"


def test_polar_and_azimuthal_terms_sum_to_the_separation_constant(hydrogen_211):
    field = quantum_potential_spherical(hydrogen_211)
    theta = hydrogen_211.polar_grid.points
    band = (theta > 0.5) & (theta < np.pi - 0.5)
    angular = field.Q_theta + field.Q_phi / np.sin(theta) ** 2
    assert field.Q_phi == pytest.approx(0.5)
    assert np.max(np.abs(angular[band] - 0.5 * hydrogen_211.alpha_theta_sq)) < 1e-3


def test_spherical_field_is_scale_invariant(hydrogen_211):
    base = quantum_potential_spherical(hydrogen_211)
    scaled = quantum_potential_spherical(hydrogen_211.scaled(-3.0))
    np.testing.assert_allclose(scaled.Q_r, base.Q_r, rtol=1e-9, atol=1e-12, equal_nan=True)
    assert np.array_equal(scaled.mask(), base.mask())
    assert base.total().shape == (hydrogen_211.radial_grid.n_points, hydrogen_211.polar_grid.n_points)
