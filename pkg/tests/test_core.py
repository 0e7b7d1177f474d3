#!/usr/bin/env python3
"""
Core infrastructure tests: units, grids, normalization, potentials,
exceptions, settings and structured logging.
"""

import io
import json

import numpy as np
import pytest
from scipy.integrate import trapezoid

from core.config import ConfigManager, Settings, get_settings, reload_settings
from core.exceptions import (
    ConfigFileError,
    ConsistencyError,
    ConvergenceError,
    DegenerateInputError,
    DiagnosticFailure,
    DomainError,
    GridSizeError,
    InvalidParameterError,
    QuantizationError,
)
from core.models import (
    Grid1D,
    PolarGrid,
    RadialGrid,
    StationaryState1D,
    Units,
    count_nodes,
    normalize,
    uniformity_error,
)
from core.observability import StructuredLogger, configure_logging, measure_performance, run_id_var
from core.potentials import CentralPotential, Potential1D, PotentialKind, evaluate_potential


def test_units_reject_nonpositive_scales():
    with pytest.raises(InvalidParameterError):
        Units(hbar=0.0)
    with pytest.raises(InvalidParameterError):
        Units(mass=-1.0)
    units = Units(hbar=2.0, mass=0.5)
    assert units.kinetic == pytest.approx(4.0)
    assert units.shooting == pytest.approx(0.25)


def test_grids_need_three_points():
    for build in (lambda: Grid1D(0.0, 1.0, 2), lambda: PolarGrid(2), lambda: RadialGrid(1.0, 2)):
        with pytest.raises(GridSizeError):
            build()


def test_polar_and_radial_grids_exclude_singular_ends():
    theta = PolarGrid(9).points
    assert theta[0] > 0.0 and theta[-1] < np.pi
    assert uniformity_error(theta) < 1e-12
    r = RadialGrid(10.0, 100).points
    assert r[0] == pytest.approx(0.1)
    assert r[-1] == pytest.approx(10.0)


def test_refined_grid_halves_spacing():
    grid = Grid1D(0.0, 1.0, 2001)
    assert grid.refined().n_points == 4001
    assert grid.refined().spacing == pytest.approx(grid.spacing / 2)


def test_normalize_fixes_norm_and_sign():
    grid = Grid1D(0.0, 1.0, 1001)
    R = -3.0 * np.sin(np.pi * grid.points)
    unit = normalize(R, grid)
    assert trapezoid(unit ** 2, grid.points) == pytest.approx(1.0)
    assert unit[1] > 0, "first nonzero sample must be positive"


def test_normalize_rejects_zero_field():
    grid = Grid1D(0.0, 1.0, 11)
    with pytest.raises(DegenerateInputError):
        normalize(np.zeros(11), grid)


def test_count_nodes_ignores_exact_zeros():
    assert count_nodes(np.array([0.0, 1.0, 0.0, -1.0, 0.0])) == 1
    assert count_nodes(np.array([1.0, -1.0, 1.0, -1.0])) == 3


def test_stationary_state_checks_shape():
    grid = Grid1D(0.0, 1.0, 11)
    with pytest.raises(ConsistencyError):
        StationaryState1D(grid=grid, R=np.ones(10), energy=1.0, nodes=0)
    state = StationaryState1D(grid=grid, R=np.sin(np.pi * grid.points), energy=1.0, nodes=0)
    assert not state.R.flags.writeable
    assert np.all(state.momentum == 0.0)


def test_box_walls_are_flags_not_values():
    sampled = evaluate_potential(Potential1D.box(2.0), Grid1D(0.0, 2.0, 101))
    assert sampled.hard_walls == (True, True)
    assert np.all(sampled.values == 0.0)


def test_box_grid_outside_interval_is_a_domain_error():
    with pytest.raises(DomainError):
        evaluate_potential(Potential1D.box(1.0), Grid1D(-0.5, 1.0, 11))


def test_finite_well_shape():
    well = Potential1D.finite_well(10.0, 2.0)
    values = well.value(np.array([-2.0, 0.0, 0.5, 2.0]))
    assert list(values) == [0.0, -10.0, -10.0, 0.0]


def test_tabulated_potential_must_cover_grid():
    x = np.linspace(-1.0, 1.0, 21)
    tabulated = Potential1D.tabulated(x, x ** 2)
    assert tabulated.value(0.5) == pytest.approx(0.25, abs=1e-6)
    with pytest.raises(DomainError):
        evaluate_potential(tabulated, Grid1D(-2.0, 1.0, 11))
    with pytest.raises(InvalidParameterError):
        Potential1D.tabulated(x[::-1], x)


def test_central_potentials():
    coulomb = CentralPotential.coulomb(2.0)
    assert coulomb.value(0.5) == pytest.approx(-4.0)
    assert coulomb.derivative(1.0) == pytest.approx(2.0)
    assert coulomb.origin_expansion(RadialGrid(10.0, 100)) == (2.0, 0.0)
    oscillator = CentralPotential.harmonic3d(2.0)
    assert oscillator.value(1.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        evaluate_potential(coulomb, Grid1D(0.0, 1.0, 11))


def test_tabulated_central_origin_expansion_recovers_coulomb_tail():
    r = np.linspace(0.01, 20.0, 2000)
    tabulated = CentralPotential.tabulated(r, -1.0 / r + 0.5)
    Z, V0 = tabulated.origin_expansion(RadialGrid(20.0, 2000))
    assert Z == pytest.approx(1.0, rel=1e-4)
    assert V0 == pytest.approx(0.5, rel=1e-3)
    assert tabulated.kind is PotentialKind.TABULATED


@pytest.mark.parametrize("error, code", [
    (InvalidParameterError("m", -1, "m >= 0"), 1),
    (ConfigFileError("run.ini", 4, "bad value"), 1),
    (ConvergenceError("no root"), 2),
    (DiagnosticFailure(["c_theta"]), 3),
])
def test_exit_codes(error, code):
    assert isinstance(error, QuantizationError)
    assert error.exit_code == code


def test_error_serialization_carries_context():
    error = ConfigFileError("run.ini", 7, "unknown key 'foo'")
    data = error.to_dict()
    assert data["error_type"] == "ConfigFileError"
    assert data["context"]["line"] == 7
    assert error.message.startswith("run.ini:7:")


def test_settings_defaults():
    settings = get_settings()
    assert settings.numerics.node_epsilon == 1e-6
    assert settings.numerics.rest_tolerance == 1e-9
    assert settings.numerics.density_floor == 1e-3
    assert settings.validate_config() == []


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("BOHMQ_NUMERICS__NODE_EPSILON", "1e-5")
    monkeypatch.setenv("BOHMQ_PARALLEL__ENABLED", "true")
    settings = reload_settings()
    assert settings.numerics.node_epsilon == 1e-5
    assert settings.parallel.enabled is True


def test_config_manager_rejects_inconsistent_settings():
    settings = Settings(numerics={"constancy_abs_tol": 1e-3, "constancy_rel_tol": 1e-6})
    with pytest.raises(ValueError, match="constancy_abs_tol"):
        ConfigManager(settings)


@pytest.fixture
def log_stream():
    stream = io.StringIO()
    configure_logging("DEBUG", "json", stream)
    yield stream
    configure_logging("WARNING", "text")


def test_structured_logger_emits_json_with_run_id(log_stream):
    stream = log_stream
    token = run_id_var.set("run-42")
    try:
        StructuredLogger("test").info("Solved", states=3)
    finally:
        run_id_var.reset(token)
    entry = json.loads(stream.getvalue().strip().splitlines()[-1])
    assert entry["message"] == "Solved"
    assert entry["run_id"] == "run-42"
    assert entry["context"] == {"states": 3}


def test_measure_performance_logs_failures(log_stream):
    stream = log_stream

    @measure_performance("failing")
    def failing():
        raise ConvergenceError("no root")

    with pytest.raises(ConvergenceError):
        failing()
    entry = json.loads(stream.getvalue().strip().splitlines()[-1])
    assert entry["context"]["success"] is False
    assert "no root" in entry["context"]["error"]


def test_measure_performance_respects_timing_switch(log_stream, monkeypatch):
    monkeypatch.setenv("BOHMQ_OBSERVABILITY__TIMING_ENABLED", "false")
    reload_settings()

    @measure_performance("quiet")
    def quiet():
        return 7

    assert quiet() == 7
    assert "quiet" not in log_stream.getvalue()
