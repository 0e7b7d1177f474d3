"""
Shared fixtures: solved spectra are computed once per session so the heavy
central batteries stay at desk scale.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.config import reload_settings  # noqa: E402
from core.models import AzimuthalParity, Grid1D, MotionMode, PolarGrid, RadialGrid, Units  # noqa: E402
from core.potentials import CentralPotential, Potential1D  # noqa: E402
from quantum import ShootingConfig, solve_bound_states_1d, solve_central_spectrum  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Every test starts from default settings, whatever the environment holds."""
    for key in list(os.environ):
        if key.startswith("BOHMQ_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(os.path.dirname(os.path.abspath(__file__)))
    reload_settings()
    yield
    reload_settings()


@pytest.fixture(scope="session")
def units():
    return Units()


@pytest.fixture(scope="session")
def box_potential():
    return Potential1D.box(1.0)


@pytest.fixture(scope="session")
def box_spectrum(box_potential):
    return solve_bound_states_1d(box_potential, Grid1D(0.0, 1.0, 2001), Units(), ShootingConfig(max_states=10))


@pytest.fixture(scope="session")
def harmonic_potential():
    return Potential1D.harmonic(1.0)


@pytest.fixture(scope="session")
def harmonic_spectrum(harmonic_potential):
    return solve_bound_states_1d(harmonic_potential, Grid1D(-10.0, 10.0, 2001), Units(),
                                 ShootingConfig(max_states=10))


@pytest.fixture(scope="session")
def coulomb():
    return CentralPotential.coulomb(1.0)


@pytest.fixture(scope="session")
def radial_grid():
    return RadialGrid.for_shells(3)


@pytest.fixture(scope="session")
def polar_grid():
    return PolarGrid(201)


@pytest.fixture(scope="session")
def hydrogen_spectrum(coulomb, radial_grid, polar_grid):
    """Rest-mode hydrogen states with n <= 3 (cos(m phi) azimuthal factors)."""
    return solve_central_spectrum(coulomb, 3, radial_grid, polar_grid, Units(), ShootingConfig(),
                                  AzimuthalParity.COS, MotionMode.REST)


@pytest.fixture(scope="session")
def circulating_spectrum(coulomb, radial_grid, polar_grid):
    """Circulating hydrogen states with n <= 2."""
    return solve_central_spectrum(coulomb, 2, radial_grid, polar_grid, Units(), ShootingConfig(),
                                  mode=MotionMode.CIRCULATING)


@pytest.fixture(scope="session")
def hydrogen_211(hydrogen_spectrum):
    return hydrogen_spectrum.states[(2, 1, 1)]


@pytest.fixture(scope="session")
def hydrogen_1s(hydrogen_spectrum):
    return hydrogen_spectrum.states[(1, 0, 0)]
