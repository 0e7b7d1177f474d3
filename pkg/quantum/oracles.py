"""
Closed-form reference spectra and eigenfunctions.

Used as analytic oracles by the test-suite, the reproduce battery and the
convergence benchmark.
"""

from math import factorial

import numpy as np
from scipy.special import eval_genlaguerre, eval_hermite, lpmv

from core.models import Units


def box_energy(n: int, a: float = 1.0, units: Units = Units()) -> float:
    """n^2 pi^2 hbar^2 / (2 m a^2), n >= 1."""
    return n * n * np.pi ** 2 * units.hbar ** 2 / (2.0 * units.mass * a * a)


def box_state(n: int, x, a: float = 1.0) -> np.ndarray:
    return np.sqrt(2.0 / a) * np.sin(n * np.pi * np.asarray(x, dtype=float) / a)


def harmonic_energy(n: int, omega: float = 1.0, units: Units = Units()) -> float:
    """(n + 1/2) hbar omega, n >= 0."""
    return (n + 0.5) * units.hbar * omega


def harmonic_state(n: int, x, omega: float = 1.0, units: Units = Units()) -> np.ndarray:
    """Normalized Hermite function."""
    k = np.sqrt(units.mass * omega / units.hbar)
    xi = k * np.asarray(x, dtype=float)
    norm = np.sqrt(k / (2.0 ** n * factorial(n) * np.sqrt(np.pi)))
    return norm * eval_hermite(n, xi) * np.exp(-0.5 * xi * xi)


def hydrogen_energy(n: int, Z: float = 1.0, units: Units = Units()) -> float:
    """-m Z^2 / (2 hbar^2 n^2) for V = -Z / r."""
    return -units.mass * Z * Z / (2.0 * units.hbar ** 2 * n * n)


def hydrogen_radial(n: int, l: int, r, Z: float = 1.0, units: Units = Units()) -> np.ndarray:
    """R_nl(r), normalized with weight r^2."""
    a0 = units.hbar ** 2 / (units.mass * Z)
    rho = 2.0 * np.asarray(r, dtype=float) / (n * a0)
    norm = np.sqrt((2.0 / (n * a0)) ** 3 * factorial(n - l - 1) / (2.0 * n * factorial(n + l)))
    return norm * rho ** l * np.exp(-0.5 * rho) * eval_genlaguerre(n - l - 1, 2 * l + 1, rho)


def harmonic3d_energy(n_r: int, l: int, omega: float = 1.0, units: Units = Units()) -> float:
    """(2 n_r + l + 3/2) hbar omega."""
    return (2 * n_r + l + 1.5) * units.hbar * omega


def angular_momentum_sq(l: int, units: Units = Units()) -> float:
    """l(l+1) hbar^2."""
    return l * (l + 1) * units.hbar ** 2


def legendre_polar(l: int, m: int, theta) -> np.ndarray:
    """P_l^m(cos theta), unnormalized."""
    return lpmv(m, l, np.cos(np.asarray(theta, dtype=float)))
