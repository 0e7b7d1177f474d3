"""Local four-point (cubic) Lagrange interpolation on uniform lattices."""

from typing import Tuple

import numpy as np

from core.exceptions import GridSizeError, MaskedSampleError


def lagrange4(values: np.ndarray, x0: float, h: float, x: float) -> Tuple[float, float]:
    """
    Value and first derivative at x of the cubic through the four samples
    around x, on the lattice x_j = x0 + j h.

    The stencil is clamped at the ends of the lattice, so points just outside
    it are extrapolated from the outermost four samples.

    Raises:
        MaskedSampleError: The stencil touches a masked (NaN) sample
    """
    n = values.size
    if n < 4:
        raise GridSizeError(n, required=4)
    s = (x - x0) / h
    start = min(max(int(np.floor(s)) - 1, 0), n - 4)
    u = s - start
    stencil = values[start:start + 4]
    if not np.all(np.isfinite(stencil)):
        raise MaskedSampleError(x)

    a, b, c, d = u, u - 1.0, u - 2.0, u - 3.0
    weights = np.array([-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0])
    slopes = np.array([
        -(c * d + b * d + b * c) / 6.0,
        (c * d + a * d + a * c) / 2.0,
        -(b * d + a * d + a * b) / 2.0,
        (b * c + a * c + a * b) / 6.0,
    ])
    return float(weights @ stencil), float(slopes @ stencil) / h
