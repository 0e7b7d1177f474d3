#!/usr/bin/env python3
"""
Numerov Shooting Engine

Every amplitude equation in this package is brought to the form

    R''(x) = (q(x) - lam * w(x)) R(x),   w > 0,

on a uniform lattice: the 1D equation (lam = E), the radial equation in
u = r R (lam = E) and the polar equation in the Mercator coordinate
(lam = alpha_theta^2 / hbar^2). The eigenparameter is located by counting
nodes of a forward and a backward shot matched at an interior sample, then
refined on the mismatch of the two shots.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from core.exceptions import ConvergenceError, InvalidParameterError
from core.models import count_nodes
from core.observability import StructuredLogger

logger = StructuredLogger("numerov")

# Running solutions are rescaled in place once they pass this magnitude
OVERFLOW_LIMIT = 1e150
_RESCALE = 1e-150

# Half width of the window used to stitch the two shots
STITCH_HALF_WIDTH = 5

MAX_BISECTIONS = 200

StartValues = Callable[[float], Tuple[float, float]]


class Direction(str, Enum):
    """Integration direction along the lattice."""
    FORWARD = "forward"
    BACKWARD = "backward"


def numerov(k2: np.ndarray, h: float, y0: float, y1: float) -> np.ndarray:
    """
    Three-term Numerov recurrence for R'' = -k2 R.

    Args:
        k2: Samples of k^2 = lam * w - q along the integration path
        h: Lattice spacing
        y0, y1: Values at the first two samples

    Returns:
        Samples along the path; the running solution is rescaled whenever
        it exceeds OVERFLOW_LIMIT so integration never aborts
    """
    n = len(k2)
    c = 1.0 + (h * h / 12.0) * np.asarray(k2, dtype=float)
    a = (12.0 - 10.0 * c).tolist()
    c = c.tolist()
    y = [0.0] * n
    y[0] = y0
    if n > 1:
        y[1] = y1
    for i in range(1, n - 1):
        nxt = (a[i] * y[i] - c[i - 1] * y[i - 1]) / c[i + 1]
        y[i + 1] = nxt
        if abs(nxt) > OVERFLOW_LIMIT:
            for j in range(i + 2):
                y[j] *= _RESCALE
    return np.array(y)


def dirichlet_start(h: float) -> StartValues:
    """R = 0 at the boundary sample, R = h at the next one."""
    return lambda lam: (0.0, h)


@dataclass(frozen=True, eq=False)
class SturmProblem:
    """
    Discretized R'' = (q - lam * w) R with start values at both ends.

    Attributes:
        q: Eigenparameter-independent part of the coefficient
        w: Positive weight multiplying the eigenparameter
        h: Lattice spacing
        forward_start: lam -> (R_0, R_1)
        backward_start: lam -> (R_{n-1}, R_{n-2})
        match_fraction: Preferred matching position as a fraction of the lattice
    """
    q: np.ndarray
    w: np.ndarray
    h: float
    forward_start: Optional[StartValues] = None
    backward_start: Optional[StartValues] = None
    match_fraction: float = 0.5

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        w = np.broadcast_to(np.asarray(self.w, dtype=float), q.shape).copy()
        if q.ndim != 1 or q.size < 3:
            raise InvalidParameterError("n_points", q.size, ">= 3 lattice samples")
        if not np.all(np.isfinite(q)):
            bad = int(np.flatnonzero(~np.isfinite(q))[0])
            raise InvalidParameterError("potential", f"non-finite at sample {bad}", "finite potential samples")
        if not np.all(w > 0):
            raise InvalidParameterError("w", "non-positive", "positive eigenparameter weight")
        if not 0.0 < self.match_fraction < 1.0:
            raise InvalidParameterError("match_point", self.match_fraction, "0 < match_point < 1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "w", w)
        if self.forward_start is None:
            object.__setattr__(self, "forward_start", dirichlet_start(self.h))
        if self.backward_start is None:
            object.__setattr__(self, "backward_start", dirichlet_start(self.h))

    @property
    def size(self) -> int:
        return self.q.size

    def k2(self, lam: float) -> np.ndarray:
        return lam * self.w - self.q

    def integrate(self, lam: float, direction: Direction, stop: Optional[int] = None) -> np.ndarray:
        """
        Shoot from one end towards index ``stop`` (the far end by default).

        The result is returned in lattice order, covering only the samples
        that were integrated.
        """
        k2 = self.k2(lam)
        n = self.size
        if direction is Direction.FORWARD:
            stop = n - 1 if stop is None else stop
            y0, y1 = self.forward_start(lam)
            return numerov(k2[:stop + 1], self.h, y0, y1)
        stop = 0 if stop is None else stop
        y0, y1 = self.backward_start(lam)
        return numerov(k2[stop:][::-1], self.h, y0, y1)[::-1]

    def match_index(self, lam: float) -> int:
        """
        Matching sample: the preferred one if classically allowed at lam,
        otherwise the nearest allowed sample.
        """
        n = self.size
        lo, hi = 2, n - 3
        target = int(round(self.match_fraction * (n - 1)))
        target = min(max(target, lo), hi)
        allowed = np.flatnonzero(self.k2(lam)[lo:hi + 1] >= 0) + lo
        if allowed.size == 0 or self.k2(lam)[target] >= 0:
            return target
        return int(allowed[np.argmin(np.abs(allowed - target))])


@dataclass(frozen=True)
class MatchedShot:
    """Forward and backward shots at one trial eigenparameter."""
    lam: float
    index: int
    count: int
    mismatch: float
    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)
    backward_offset: int = 0


def _mismatch(f_m, f_p, b_m, b_p) -> float:
    """Discrete Wronskian of the two shots, scale-free (sine of the angle between them)."""
    norm = np.hypot(f_m, f_p) * np.hypot(b_m, b_p)
    if norm == 0.0:
        return 0.0
    return float((f_m * b_p - f_p * b_m) / norm)


def matched_shot(problem: SturmProblem, lam: float) -> MatchedShot:
    """
    Shoot from both ends and count eigenvalues below lam.

    The count is nodes(forward on [0, m]) + nodes(backward on [m, n-1]) plus
    one when the forward log-derivative falls below the backward one at m.
    """
    n = problem.size
    m = problem.match_index(lam)
    stop_fwd = min(n - 1, m + STITCH_HALF_WIDTH)
    start_bwd = max(0, m - STITCH_HALF_WIDTH)
    fwd = problem.integrate(lam, Direction.FORWARD, stop_fwd)
    bwd = problem.integrate(lam, Direction.BACKWARD, start_bwd)
    f_m, f_p = fwd[m], fwd[m + 1]
    b_m, b_p = bwd[m - start_bwd], bwd[m + 1 - start_bwd]
    mismatch = _mismatch(f_m, f_p, b_m, b_p)
    below = 1 if f_m * b_m * mismatch > 0 else 0
    count = count_nodes(fwd[:m + 1]) + count_nodes(bwd[m - start_bwd:]) + below
    return MatchedShot(lam, m, count, mismatch, fwd, bwd, start_bwd)


def allowed_run(problem: SturmProblem, lam: float, index: int) -> Tuple[int, int]:
    """Bounds of the classically allowed stretch that contains ``index``."""
    allowed = problem.k2(lam) >= 0
    if not allowed[index]:
        return index, index
    lo, hi = index, index
    while lo > 0 and allowed[lo - 1]:
        lo -= 1
    while hi < problem.size - 1 and allowed[hi + 1]:
        hi += 1
    return lo, hi


def stitch(problem: SturmProblem, shot: MatchedShot) -> np.ndarray:
    """
    Join the two shots into one lattice function.

    Both shots are carried across the allowed stretch around the matching
    sample and joined at the sample where the forward shot is largest, so
    the join never sits on a node. The backward shot is scaled by a
    least-squares fit to the forward shot around that sample.
    """
    n = problem.size
    lo, hi = allowed_run(problem, shot.lam, shot.index)
    fwd = problem.integrate(shot.lam, Direction.FORWARD, min(n - 1, hi + 1))
    start = max(0, lo - 1)
    bwd = problem.integrate(shot.lam, Direction.BACKWARD, start)
    first, last = max(1, lo), min(n - 2, hi)
    j = first + int(np.argmax(np.abs(fwd[first:last + 1])))
    a, b = max(start, j - STITCH_HALF_WIDTH), min(len(fwd) - 1, j + STITCH_HALF_WIDTH)
    f = fwd[a:b + 1]
    g = bwd[a - start:b + 1 - start]
    denom = float(np.dot(g, g))
    scale = float(np.dot(f, g)) / denom if denom > 0 else 0.0
    out = np.empty(n)
    out[:j + 1] = fwd[:j + 1]
    out[j + 1:] = scale * bwd[j + 1 - start:]
    return out


@dataclass(frozen=True)
class EigenvalueRoot:
    """One located eigenparameter with its search record."""
    index: int
    value: float
    iterations: int
    mismatch: float
    resolved: bool = True


class EigenvalueSearch:
    """
    Node-count bisection with a shared cache of evaluated shots.

    Every evaluated trial value tightens the brackets of all later states.
    """

    def __init__(self, problem: SturmProblem, tol: float):
        self.problem = problem
        self.tol = tol
        self._shots: Dict[float, MatchedShot] = {}

    def shot(self, lam: float) -> MatchedShot:
        cached = self._shots.get(lam)
        if cached is None:
            cached = matched_shot(self.problem, lam)
            self._shots[lam] = cached
        return cached

    def count(self, lam: float) -> int:
        return self.shot(lam).count

    def _bracket(self, k: int) -> Tuple[float, float]:
        below = [lam for lam, s in self._shots.items() if s.count <= k]
        above = [lam for lam, s in self._shots.items() if s.count >= k + 1]
        return max(below), min(above)

    def _resolution(self, a: float, b: float) -> float:
        return self.tol * max(abs(a), abs(b), np.finfo(float).tiny)

    def grow_upper(self, lower: float, upper: float, wanted: int, max_doublings: int = 60) -> float:
        """Double the bracket width until it holds ``wanted`` states."""
        base = self.count(lower)
        for _ in range(max_doublings):
            if self.count(upper) - base >= wanted:
                return upper
            upper = lower + 2.0 * (upper - lower)
        return upper

    def locate(self, k: int) -> EigenvalueRoot:
        """Eigenparameter with exactly k eigenvalues below it; brackets must already exist."""
        a, b = self._bracket(k)
        iterations = 0
        while not (self.count(a) == k and self.count(b) == k + 1):
            if b - a <= self._resolution(a, b):
                logger.warning("Unresolved near-degenerate pair", index=k, lower=a, upper=b)
                mid = 0.5 * (a + b)
                return EigenvalueRoot(k, mid, iterations, self.shot(mid).mismatch, resolved=False)
            if iterations >= MAX_BISECTIONS:
                raise ConvergenceError(
                    f"Node-count bisection did not isolate state {k}",
                    context={"index": k, "lower": a, "upper": b}
                )
            mid = 0.5 * (a + b)
            iterations += 1
            if self.count(mid) <= k:
                a = mid
            else:
                b = mid

        fa, fb = self.shot(a).mismatch, self.shot(b).mismatch
        if fa * fb < 0:
            root, result = brentq(
                lambda lam: self.shot(lam).mismatch, a, b,
                xtol=self._resolution(a, b), full_output=True, disp=False
            )
            iterations += result.iterations
            if not result.converged:
                raise ConvergenceError(f"Root refinement failed for state {k}", context={"index": k})
            return EigenvalueRoot(k, float(root), iterations, self.shot(root).mismatch)

        # mismatch has no sign change: finish on node counts alone
        while b - a > self._resolution(a, b):
            if iterations >= MAX_BISECTIONS:
                raise ConvergenceError(f"Bisection did not converge for state {k}", context={"index": k})
            mid = 0.5 * (a + b)
            iterations += 1
            if self.count(mid) <= k:
                a = mid
            else:
                b = mid
        mid = 0.5 * (a + b)
        return EigenvalueRoot(k, mid, iterations, self.shot(mid).mismatch)

    def locate_all(self, lower: float, upper: float, count: int) -> List[EigenvalueRoot]:
        """First ``count`` eigenparameters in [lower, upper] (fewer if the bracket holds fewer)."""
        first = self.count(lower)
        last = self.count(upper)
        available = min(count, last - first)
        return [self.locate(k) for k in range(first, first + available)]
