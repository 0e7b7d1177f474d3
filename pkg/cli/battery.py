"""Diagnostic battery over one central state, shared by verify and reproduce."""

from dataclasses import dataclass
from typing import List

import numpy as np

from core.config import get_settings
from core.models import MotionMode, SeparableCentralState
from core.observability import StructuredLogger
from core.potentials import CentralPotential
from diagnostics import (
    Coordinate,
    continuity_report,
    operator_ratios,
    state_winding,
    verify_turning_point_argument,
)
from dynamics import rest_check

logger = StructuredLogger("cli.battery")

IDENTITY_TOLERANCE = 1e-10
TURNING_POINT_TOLERANCE = 1e-8
IMAGINARY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    claim: str = ""

    def row(self):
        return (self.name, self.value, self.tolerance, self.passed)


def bounded(name: str, value: float, tolerance: float, claim: str = "") -> Check:
    """Passes when |value| is below tolerance."""
    return Check(name, float(value), tolerance, bool(abs(value) < tolerance), claim)


def exceeding(name: str, value: float, threshold: float, claim: str = "") -> Check:
    """Passes when |value| is above threshold (expected violations)."""
    return Check(name, float(value), threshold, bool(abs(value) > threshold), claim)


def label(state: SeparableCentralState) -> str:
    return f"({state.n},{state.l},{state.m})"


def continuity_checks(state: SeparableCentralState, claim: str = "") -> List[Check]:
    report = continuity_report(state)
    constants = report.constants
    name = label(state)
    checks = [
        bounded(f"{name} continuity residual", report.residual_norm, IDENTITY_TOLERANCE, claim),
        bounded(f"{name} c_phi", constants.c_phi, IDENTITY_TOLERANCE, claim),
        bounded(f"{name} c_theta", constants.c_theta, IDENTITY_TOLERANCE, claim),
        bounded(f"{name} c_theta channel agreement", constants.agreement, IDENTITY_TOLERANCE, claim),
        bounded(f"{name} lambda_r", report.lambda_r.mean, IDENTITY_TOLERANCE, claim),
        bounded(f"{name} lambda_theta", report.lambda_theta.mean, IDENTITY_TOLERANCE, claim),
    ]
    # circulating states carry a constant azimuthal flux R_phi^2 alpha_phi
    if state.mode is MotionMode.CIRCULATING:
        checks.append(bounded(f"{name} lambda_phi spread", report.lambda_phi.std, IDENTITY_TOLERANCE, claim))
    else:
        checks.append(bounded(f"{name} lambda_phi", report.lambda_phi.mean, IDENTITY_TOLERANCE, claim))
    return checks


def turning_point_checks(state: SeparableCentralState, claim: str = "") -> List[Check]:
    """Both sides of the turning-point integral vanish with the state's own (zero) gradients."""
    constants = continuity_report(state).constants
    checks = []
    for coordinate, size, constant in (
        (Coordinate.RADIAL, state.radial_grid.n_points, constants.c_theta),
        (Coordinate.POLAR, state.polar_grid.n_points, constants.c_phi),
    ):
        result = verify_turning_point_argument(state, np.zeros(size), constant, coordinate)
        gap = abs(result.lhs - result.rhs) if result.applicable else float("inf")
        checks.append(bounded(f"{label(state)} turning point {coordinate.value}", gap,
                              TURNING_POINT_TOLERANCE, claim))
    return checks


def ratio_checks(state: SeparableCentralState, potential: CentralPotential, claim: str = "") -> List[Check]:
    """H, L2 and Lz2 ratios against E, alpha_theta^2, alpha_phi^2; Lz constant only when circulating."""
    name = label(state)
    ratios = operator_ratios(state, potential)
    checks = []
    for ratio in (ratios.hamiltonian, ratios.angular_sq, ratios.lz_sq):
        scale = max(abs(ratio.predicted), abs(ratio.real_mean), 1e-300)
        spread = max(ratio.real_max_deviation, abs(ratio.real_mean - ratio.predicted)) / scale
        checks.append(Check(f"{name} {ratio.name} ratio = {ratio.predicted:.6g}",
                            spread, ratios.tolerance, ratio.matches(ratios.tolerance), claim))
        checks.append(bounded(f"{name} {ratio.name} ratio imaginary part", ratio.imag_max,
                              IMAGINARY_TOLERANCE, claim))
    lz = ratios.lz
    spread = float(np.nanmax(np.abs(lz.field - np.nanmean(lz.field))))
    if state.mode is MotionMode.CIRCULATING:
        checks.append(Check(f"{name} Lz ratio constant = {lz.predicted:.6g}", spread, ratios.tolerance,
                            lz.matches(ratios.tolerance) and lz.imag_max < IMAGINARY_TOLERANCE, claim))
    elif state.m > 0:
        checks.append(Check(f"{name} Lz ratio not constant at rest", spread, ratios.tolerance,
                            spread > ratios.tolerance, claim))
    return checks


def winding_check(state: SeparableCentralState, claim: str = "") -> Check:
    winding = state_winding(state)
    return Check(f"{label(state)} action winding = {winding.winding:.6g}", winding.distance,
                 get_settings().numerics.winding_tolerance, winding.integer, claim)


def rest_checks(state, potential, count: int = 10, seed: int = 0, quantum: bool = True,
                name: str = "", claim: str = "") -> Check:
    """
    Rest check at ``count`` random points. With ``quantum`` off this is the
    classical control, which passes when the particle does move.
    """
    report = rest_check(state, potential, count=count, seed=seed, quantum=quantum)
    title = f"{name} rest check ({len(report.checked)} points)"
    if quantum:
        return Check(title, report.max_displacement, report.tolerance, report.all_passed, claim)
    moved = any(not v.passed for v in report.checked)
    return Check(f"{name} classical control moves", report.max_displacement, report.tolerance, moved, claim)


def state_checks(state: SeparableCentralState, potential: CentralPotential, rest_points: int = 10,
                 seed: int = 0, rest: bool = True, claim: str = "") -> List[Check]:
    """
    Continuity identities, turning-point integrals, operator ratios, winding
    and (optionally) the rest check of one state.
    """
    checks = continuity_checks(state, claim)
    checks += turning_point_checks(state, claim)
    checks += ratio_checks(state, potential, claim)
    checks.append(winding_check(state, claim))
    if rest and state.mode is MotionMode.REST:
        checks.append(rest_checks(state, potential, rest_points, seed, name=label(state), claim=claim))

    failed = [c.name for c in checks if not c.passed]
    logger.info("State battery", state=label(state), checks=len(checks), failed=len(failed))
    return checks
