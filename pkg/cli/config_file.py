#!/usr/bin/env python3
"""
Run Configuration
Plain-text ``key = value`` files with ``[section]`` headers, validated
section by section. Every error is reported with the line of the offending
key. The schema is documented in docs/CONFIG_SCHEMA.md.
"""

import configparser
import re
from enum import Enum
from pathlib import Path
from typing import Annotated, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from core.exceptions import ConfigFileError, ConfigurationError
from core.models import RADIAL_SPACING, AzimuthalParity, Grid1D, MotionMode, PolarGrid, RadialGrid, Units
from core.potentials import CentralPotential, Potential1D, PotentialKind
from quantum.eigensolver import ShootingConfig

CENTRAL_KINDS = {PotentialKind.COULOMB, PotentialKind.HARMONIC3D}
# oscillator lattices end this many oscillator lengths (times sqrt(n_max)) out
OSCILLATOR_REACH = 12.0

_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


class Command(str, Enum):
    SOLVE1D = "solve1d"
    SOLVE_CENTRAL = "solve-central"
    VERIFY = "verify"
    TRAJECTORY = "trajectory"
    REPRODUCE = "reproduce"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _float_list(value):
    if isinstance(value, str):
        return [float(v) for v in value.replace(";", ",").split(",") if v.strip()]
    return value


FloatList = Annotated[List[float], BeforeValidator(_float_list)]


class RunSpec(_Section):
    command: Optional[Command] = None
    seed: int = Field(default=0, ge=0)
    out: Path = Path("results")
    classical: bool = False


class UnitsSpec(_Section):
    hbar: float = Field(default=1.0, gt=0.0)
    mass: float = Field(default=1.0, gt=0.0)

    def build(self) -> Units:
        return Units(hbar=self.hbar, mass=self.mass)


class PotentialSpec(_Section):
    """Potential shape; ``table`` is a two-column CSV (abscissa, value) for tabulated potentials."""
    kind: PotentialKind = PotentialKind.BOX
    a: float = Field(default=1.0, gt=0.0)
    omega: float = Field(default=1.0, gt=0.0)
    depth: float = Field(default=10.0, gt=0.0)
    z: float = Field(default=1.0, gt=0.0)
    table: Optional[Path] = None
    central: bool = False

    @model_validator(mode="after")
    def check_table(self):
        if self.kind is PotentialKind.TABULATED and self.table is None:
            raise ValueError("tabulated potentials need a 'table' file")
        return self

    @property
    def is_central(self) -> bool:
        return self.kind in CENTRAL_KINDS or (self.kind is PotentialKind.TABULATED and self.central)

    def _table(self) -> Tuple[np.ndarray, np.ndarray]:
        try:
            frame = pd.read_csv(self.table)
        except (OSError, ValueError) as exc:
            raise ConfigurationError(f"Cannot read potential table {self.table}: {exc}") from exc
        if frame.shape[1] < 2:
            raise ConfigurationError(f"Potential table {self.table} needs two columns")
        return frame.iloc[:, 0].to_numpy(float), frame.iloc[:, 1].to_numpy(float)

    def build_1d(self) -> Potential1D:
        if self.is_central:
            raise ConfigurationError(f"Potential '{self.kind.value}' is central, a 1D potential is required")
        if self.kind is PotentialKind.BOX:
            return Potential1D.box(self.a)
        if self.kind is PotentialKind.HARMONIC:
            return Potential1D.harmonic(self.omega)
        if self.kind is PotentialKind.FINITE_WELL:
            return Potential1D.finite_well(self.depth, self.a)
        return Potential1D.tabulated(*self._table())

    def build_central(self) -> CentralPotential:
        if not self.is_central:
            raise ConfigurationError(f"Potential '{self.kind.value}' is not a central potential")
        if self.kind is PotentialKind.COULOMB:
            return CentralPotential.coulomb(self.z)
        if self.kind is PotentialKind.HARMONIC3D:
            return CentralPotential.harmonic3d(self.omega)
        return CentralPotential.tabulated(*self._table())

    def describe(self) -> Dict[str, object]:
        return {"kind": self.kind.value, "a": self.a, "omega": self.omega, "depth": self.depth,
                "z": self.z, "table": str(self.table) if self.table else "", "central": self.central}


class GridSpec(_Section):
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n_points: int = Field(default=2001, ge=3)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    n_radial: Optional[int] = Field(default=None, ge=3)
    n_polar: int = Field(default=201, ge=3)

    def grid_1d(self, potential: Potential1D) -> Grid1D:
        """The configured interval, or a default one for the potential."""
        lo, hi = potential.domain
        if potential.kind is PotentialKind.HARMONIC:
            lo, hi = -10.0 / np.sqrt(potential.omega), 10.0 / np.sqrt(potential.omega)
        elif potential.kind is PotentialKind.FINITE_WELL:
            lo, hi = -(0.5 * potential.a + 10.0), 0.5 * potential.a + 10.0
        x_min = lo if self.x_min is None else self.x_min
        x_max = hi if self.x_max is None else self.x_max
        return Grid1D(x_min, x_max, self.n_points)

    def radial_grid(self, potential: CentralPotential, n_max: int, units: Units = Units()) -> RadialGrid:
        """
        The configured lattice. Without r_max, Coulomb lattices reach the
        shells up to n_max, oscillator lattices OSCILLATOR_REACH sqrt(n_max)
        oscillator lengths and tables their last sample; without n_radial
        the spacing is RADIAL_SPACING natural lengths.
        """
        length = potential.natural_length(units)
        if self.r_max is not None:
            r_max = self.r_max
        elif potential.kind is PotentialKind.COULOMB:
            r_max = RadialGrid.for_shells(n_max, length).r_max
        elif potential.kind is PotentialKind.HARMONIC3D:
            r_max = OSCILLATOR_REACH * np.sqrt(n_max) * length
        else:
            r_max = potential.domain[1]
        n_radial = self.n_radial or max(3, int(round(r_max / (RADIAL_SPACING * length))))
        return RadialGrid(r_max, n_radial)

    def polar_grid(self) -> PolarGrid:
        return PolarGrid(self.n_polar)


class ShootingSpec(_Section):
    max_states: int = Field(default=10, ge=1, le=500)
    bisection_tol: float = Field(default=1e-10, gt=0.0, lt=1e-2)
    match_point: float = Field(default=0.5, gt=0.0, lt=1.0)
    decay_threshold: float = Field(default=1e-8, gt=0.0)
    e_lo: Optional[float] = None
    e_hi: Optional[float] = None

    @model_validator(mode="after")
    def check_bracket(self):
        if (self.e_lo is None) != (self.e_hi is None):
            raise ValueError("e_lo and e_hi must be given together")
        if self.e_lo is not None and not self.e_lo < self.e_hi:
            raise ValueError(f"e_lo must be below e_hi, got [{self.e_lo}, {self.e_hi}]")
        return self

    def build(self) -> ShootingConfig:
        bracket = None if self.e_lo is None else (self.e_lo, self.e_hi)
        return ShootingConfig(energy_bracket=bracket, max_states=self.max_states,
                              bisection_tol=self.bisection_tol, match_point=self.match_point,
                              decay_threshold=self.decay_threshold)


class CentralSpec(_Section):
    """States with n <= n_max are solved; ``state`` = "n, l, m" selects the one bundled and verified."""
    n_max: int = Field(default=3, ge=1, le=12)
    state: Tuple[int, int, int] = (2, 1, 1)
    parity: AzimuthalParity = AzimuthalParity.COS
    mode: MotionMode = MotionMode.REST

    @field_validator("state", mode="before")
    @classmethod
    def parse_state(cls, value):
        if isinstance(value, str):
            return tuple(int(v) for v in value.replace(";", ",").split(",") if v.strip())
        return value

    @model_validator(mode="after")
    def check_state(self):
        n, l, m = self.state
        if not (n >= 1 and 0 <= l < n and 0 <= m <= l):
            raise ValueError(f"state must satisfy n >= 1, 0 <= l < n, 0 <= m <= l; got {self.state}")
        if n > self.n_max:
            raise ValueError(f"state n={n} exceeds n_max={self.n_max}")
        return self


class TrajectorySpec(_Section):
    dt: float = Field(default=1e-3)
    n_steps: int = Field(default=10_000, ge=1)
    state: int = Field(default=0, ge=0)
    q0: Optional[FloatList] = None
    p0: Optional[FloatList] = None
    rest_points: int = Field(default=10, ge=1)

    @field_validator("dt")
    @classmethod
    def check_dt(cls, value: float) -> float:
        if value == 0 or not np.isfinite(value):
            raise ValueError("dt must be nonzero and finite")
        return value

    @model_validator(mode="after")
    def check_lengths(self):
        if self.q0 is not None and self.p0 is not None and len(self.q0) != len(self.p0):
            raise ValueError("q0 and p0 must have the same length")
        return self


class RunConfig(BaseModel):
    """Validated run configuration; missing sections take their defaults."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    run: RunSpec = Field(default_factory=RunSpec)
    units: UnitsSpec = Field(default_factory=UnitsSpec)
    potential: PotentialSpec = Field(default_factory=PotentialSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    shooting: ShootingSpec = Field(default_factory=ShootingSpec)
    central: CentralSpec = Field(default_factory=CentralSpec)
    trajectory: TrajectorySpec = Field(default_factory=TrajectorySpec)

    def with_overrides(self, hbar: Optional[float] = None, mass: Optional[float] = None,
                       tol: Optional[float] = None, seed: Optional[int] = None,
                       classical: bool = False, out: Optional[Path] = None) -> "RunConfig":
        """Apply command-line flags on top of file values, re-validating the touched sections."""
        units = self.units.model_dump()
        units.update({k: v for k, v in (("hbar", hbar), ("mass", mass)) if v is not None})
        shooting = self.shooting.model_dump()
        if tol is not None:
            shooting["bisection_tol"] = tol
        run = self.run.model_dump()
        if seed is not None:
            run["seed"] = seed
        if out is not None:
            run["out"] = out
        run["classical"] = run["classical"] or classical
        data = self.model_dump()
        data.update(units=units, shooting=shooting, run=run)
        try:
            return RunConfig.model_validate(data)
        except ValidationError as exc:
            error = exc.errors()[0]
            raise ConfigurationError(
                f"Invalid command-line value for {'.'.join(map(str, error['loc']))}: {error['msg']}"
            ) from exc


def _line_index(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    """Line numbers of section headers (key None) and of keys within sections."""
    index: Dict[Tuple[str, Optional[str]], int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION.match(line)
        if header:
            section = header.group(1).strip().lower()
            index.setdefault((section, None), number)
            continue
        key = _KEY.match(line)
        if key and section is not None:
            index.setdefault((section, key.group(1).strip().lower()), number)
    return index


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    """
    Parse and validate configuration text.

    Raises:
        ConfigFileError: Syntax errors, unknown sections or keys, invalid values
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigFileError(source, exc.lineno, "key outside of any [section]") from exc
    except configparser.ParsingError as exc:
        line, content = exc.errors[0]
        raise ConfigFileError(source, line, f"cannot parse {content.strip()!r}") from exc
    except configparser.Error as exc:
        raise ConfigFileError(source, getattr(exc, "lineno", None), exc.message.splitlines()[0]) from exc

    index = _line_index(text)
    data = {section.lower(): dict(parser.items(section)) for section in parser.sections()}
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = [str(part) for part in error["loc"]]
        line = None
        if loc:
            key = loc[1] if len(loc) > 1 else None
            line = index.get((loc[0], key)) or index.get((loc[0], None))
        where = ".".join(loc) or "configuration"
        raise ConfigFileError(source, line, f"{where}: {error['msg']}") from exc


def load_run_config(path) -> RunConfig:
    """Read a configuration file; see parse_run_config."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFileError(str(path), None, f"cannot read file ({exc.strerror})") from exc
    return parse_run_config(text, str(path))
