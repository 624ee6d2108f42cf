"""Scenario files.

A scenario is a flat ini file with a single ``[scenario]`` section::

    [scenario]
    r = 0.5
    ratio = 50
    t_start = 0.4
    t_end = 0.6
    ordering = both
    measures = P, T

Several sources may be layered; later keys override earlier ones.
"""
import configparser
import dataclasses
import io
import logging
import math
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from oneatom.core.errors import ConfigError, ContractViolationError
from oneatom.core.objects import Branch, Ordering, SystemParams

SECTION = "scenario"
POINTS_PER_PERIOD = 2000
MEASURES = ("T", "P", "T_A", "n", "q", "wigner")
ORDERINGS = {
    "both": (Ordering.with_ordering, Ordering.without_ordering),
    "with": (Ordering.with_ordering,),
    "without": (Ordering.without_ordering,),
}
BRANCHES = {"both": (Branch.plus, Branch.minus), "plus": (Branch.plus,), "minus": (Branch.minus,)}
SWITCHES = {"on": True, "true": True, "yes": True, "off": False, "false": False, "no": False}


@dataclass(frozen=True)
class ScenarioConfig:
    units: str = "dimensionless"
    r: float = 0.5
    ratio: float = 50.0
    g: Optional[float] = None
    omega12: Optional[float] = None
    omega23: Optional[float] = None
    t_start: float = 0.0
    t_end: float = 1.0
    n_points: int = 0
    ordering: str = "both"
    branch: str = "both"
    measures: Tuple[str, ...] = ("T", "P", "T_A", "n", "q")
    oracle: bool = False
    dim: int = 0
    steps: int = 0
    steps_per_period: int = 200
    steps_per_fast_period: int = 40
    workers: int = 0
    output_path: str = "results.csv"
    wigner_points: int = 41

    def params(self) -> SystemParams:
        try:
            if self.units == "physical":
                return SystemParams.physical(self.g, self.omega12, self.omega23)
            return SystemParams.dimensionless(self.r, self.ratio)
        except (ContractViolationError, TypeError) as ex:
            raise ConfigError("units", str(ex))

    def orderings(self) -> Tuple[Ordering, ...]:
        return ORDERINGS[self.ordering]

    def branches(self) -> Tuple[Branch, ...]:
        return BRANCHES[self.branch]

    def points(self) -> int:
        if self.n_points:
            return self.n_points
        return max(2, math.ceil(POINTS_PER_PERIOD * (self.t_end - self.t_start)))

    def time_grid(self) -> np.ndarray:
        """Sample times in units of t0."""
        return np.linspace(self.t_start, self.t_end, self.points())

    def validate(self, lines: Optional[dict] = None) -> "ScenarioConfig":
        lines = lines or {}

        def fail(name, message):
            raise ConfigError(name, message, lines.get(name))

        if self.units not in ("dimensionless", "physical"):
            fail("units", "expected 'dimensionless' or 'physical', got %r" % self.units)
        if self.units == "dimensionless":
            if not self.ratio > 0:
                fail("ratio", "Omega12/delta must be positive")
            if not self.r >= 0:
                fail("r", "r must be non-negative")
        else:
            for name in ("g", "omega12", "omega23"):
                if getattr(self, name) is None:
                    fail(name, "required when units = physical")
            if not self.g > 0:
                fail("g", "must be positive")
            if not self.omega12 > 0:
                fail("omega12", "must be positive")
            if not self.omega23 >= 0:
                fail("omega23", "must be non-negative")
        if not self.t_start >= 0:
            fail("t_start", "must be non-negative")
        if not self.t_end > self.t_start:
            fail("t_end", "must exceed t_start")
        if self.n_points and self.n_points < 2:
            fail("n_points", "need at least 2 points (0 selects the default grid)")
        if self.ordering not in ORDERINGS:
            fail("ordering", "expected one of %s" % ", ".join(ORDERINGS))
        if self.branch not in BRANCHES:
            fail("branch", "expected one of %s" % ", ".join(BRANCHES))
        unknown = [m for m in self.measures if m not in MEASURES]
        if unknown or not self.measures:
            fail("measures", "expected a non-empty subset of %s, got %s" % (", ".join(MEASURES), ", ".join(unknown)))
        for name in ("dim", "steps", "workers"):
            if getattr(self, name) < 0:
                fail(name, "must be non-negative")
        for name in ("steps_per_period", "steps_per_fast_period", "wigner_points"):
            if getattr(self, name) < 1:
                fail(name, "must be positive")
        if self.dim == 1:
            fail("dim", "must be at least 2 (0 selects automatic sizing)")
        return self

    def with_overrides(self, **overrides) -> "ScenarioConfig":
        """Copy with the non-None overrides applied, validated."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if self.units == "physical" or changes.get("units") == "physical":
            ignored = [name for name in ("r", "ratio") if name in changes]
            if ignored:
                logging.warning("units = physical: ignoring %s, set g, omega12 and omega23 instead", ", ".join(ignored))
        return dataclasses.replace(self, **changes).validate()

    def to_ini(self) -> str:
        config = configparser.ConfigParser(interpolation=None)
        config[SECTION] = {}
        section = config[SECTION]
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if value is None:
                continue
            if item.name == "measures":
                section[item.name] = ", ".join(value)
            elif item.name == "oracle":
                section[item.name] = "on" if value else "off"
            elif isinstance(value, float):
                section[item.name] = repr(value)
            else:
                section[item.name] = str(value)
        buffer = io.StringIO()
        config.write(buffer)
        return buffer.getvalue()

    @classmethod
    def from_ini(cls, text: str, base: Optional["ScenarioConfig"] = None) -> "ScenarioConfig":
        values, lines = _parse(text)
        current = base or cls()
        return dataclasses.replace(current, **values).validate(lines)

    @classmethod
    def load(cls, paths: Iterable[str], base: Optional["ScenarioConfig"] = None) -> "ScenarioConfig":
        config = base or cls()
        for path in paths:
            try:
                with open(path, "r") as f:
                    text = f.read()
            except OSError as ex:
                raise ConfigError(None, "cannot read %s: %s" % (path, ex))
            config = cls.from_ini(text, config)
        return config


FIELD_TYPES = {item.name: item for item in dataclasses.fields(ScenarioConfig)}


def _line_numbers(text: str) -> dict:
    lines = {}
    for number, line in enumerate(text.splitlines(), start=1):
        match = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]", line)
        if match:
            lines.setdefault(match.group(1).lower(), number)
    return lines


def _parse(text: str) -> Tuple[dict, dict]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as ex:
        raise ConfigError(None, "missing [%s] section header" % SECTION, ex.lineno)
    except configparser.DuplicateOptionError as ex:
        raise ConfigError(ex.option, "key given twice", ex.lineno)
    except configparser.ParsingError as ex:
        line = ex.errors[0][0] if ex.errors else None
        raise ConfigError(None, "malformed line", line)
    except configparser.Error as ex:
        raise ConfigError(None, str(ex))

    lines = _line_numbers(text)
    if not parser.has_section(SECTION):
        raise ConfigError(None, "missing [%s] section" % SECTION)
    values = {}
    for key, raw in parser.items(SECTION):
        if key not in FIELD_TYPES:
            raise ConfigError(key, "unknown key", lines.get(key))
        values[key] = _convert(key, raw.strip(), lines.get(key))
    return values, lines


def _convert(key: str, raw: str, line: Optional[int]):
    default = FIELD_TYPES[key].default
    try:
        if key == "measures":
            return tuple(m.strip() for m in raw.split(",") if m.strip())
        if key == "oracle":
            if raw.lower() not in SWITCHES:
                raise ValueError("expected on or off")
            return SWITCHES[raw.lower()]
        if key in ("g", "omega12", "omega23"):
            return float(raw)
        if isinstance(default, bool):
            return SWITCHES[raw.lower()]
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not a finite number")
            return value
        return raw
    except (ValueError, KeyError) as ex:
        raise ConfigError(key, "invalid value %r (%s)" % (raw, ex), line)
