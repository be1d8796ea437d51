"""Run configuration: a strict ``section.key = value`` text format.

Example::

    # comments start with '#'
    material.E_m = 3.0 GPa
    material.rho_cnt = 1.4 g/cm3
    geometry.L = 200 mm
    model.bc = SS
    solver.amplitude_grid = 0.1, 0.2, 0.5

Values without a unit suffix are SI. Unknown sections or keys, malformed
lines, a unit of the wrong kind and duplicate keys are all errors, raised
before any computation starts. Keys missing from a present section fall back
to the defaults (the reference beam of the study).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Tuple

from .basis import BoundaryCondition
from .errors import ConfigError
from .material import BeamGeometry, ConstituentSet, DistributionProfile, ProfileKind
from .pipeline import BeamCase
from .quadrature import RuleKind
from .solvers import SolverConfig
from .uq import MCProtocol

UNITS = {
    "modulus": {"Pa": 1.0, "kPa": 1e3, "MPa": 1e6, "GPa": 1e9, "TPa": 1e12},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3},
    "density": {"kg/m3": 1.0, "g/cm3": 1e3},
}


def _float(kind=None):
    def parse(text):
        m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*(\S*)\s*", text)
        if not m:
            raise ConfigError(f"cannot parse number from {text!r}")
        try:
            value = float(m.group(1))
        except ValueError:
            raise ConfigError(f"cannot parse number from {text!r}") from None
        unit = m.group(2)
        if unit:
            table = UNITS.get(kind, {})
            if unit not in table:
                raise ConfigError(f"unit {unit!r} not valid here (expected one of {sorted(table)})")
            value *= table[unit]
        return value

    return parse


def _int(text):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _list(parse):
    def inner(text):
        items = [t for t in (s.strip() for s in text.split(",")) if t]
        if not items:
            raise ConfigError("empty list")
        return tuple(parse(t) for t in items)

    return inner


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ConfigError(f"expected one of {options}, got {t!r}")
        return t

    return parse


def _bool(text):
    t = text.strip().lower()
    if t not in ("true", "false"):
        raise ConfigError(f"expected true or false, got {text!r}")
    return t == "true"


def _str(text):
    return text.strip()


SCHEMA = {
    "material": {
        "E_m": (_float("modulus"), 3.0e9),
        "rho_m": (_float("density"), 1200.0),
        "E_cnt": (_float("modulus"), 1.0e12),
        "rho_cnt": (_float("density"), 1400.0),
        "eta_E": (_float(), 0.80),
    },
    "geometry": {
        "L": (_float("length"), 0.200),
        "b": (_float("length"), 0.0100),
        "h": (_float("length"), 0.0020),
    },
    "model": {
        "bc": (_choice("CC", "SS"), "CC"),
        "N": (_int, 15),
        "distribution": (_choice("UD", "FG_LINEAR", "FG_X"), "UD"),
        "v_star": (_float(), 0.10),
        "quadrature": (_choice("GAUSS_POLY_EXACT", "CHEBYSHEV_CORRECTED"), "GAUSS_POLY_EXACT"),
        "modes": (_int, 4),
    },
    "solver": {
        "newton_tol": (_float(), 1e-10),
        "max_newton": (_int, 30),
        "max_bisections": (_int, 6),
        "n_harmonics": (_int, 3),
        "steps_per_period": (_int, 400),
        "amplitude": (_float(), 0.3),
        "amplitude_grid": (_list(_float()), tuple(round(0.1 * k, 10) for k in range(1, 11))),
    },
    "study": {
        "param": (_choice("V_cnt", "eta_E", "w0_over_h", "N", "E_cnt", "E_m", "h", "L"), "V_cnt"),
        "values": (_list(_float()), (0.0, 0.05, 0.10, 0.15, 0.20)),
        "N_list": (_list(_int), (6, 8, 10, 12, 14, 16, 18, 20)),
        "reference_N": (_int, 40),
    },
    "uq": {
        "analysis": (_choice("mc", "sobol"), "mc"),
        "n_mc": (_int, 1000),
        "R": (_int, 5),
        "seed": (_int, 20240601),
        "confidence": (_float(), 0.95),
        "n_base": (_int, 1024),
        "n_bootstrap": (_int, 100),
        "ranges": (_choice("design", "table4"), "design"),
        "family": (_choice("normal", "uniform"), "normal"),
    },
    "output": {
        "directory": (_str, "."),
        "format_version": (_int, 1),
    },
}

REQUIRED = {
    "modes": ("material", "geometry", "model"),
    "backbone": ("material", "geometry", "model", "solver"),
    "sweep": ("material", "geometry", "model", "study"),
    "converge": ("material", "geometry", "model", "study"),
    "uq": ("material", "geometry", "model", "uq"),
    "export": ("material", "geometry", "model"),
    "validate": (),
}


@dataclass(frozen=True)
class RunConfig:
    values: Dict[str, Dict[str, object]]
    present: Tuple[str, ...] = ()
    source: str = ""
    text: str = field(default="", repr=False)

    def __getitem__(self, section):
        return self.values[section]

    def require(self, command):
        """Raise if a config file was given but lacks a block ``command`` needs."""
        if not self.source:
            return
        missing = [s for s in REQUIRED.get(command, ()) if s not in self.present]
        if missing:
            raise ConfigError(f"{self.source}: command {command!r} needs block(s) {missing}")

    def canonical(self):
        """Resolved configuration as sorted ``section.key = value`` lines."""
        from .io import fmt

        lines = []
        for sec in sorted(self.values):
            for key in sorted(self.values[sec]):
                v = self.values[sec][key]
                text = ", ".join(fmt(x) for x in v) if isinstance(v, tuple) else fmt(v)
                lines.append(f"{sec}.{key} = {text}")
        return "\n".join(lines) + "\n"

    def case(self):
        m, g, mo, s = self["material"], self["geometry"], self["model"], self["solver"]
        return BeamCase(
            constituents=ConstituentSet(m["E_m"], m["rho_m"], m["E_cnt"], m["rho_cnt"], m["eta_E"]),
            geometry=BeamGeometry(g["L"], g["b"], g["h"]),
            profile=DistributionProfile(ProfileKind(mo["distribution"]), mo["v_star"]),
            bc=BoundaryCondition(mo["bc"]),
            N=mo["N"],
            amplitude=s["amplitude"],
            n_harmonics=s["n_harmonics"],
            quadrature=RuleKind(mo["quadrature"]),
        )

    def solver_config(self):
        s = self["solver"]
        return SolverConfig(
            newton_tol=s["newton_tol"],
            max_newton=s["max_newton"],
            max_bisections=s["max_bisections"],
            n_harmonics=s["n_harmonics"],
            steps_per_period=s["steps_per_period"],
        )

    def protocol(self, seed=None):
        u = self["uq"]
        return MCProtocol(
            n_mc=u["n_mc"], R=u["R"], seed=u["seed"] if seed is None else seed,
            confidence=u["confidence"],
        )


def defaults():
    return {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}


def parse_config(text, source="<string>"):
    values = defaults()
    present, seen = [], set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'section.key = value'")
        lhs, rhs = (t.strip() for t in line.split("=", 1))
        sec, dot, key = lhs.partition(".")
        if not dot or sec not in SCHEMA:
            raise ConfigError(f"{where}: unknown section in {lhs!r}")
        if key not in SCHEMA[sec]:
            raise ConfigError(f"{where}: unknown key {lhs!r}")
        if lhs in seen:
            raise ConfigError(f"{where}: duplicate key {lhs!r}")
        seen.add(lhs)
        parse, _ = SCHEMA[sec][key]
        try:
            values[sec][key] = parse(rhs)
        except ConfigError as exc:
            raise ConfigError(f"{where}: {lhs}: {exc}") from None
        if sec not in present:
            present.append(sec)
    return RunConfig(values, tuple(present), source, text)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))


def default_config():
    return RunConfig(defaults())
