"""Experiment configuration: flag/file parsing and validation.

A configuration is assembled in layers, later ones winning:
built-in defaults, then the preset's defaults, then a ``key=value`` config
file, then explicit command-line flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .errors import ParameterError
from .walk import GQW, Engine, Phase, phase_radians, rational_phase

GOLDEN = 2 * math.pi * (math.sqrt(5) - 1) / 2

PRESETS = ("fig1", "fig2", "fig4", "fig6", "equivalence", "control", "circle")
FORMATS = ("csv", "json")

# keys accepted in a config file; the same names as the long flags
CONFIG_KEYS = ("engine", "against", "rho", "phi0", "steps", "stride", "initial", "lattice",
               "w", "spacing", "halfwidth", "taus", "snapshots", "preset", "out", "format",
               "workers")


class UsageError(ParameterError):
    """Malformed flags or configuration values."""


@dataclass(frozen=True)
class ContinuumSpec:
    widths: tuple = (0.65,)
    spacing: float = 0.25
    halfwidth: float = 240.0
    taus: tuple | None = None  # None: every stride-th step of the run

    def __post_init__(self):
        if not self.widths or any(not w > 0 for w in self.widths):
            raise UsageError(f"w: Gaussian widths must be positive, got {self.widths}")
        if not self.spacing > 0:
            raise UsageError(f"spacing: must be positive, got {self.spacing}")
        if not self.halfwidth > 0:
            raise UsageError(f"halfwidth: must be positive, got {self.halfwidth}")
        if self.taus is not None and any(int(t) != t or t < 0 for t in self.taus):
            raise UsageError(f"taus: continuum times must be integers >= 0, got {self.taus}")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str = "run"
    engine: Engine = GQW
    against: Engine | None = None
    rho: float = 0.5
    phi0: Phase = Fraction(1, 150)
    phi0_text: str = "1/150"
    initial: tuple = (1 / math.sqrt(2), 1j / math.sqrt(2))
    lattice: str = "line"
    circle_L: int = 0
    steps: int = 150
    stride: int = 1
    snapshots: tuple | None = None
    continuum: ContinuumSpec | None = None
    preset: str | None = None
    out: Path | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        u0, d0 = self.initial
        total = abs(u0) ** 2 + abs(d0) ** 2
        if abs(total - 1.0) > 1e-12:
            raise UsageError(f"initial: |u0|^2+|d0|^2 = {total!r}, must be 1 within 1e-12")
        if not 0.0 <= self.rho <= 1.0:
            raise UsageError(f"rho: must lie in [0, 1], got {self.rho}")
        if self.steps < 0:
            raise UsageError(f"steps: must be >= 0, got {self.steps}")
        if self.stride < 1:
            raise UsageError(f"stride: must be >= 1, got {self.stride}")
        if self.lattice == "circle" and self.circle_L < 1:
            raise UsageError(f"lattice: circle half-size must be >= 1, got {self.circle_L}")
        if self.format not in FORMATS:
            raise UsageError(f"format: expected one of {FORMATS}, got {self.format!r}")
        if self.preset is not None and self.preset not in PRESETS:
            raise UsageError(f"preset: expected one of {PRESETS}, got {self.preset!r}")
        if self.workers < 1:
            raise UsageError(f"workers: must be >= 1, got {self.workers}")

    @property
    def lattice_text(self) -> str:
        return "line" if self.lattice == "line" else f"circle:{self.circle_L}"

    def echo(self) -> dict:
        """Plain-data view of the configuration for output headers."""
        u0, d0 = (complex(a) for a in self.initial)
        out = {
            "command": self.command,
            "preset": self.preset,
            "engine": self.engine.name,
            "against": self.against.name if self.against else None,
            "rho": float(self.rho),
            "phi0": self.phi0_text,
            "phi0_radians": phase_radians(self.phi0),
            "initial": [u0.real, u0.imag, d0.real, d0.imag],
            "lattice": self.lattice_text,
            "steps": self.steps,
            "stride": self.stride,
            "snapshots": list(self.snapshots) if self.snapshots is not None else None,
        }
        if self.continuum is not None:
            c = self.continuum
            out["continuum"] = {"w": list(c.widths), "spacing": c.spacing,
                                "halfwidth": c.halfwidth,
                                "taus": list(c.taus) if c.taus is not None else None}
        return out


# ---------------------------------------------------------------- value parsers

def parse_phi0(text: str) -> tuple[Phase, str]:
    """``a/b`` means ``2 pi a/b`` (kept exact), ``golden`` the golden-ratio phase,
    a bare real is radians."""
    text = text.strip()
    if text.lower() == "golden":
        return GOLDEN, "golden"
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            q, p = int(num), int(den)
        except ValueError:
            raise UsageError(f"phi0: {text!r} is not of the form a/b with integers a, b") from None
        try:
            return rational_phase(q, p), f"{q}/{p}"
        except ParameterError as exc:
            raise UsageError(f"phi0: {exc}") from None
    value = _real("phi0", text)
    return value, repr(value)


def _real(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"{key}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise UsageError(f"{key}: must be finite, got {text!r}")
    return value


def _integer(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{key}: {text!r} is not an integer") from None


def _int_list(key: str, text: str) -> tuple:
    return tuple(_integer(key, part) for part in text.split(",") if part.strip())


def parse_initial(text: str) -> tuple:
    parts = [p for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError(f"initial: expected u_re,u_im,d_re,d_im, got {text!r}")
    ur, ui, dr, di = (_real("initial", p) for p in parts)
    return complex(ur, ui), complex(dr, di)


def parse_lattice(text: str) -> tuple[str, int]:
    text = text.strip().lower()
    if text == "line":
        return "line", 0
    kind, _, size = text.partition(":")
    if kind != "circle" or not size:
        raise UsageError(f"lattice: expected 'line' or 'circle:L', got {text!r}")
    return "circle", _integer("lattice", size)


def parse_engine(key: str, text: str) -> Engine:
    try:
        return Engine.parse(text)
    except ParameterError as exc:
        raise UsageError(f"{key}: {exc}") from None


def read_config_file(path) -> dict:
    """Flat ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value.strip()
    return values


# ---------------------------------------------------------------- assembly

def preset_defaults(name: str) -> dict:
    """Raw string settings that a preset installs before file and flags."""
    table = {
        "fig1": dict(engine="gqw", phi0="1/10", steps="3600"),
        "fig2": dict(engine="gqw", phi0="1/110", steps="440", stride="1"),
        "fig4": dict(engine="gqw", phi0="1/150", steps="140", stride="1",
                     w="0.65", snapshots=",".join(str(t) for t in range(10, 141, 10))),
        "fig6": dict(engine="gqw", phi0="1/150", steps="150", stride="1",
                     w="0.45,0.55,0.65,0.75,0.85", taus=",".join(str(t) for t in range(0, 151, 5))),
        "equivalence": dict(engine="timedep", against="gqw", phi0="1/110", steps="1000"),
        "control": dict(engine="control", against="standard", phi0="1/50", steps="500"),
        "circle": dict(engine="timedep", against="gqw", phi0="1/16", steps="100",
                       lattice="circle:8"),
    }
    if name not in table:
        raise UsageError(f"preset: expected one of {PRESETS}, got {name!r}")
    return table[name]


def build_config(command: str, settings: Mapping[str, str]) -> ExperimentConfig:
    """Validate raw string settings (flag names as keys) into a config."""
    unknown = set(settings) - set(CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown keys: {', '.join(sorted(unknown))}")
    kw: dict = {"command": command}
    s = dict(settings)
    if "engine" in s:
        kw["engine"] = parse_engine("engine", s["engine"])
    if s.get("against"):
        kw["against"] = parse_engine("against", s["against"])
    if "rho" in s:
        kw["rho"] = _real("rho", s["rho"])
    if "phi0" in s:
        kw["phi0"], kw["phi0_text"] = parse_phi0(s["phi0"])
    if "initial" in s:
        kw["initial"] = parse_initial(s["initial"])
    if "lattice" in s:
        kw["lattice"], kw["circle_L"] = parse_lattice(s["lattice"])
    for key in ("steps", "stride", "workers"):
        if key in s:
            kw[key] = _integer(key, s[key])
    if s.get("snapshots"):
        kw["snapshots"] = _int_list("snapshots", s["snapshots"])
    if "preset" in s:
        kw["preset"] = s["preset"] or None
    if "out" in s:
        kw["out"] = Path(s["out"]) if s["out"] else None
    if "format" in s:
        kw["format"] = s["format"].lower()

    wants_continuum = command == "continuum" or any(k in s for k in ("w", "taus"))
    if wants_continuum:
        ckw = {}
        if "w" in s:
            ckw["widths"] = tuple(_real("w", part) for part in s["w"].split(",") if part.strip())
        if "spacing" in s:
            ckw["spacing"] = _real("spacing", s["spacing"])
        if "halfwidth" in s:
            ckw["halfwidth"] = _real("halfwidth", s["halfwidth"])
        if s.get("taus"):
            ckw["taus"] = _int_list("taus", s["taus"])
        kw["continuum"] = ContinuumSpec(**ckw)
    elif "spacing" in s or "halfwidth" in s:
        raise UsageError("spacing/halfwidth only apply to continuum runs (add --w)")
    return ExperimentConfig(**kw)


def merge_settings(preset: str | None, file_values: Mapping[str, str] | None,
                   flag_values: Mapping[str, str]) -> dict:
    """Layer preset defaults < config file < explicit flags."""
    name = flag_values.get("preset") or (file_values or {}).get("preset") or preset
    merged: dict = {}
    if name:
        merged.update(preset_defaults(name))
        merged["preset"] = name
    merged.update(file_values or {})
    merged.update(flag_values)
    return merged


def with_phase(cfg: ExperimentConfig, text: str) -> ExperimentConfig:
    phi0, label = parse_phi0(text)
    return replace(cfg, phi0=phi0, phi0_text=label)


