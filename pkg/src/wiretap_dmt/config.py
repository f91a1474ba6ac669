"""Flat ``key = value`` experiment files, one experiment per file.

Lines starting with ``#`` and blank lines are ignored. Lists are comma
separated. Example::

    name = iso_2_2_1
    m = 2
    n = 2
    k = 1
    scheme = isotropic_no_csit
    plan = no_csit
    r_s = 0.75
    snr_db = 30, 35, 40, 45, 50, 55, 60
    trials = 200000
    seed = 1
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .channel import AntennaConfig
from .events import EVENTS, PlanKind
from .exceptions import ConfigError, WiretapError
from .montecarlo import McConfig, WindowPolicy
from .rates import SchemeKind

__all__ = ["ExperimentConfig", "parse_config_text", "load_config", "default_plan"]

_KEY_RE = re.compile(r"^[a-z_][a-z0-9_]*$")


def default_plan(scheme: SchemeKind) -> PlanKind:
    return PlanKind.NO_CSIT if scheme is SchemeKind.ISOTROPIC_NO_CSIT else PlanKind.CSIT_ADAPTIVE


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    n: int
    k: int
    scheme: SchemeKind
    r_s: float
    snr_db: tuple[float, ...]
    trials: int
    plan: PlanKind | None = None
    seed: int = 0
    name: str = "experiment"
    event: str = "secrecy_rate_outage"
    fit_p_min: float = 1e-5
    fit_p_max: float = 1e-1
    min_events: int = 100
    tolerance: float = 0.1
    threads: int = 1
    out_dir: str = "."

    def __post_init__(self):
        object.__setattr__(self, "scheme", _enum(SchemeKind)("scheme", self.scheme))
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        if self.plan is not None:
            object.__setattr__(self, "plan", _enum(PlanKind)("plan", self.plan))
        if self.plan is None:
            object.__setattr__(self, "plan", default_plan(self.scheme))
        if self.event not in EVENTS:
            raise ConfigError(f"event: unknown event {self.event!r}; expected one of {', '.join(EVENTS)}")
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", self.name):
            raise ConfigError(f"name: {self.name!r} is not a safe file stem")
        if not (0 < self.fit_p_min < self.fit_p_max <= 1):
            raise ConfigError("fit window: need 0 < fit_p_min < fit_p_max <= 1")
        if self.tolerance < 0:
            raise ConfigError("tolerance must be >= 0")
        # builds and validates the Monte Carlo config eagerly
        self.mc_config()

    @property
    def antennas(self) -> AntennaConfig:
        try:
            return AntennaConfig(self.m, self.n, self.k)
        except WiretapError as exc:
            raise ConfigError(f"antennas: {exc}") from exc

    @property
    def window(self) -> WindowPolicy:
        return WindowPolicy(self.fit_p_min, self.fit_p_max, self.min_events)

    def mc_config(self) -> McConfig:
        return McConfig(
            self.antennas, self.scheme, self.plan, self.r_s, self.snr_db, self.trials, self.seed, self.min_events
        )

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "scheme": self.scheme.value,
            "plan": self.plan.value,
            "r_s": self.r_s,
            "snr_db": list(self.snr_db),
            "trials": self.trials,
            "seed": self.seed,
            "event": self.event,
            "fit_p_min": self.fit_p_min,
            "fit_p_max": self.fit_p_max,
            "min_events": self.min_events,
            "tolerance": self.tolerance,
        }


def _int(key, v):
    try:
        f = float(v)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {v!r}") from None
    if not math.isfinite(f) or f != int(f):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    # exact parse for large seeds
    return int(v) if re.fullmatch(r"[+-]?\d+", v) else int(f)


def _float(key, v):
    try:
        f = float(v)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {v!r}") from None
    if not math.isfinite(f):
        raise ConfigError(f"{key}: must be finite, got {v!r}")
    return f


def _float_list(key, v):
    items = [x.strip() for x in v.split(",")]
    if not items or any(not x for x in items):
        raise ConfigError(f"{key}: empty entry in list {v!r}")
    return tuple(_float(key, x) for x in items)


def _enum(cls):
    def conv(key, v):
        try:
            return cls(v)
        except ValueError:
            choices = ", ".join(e.value for e in cls)
            raise ConfigError(f"{key}: unknown value {v!r}; expected one of {choices}") from None

    return conv


_CONVERTERS = {
    "m": _int,
    "n": _int,
    "k": _int,
    "scheme": _enum(SchemeKind),
    "plan": _enum(PlanKind),
    "r_s": _float,
    "snr_db": _float_list,
    "trials": _int,
    "seed": _int,
    "name": lambda key, v: v,
    "event": lambda key, v: v,
    "fit_p_min": _float,
    "fit_p_max": _float,
    "min_events": _int,
    "tolerance": _float,
    "threads": _int,
    "out_dir": lambda key, v: v,
}
_REQUIRED = ("m", "n", "k", "scheme", "r_s", "snr_db", "trials")


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip().lower(), val.strip()
        if not _KEY_RE.match(key) or key not in _CONVERTERS:
            known = ", ".join(sorted(_CONVERTERS))
            raise ConfigError(f"line {lineno}: unknown key {key!r} (known keys: {known})")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _CONVERTERS[key](key, val)
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    names = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in values.items() if k in names})


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config_text(text)
