"""Strict ``key = value`` run configuration.

Format: UTF-8 text, one ``key = value`` per line, ``#`` starts a comment,
blank lines are ignored.  Unknown keys, duplicate keys and malformed values
are errors.

Keys
----
kmax, nu, alpha, s, dt, t_final, seed
    required.
side_length
    box side, default 2 pi.
sample_every
    record every k-th step, default 1.
forcing
    ``none`` | ``mode`` | ``random`` (default ``mode``).
forcing_amplitude
    coefficient on ``forcing_index`` (mode) or the L^2 norm (random), default 1.
forcing_index
    mode index for ``forcing = mode``, default 0.
forcing_modes
    number of lowest modes carrying random forcing, default all.
initial_radius
    Voigt-norm radius of the seeded random initial state, default 0 (rest).
transient_fraction
    share of the run discarded before time averages, default 0.5.
"""
from __future__ import annotations

import dataclasses
import math
from pathlib import Path
from typing import Optional

from .errors import InvalidArgument


class ConfigError(InvalidArgument):
    pass


_FLOAT, _INT, _STR = float, int, str

_SCHEMA = {
    "side_length": (_FLOAT, 2.0 * math.pi),
    "kmax": (_INT, None),
    "nu": (_FLOAT, None),
    "alpha": (_FLOAT, None),
    "s": (_FLOAT, None),
    "dt": (_FLOAT, None),
    "t_final": (_FLOAT, None),
    "sample_every": (_INT, 1),
    "forcing": (_STR, "mode"),
    "forcing_amplitude": (_FLOAT, 1.0),
    "forcing_index": (_INT, 0),
    "forcing_modes": (_INT, None),
    "initial_radius": (_FLOAT, 0.0),
    "seed": (_INT, None),
    "transient_fraction": (_FLOAT, 0.5),
}
_REQUIRED = ("kmax", "nu", "alpha", "s", "dt", "t_final", "seed")
_FORCING_KINDS = ("none", "mode", "random")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    side_length: float
    kmax: int
    nu: float
    alpha: float
    s: float
    dt: float
    t_final: float
    sample_every: int
    forcing: str
    forcing_amplitude: float
    forcing_index: int
    forcing_modes: Optional[int]
    initial_radius: float
    seed: int
    transient_fraction: float

    def as_dict(self):
        return dataclasses.asdict(self)


def _convert(key, kind, text, lineno):
    try:
        if kind is _INT:
            return int(text)
        if kind is _FLOAT:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
        return text
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects {kind.__name__}, got {text!r}") from None


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = _convert(key, _SCHEMA[key][0], value, lineno)
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    full = {k: values.get(k, default) for k, (_, default) in _SCHEMA.items()}
    if full["forcing"] not in _FORCING_KINDS:
        raise ConfigError(f"forcing must be one of {_FORCING_KINDS}, got {full['forcing']!r}")
    if full["sample_every"] < 1:
        raise ConfigError("sample_every must be >= 1")
    if not 0.0 <= full["transient_fraction"] < 1.0:
        raise ConfigError("transient_fraction must lie in [0, 1)")
    return RunConfig(**full)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc}") from None
    return parse_config(text)


def build_run(cfg: RunConfig):
    """(domain, params, initial coefficients) described by a config."""
    from .galerkin import PhysicalParams, mode_forcing, random_forcing, random_state
    from .spectral_domain import build_torus_basis

    domain = build_torus_basis(cfg.side_length, cfg.kmax)
    if cfg.forcing == "none":
        h = mode_forcing(domain, 0.0)
    elif cfg.forcing == "mode":
        if not 0 <= cfg.forcing_index < domain.mode_count:
            raise ConfigError(f"forcing_index out of range [0, {domain.mode_count})")
        h = mode_forcing(domain, cfg.forcing_amplitude, cfg.forcing_index)
    else:
        h = random_forcing(domain, cfg.forcing_amplitude, cfg.seed, cfg.forcing_modes)
    params = PhysicalParams(cfg.nu, cfg.alpha, cfg.s, h)
    u0 = random_state(domain, params, cfg.initial_radius, cfg.seed + 1)
    return domain, params, u0
