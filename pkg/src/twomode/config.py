"""Experiment configuration: flat ``key = value`` files plus CLI overrides.

Rates may be written relative to the coupling, ``gamma_a = 0.75*g``, and the
propagation length relative to its inverse, ``z_max = 3/g``.  Values may be
products and quotients of numbers and ``pi`` (``z_max = pi/2/g``).  Parsed values are stored in absolute units.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields

from .errors import ConfigurationError

__all__ = ["ExperimentConfig", "build_config", "parse_config_text", "serialize_config"]

KEYS = ("g", "gamma_a", "gamma_b", "n_max", "z_max", "z_points", "seed", "n_traj", "output_path")


@dataclass(frozen=True)
class ExperimentConfig:
    g: float = 1.0
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    n_max: int = 6
    z_max: float | None = None
    z_points: int = 401
    seed: int = 42
    n_traj: int = 20000
    output_path: str | None = None

    def __post_init__(self):
        if self.z_max is None:
            object.__setattr__(self, "z_max", math.pi / self.g if _positive(self.g) else None)
        _validate(self)


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and x > 0


def _validate(cfg: ExperimentConfig) -> None:
    if not _positive(cfg.g):
        raise ConfigurationError(f"g: must be a positive number, got {cfg.g!r}")
    for key in ("gamma_a", "gamma_b"):
        value = getattr(cfg, key)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            raise ConfigurationError(f"{key}: must be a non-negative number, got {value!r}")
    if not _positive(cfg.z_max):
        raise ConfigurationError(f"z_max: must be a positive number, got {cfg.z_max!r}")
    for key, low in (("n_max", 2), ("z_points", 2), ("n_traj", 2)):
        value = getattr(cfg, key)
        if isinstance(value, bool) or not isinstance(value, int) or value < low:
            raise ConfigurationError(f"{key}: must be an integer >= {low}, got {value!r}")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2**64:
        raise ConfigurationError(f"seed: must be a 64-bit unsigned integer, got {cfg.seed!r}")


def parse_config_text(text: str) -> dict[str, str]:
    """Raw ``key -> value`` strings from config-file text.

    Blank lines and ``#`` comments are skipped; unknown or repeated keys are
    errors.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _factor(key: str, token: str, text: str) -> float:
    token = token.strip()
    try:
        return math.pi if token.lower() == "pi" else float(token)
    except ValueError:
        raise ConfigurationError(f"{key}: not a number: {text!r}") from None


def _number(key: str, text: str, g: float | None, allowed_op: str | None) -> float:
    """Products and quotients of numbers and ``pi``, optionally ending in ``*g`` or ``/g``."""
    text = str(text)
    parts = re.split(r"([*/])", text)
    tokens, ops = parts[0::2], parts[1::2]
    if ops and tokens[-1].strip() == "g":
        op = ops.pop()
        tokens.pop()
        if op != allowed_op:
            raise ConfigurationError(f"{key}: suffix '{op}g' not allowed here, got {text!r}")
        unit = g if op == "*" else 1.0 / g
    elif text.strip() == "g" and allowed_op == "*":
        return g
    else:
        unit = 1.0
    value = _factor(key, tokens[0], text)
    for op, token in zip(ops, tokens[1:]):
        x = _factor(key, token, text)
        if op == "*":
            value *= x
        elif x == 0:
            raise ConfigurationError(f"{key}: division by zero in {text!r}")
        else:
            value /= x
    return value * unit


def _integer(key: str, text: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigurationError(f"{key}: not an integer: {text!r}") from None


def build_config(raw: dict[str, str]) -> ExperimentConfig:
    """Typed configuration from raw strings (file values already merged with flags)."""
    unknown = set(raw) - set(KEYS)
    if unknown:
        raise ConfigurationError(f"unknown keys: {sorted(unknown)}")
    values: dict = {}
    g = _number("g", raw["g"], None, None) if "g" in raw else 1.0
    if not _positive(g):
        raise ConfigurationError(f"g: must be a positive number, got {raw.get('g')!r}")
    values["g"] = g
    for key in ("gamma_a", "gamma_b"):
        if key in raw:
            values[key] = _number(key, raw[key], g, "*")
    if "z_max" in raw:
        values["z_max"] = _number("z_max", raw["z_max"], g, "/")
    for key in ("n_max", "z_points", "seed", "n_traj"):
        if key in raw:
            values[key] = _integer(key, raw[key])
    if raw.get("output_path"):
        values["output_path"] = str(raw["output_path"])
    return ExperimentConfig(**values)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text: every set key in field order, floats via ``repr``."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
