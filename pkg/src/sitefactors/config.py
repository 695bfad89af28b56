"""Run configuration: flat dotted keys, JSON file, CLI flags win.

Every key in KEY_TYPES can appear in the config file and as a `--<key>`
command-line flag; precedence is defaults < file < flags.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AlphaRangeError, SchemaError


def _parse_bool(text):
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise SchemaError(f"expected a boolean, got {text!r}")


def _parse_floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise SchemaError(f"expected comma-separated numbers, got {text!r}") from exc


KEY_TYPES = {
    "input": str,
    "out": str,
    "quiet": _parse_bool,
    "data.missing_policy": str,
    "engine.epsilon": float,
    "engine.max_iterations": int,
    "engine.kaiser_threshold": float,
    "engine.ridge_fallback": _parse_bool,
    "engine.varimax_tolerance": float,
    "composite.definition": str,
    "composite.binary": _parse_bool,
    "composite.balance_band": float,
    "composite.bias_band": float,
    "score.alpha": float,
    "score.top_k": int,
    "sweep.alpha_start": float,
    "sweep.alpha_stop": float,
    "sweep.alpha_step": float,
    "sweep.thetas": _parse_floats,
    "sweep.top_k": int,
    "synth.seed": int,
    "synth.regions": int,
    "synth.attributes": int,
    "synth.factors": int,
    "synth.loading": float,
    "synth.noise_std": float,
}

DEFAULTS = {
    "input": "",
    "out": "out",
    "quiet": False,
    "data.missing_policy": "reject",
    "engine.epsilon": 1e-5,
    "engine.max_iterations": 200,
    "engine.kaiser_threshold": 1.0,
    "engine.ridge_fallback": False,
    "engine.varimax_tolerance": 1e-8,
    "composite.definition": "",
    "composite.binary": False,
    "composite.balance_band": 0.1,
    "composite.bias_band": 0.5,
    "score.alpha": 0.5,
    "score.top_k": 10,
    "sweep.alpha_start": 0.0,
    "sweep.alpha_stop": 1.0,
    "sweep.alpha_step": 0.2,
    "sweep.thetas": (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
    "sweep.top_k": 30,
    "synth.seed": 42,
    "synth.regions": 426,
    "synth.attributes": 25,
    "synth.factors": 6,
    "synth.loading": 0.8,
    "synth.noise_std": 0.6,
}


def load_config_file(path) -> dict:
    """A JSON object of dotted keys; unknown keys are rejected."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: config must be a JSON object")
    unknown = sorted(set(raw) - set(KEY_TYPES))
    if unknown:
        raise SchemaError(f"{path}: unknown config keys {unknown}")
    return raw


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings keyed by the flat dotted names."""

    values: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, file_values: dict | None = None, overrides: dict | None = None):
        merged = dict(DEFAULTS)
        for source in (file_values or {}, overrides or {}):
            for key, value in source.items():
                if key not in KEY_TYPES:
                    raise SchemaError(f"unknown config key {key!r}")
                if value is None:
                    continue
                try:
                    merged[key] = KEY_TYPES[key](value)
                except (TypeError, ValueError) as exc:
                    raise SchemaError(f"bad value for {key!r}: {value!r}") from exc
        config = cls(values=merged)
        config.validate()
        return config

    def __getitem__(self, key):
        return self.values[key]

    def validate(self) -> None:
        if self["engine.epsilon"] <= 0:
            raise SchemaError("engine.epsilon must be positive")
        if self["engine.max_iterations"] < 1:
            raise SchemaError("engine.max_iterations must be at least 1")
        if self["data.missing_policy"] not in ("reject", "drop-region", "impute-median"):
            raise SchemaError(
                f"unknown data.missing_policy {self['data.missing_policy']!r}"
            )
        start = self["sweep.alpha_start"]
        stop = self["sweep.alpha_stop"]
        step = self["sweep.alpha_step"]
        if step <= 0:
            raise AlphaRangeError(f"sweep.alpha_step must be positive, got {step}")
        if not (0.0 <= start <= stop <= 1.0):
            raise AlphaRangeError(
                f"alpha grid [{start}, {stop}] must sit inside [0, 1]"
            )
        thetas = self["sweep.thetas"]
        if not thetas:
            raise SchemaError("sweep.thetas must not be empty")
        if any(b <= a for a, b in zip(thetas, thetas[1:])):
            raise SchemaError(f"sweep.thetas must be strictly ascending, got {thetas}")
        if not 0.0 <= self["score.alpha"] <= 1.0:
            raise AlphaRangeError(
                f"score.alpha must be within [0, 1], got {self['score.alpha']}"
            )

    def alphas(self) -> tuple[float, ...]:
        """The alpha grid, rounded so accumulated steps print cleanly."""
        start = self["sweep.alpha_start"]
        stop = self["sweep.alpha_stop"]
        step = self["sweep.alpha_step"]
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))

    def snapshot(self) -> dict:
        """JSON-ready copy of every resolved key (for the run manifest)."""
        out = {}
        for key in sorted(self.values):
            value = self.values[key]
            out[key] = list(value) if isinstance(value, tuple) else value
        return out
