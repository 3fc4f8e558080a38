"""Flat `key = value` run configuration mirroring the config dataclasses.

Every key can also be overridden by a CLI flag of the same name; precedence
is defaults < config file < command line.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from vozprep.dsp import FeatureConfig
from vozprep.losses import LossConfig

_FEATURE_FIELDS = {f.name: f.type for f in dataclasses.fields(FeatureConfig)}
_LOSS_FIELDS = {f.name: f.type for f in dataclasses.fields(LossConfig)}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if key not in _FEATURE_FIELDS and key not in _LOSS_FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def load_config_file(path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), source=str(path))


def _coerce(name: str, value: str, kind) -> object:
    kind_name = kind if isinstance(kind, str) else kind.__name__
    try:
        if kind_name == "int":
            return int(value)
        return float(value)
    except ValueError:
        raise ConfigError(f"key {name!r}: cannot parse {value!r} as {kind_name}") from None


def build_configs(overrides: dict[str, str]) -> tuple[FeatureConfig, LossConfig]:
    """Apply string overrides on top of the dataclass defaults."""
    feature_kwargs = {}
    loss_kwargs = {}
    for key, value in overrides.items():
        if key in _FEATURE_FIELDS:
            feature_kwargs[key] = _coerce(key, value, _FEATURE_FIELDS[key])
        elif key in _LOSS_FIELDS:
            loss_kwargs[key] = _coerce(key, value, _LOSS_FIELDS[key])
        else:
            raise ConfigError(f"unknown key {key!r}")
    try:
        return FeatureConfig(**feature_kwargs), LossConfig(**loss_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def config_keys() -> list[str]:
    return list(_FEATURE_FIELDS) + list(_LOSS_FIELDS)
