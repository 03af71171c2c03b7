"""Config file handling: YAML in, validated ScenarioConfig out, echo back out.

One loader serves both `validate-config` and the runner, so anything the
simulator accepts the validator accepts, and vice versa. The effective
config (defaults included) is dumped next to every result for provenance,
and a canonical hash of it rides along in each RunResult.
"""

import dataclasses
import hashlib
import json
from pathlib import Path

import yaml

from .scenario import ConfigError, ScenarioConfig

_SIZE_SUFFIXES = {
    "b": 1,                # bit
    "kb": 1_000,           # kilobit
    "mb": 1_000_000,       # megabit
    "B": 8,                # byte
    "kB": 8_000,
    "KB": 8_000,
    "MB": 8_000_000,
    "GB": 8_000_000_000,
}


def parse_file_size(value) -> int:
    """Accept raw bits or strings like '500kb' (kilobits) / '10MB' (megabytes)."""
    if isinstance(value, bool):
        raise ConfigError(f"file_bits: expected a size, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if not isinstance(value, str):
        raise ConfigError(f"file_bits: expected a size, got {value!r}")
    text = value.strip()
    for suffix in sorted(_SIZE_SUFFIXES, key=len, reverse=True):
        if text.endswith(suffix):
            number = text[: -len(suffix)].strip()
            try:
                return int(float(number) * _SIZE_SUFFIXES[suffix])
            except ValueError:
                break
    try:
        return int(text)
    except ValueError:
        raise ConfigError(
            f"file_bits: cannot parse size {value!r} (use bits, or suffixes {sorted(_SIZE_SUFFIXES)})"
        )


def _coerce(field: dataclasses.Field, value, path: str):
    ftype = field.type
    if dataclasses.is_dataclass(ftype):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a mapping, got {value!r}")
        return _build(ftype, value, path)
    default = field.default if field.default is not dataclasses.MISSING else None
    if isinstance(default, tuple) or ftype in (tuple, tuple[float, float]):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return tuple(value)
    if ftype is float or isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if ftype is int or (isinstance(default, int) and not isinstance(default, bool)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    return value


def _build(cls, data: dict, path: str = ""):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        where = path or cls.__name__
        raise ConfigError(f"unknown config field(s) under {where}: {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        field = fields[name]
        sub_path = f"{path}.{name}" if path else name
        if name == "file_bits":
            kwargs[name] = parse_file_size(value)
        else:
            kwargs[name] = _coerce(field, value, sub_path)
    return cls(**kwargs)


def config_from_dict(data: dict) -> ScenarioConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    config = _build(ScenarioConfig, data)
    config.validate()
    return config


def _plain(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def config_to_dict(config: ScenarioConfig) -> dict:
    return _plain(config)


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Read a YAML config file and apply flat override values on top."""
    raw = {}
    if path is not None:
        text = Path(path).read_text()
        raw = yaml.safe_load(text) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must contain a mapping")
    if overrides:
        for key, value in overrides.items():
            _apply_override(raw, key, value)
    return config_from_dict(raw)


def _apply_override(raw: dict, dotted_key: str, value) -> None:
    parts = dotted_key.split(".")
    node = raw
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {dotted_key}: {part} is not a section")
    node[parts[-1]] = value


def dump_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(config), sort_keys=True))


def config_hash(config: ScenarioConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()
