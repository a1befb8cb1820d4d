from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass, fields, replace
from pathlib import Path

from dotenv import dotenv_values

from rabi.utils.errors import ConfigError


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    pole_guard: float = 1e-12
    series_tol: float = 1e-14
    max_terms: int = 500
    root_tol: float = 1e-11
    root_rel_tol: float = 1e-3
    scan_density: int = 200
    isolated_grid: int = 400
    isolated_tol: float = 1e-12
    truncation: int = 400
    convergence_tol: float = 1e-9
    n_levels: int = 10
    jobs: int = 1


_POSITIVE = {
    "pole_guard",
    "series_tol",
    "max_terms",
    "root_tol",
    "root_rel_tol",
    "scan_density",
    "isolated_grid",
    "isolated_tol",
    "truncation",
    "convergence_tol",
    "n_levels",
    "jobs",
}


def _coerce(name: str, raw: str, kind: type) -> object:
    try:
        value = kind(raw.strip())
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a {kind.__name__}, got {raw!r}") from exc
    if name in _POSITIVE and value <= 0:
        raise ConfigError(f"{name} must be positive, got {raw!r}")
    return value


def _layer(settings: Settings, values: Mapping[str, str | None], prefix: str = "") -> Settings:
    changes: dict[str, object] = {}
    for field in fields(Settings):
        raw = values.get(f"{prefix}{field.name.upper()}" if prefix else field.name)
        if raw is None or raw == "":
            continue
        kind = type(getattr(settings, field.name))
        if field.name == "log_level":
            changes[field.name] = raw.strip().upper()
        else:
            changes[field.name] = _coerce(field.name, raw, kind)
    return replace(settings, **changes)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a ``key=value`` config file; keys are lower-cased."""
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file not found: {file}")
    return {key.strip().lower(): value for key, value in dotenv_values(file).items() if value is not None}


def load_settings(config: Mapping[str, str] | None = None, environ: Mapping[str, str] | None = None) -> Settings:
    settings = _layer(Settings(), os.environ if environ is None else environ, prefix="RABI_")
    if config:
        settings = apply_config(settings, config)
    return settings


def apply_config(settings: Settings, config: Mapping[str, str]) -> Settings:
    """Layer parsed config-file values over ``settings``."""
    return _layer(settings, config)
