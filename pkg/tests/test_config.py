from __future__ import annotations

import pytest

from rabi.config import Settings, apply_config, load_settings, read_config_file
from rabi.utils.errors import ConfigError


def test_defaults_without_environment() -> None:
    assert load_settings(environ={}) == Settings()


def test_environment_overrides_defaults() -> None:
    settings = load_settings(environ={"RABI_MAX_TERMS": "800", "RABI_LOG_LEVEL": "debug", "RABI_SERIES_TOL": "1e-12"})
    assert settings.max_terms == 800
    assert settings.log_level == "DEBUG"
    assert settings.series_tol == 1e-12
    assert settings.truncation == Settings().truncation


def test_empty_environment_values_are_ignored() -> None:
    assert load_settings(environ={"RABI_JOBS": ""}).jobs == 1


@pytest.mark.parametrize("raw", ["many", "0", "-3"])
def test_invalid_environment_value(raw: str) -> None:
    with pytest.raises(ConfigError):
        load_settings(environ={"RABI_TRUNCATION": raw})


def test_config_file_beats_environment(tmp_path) -> None:
    path = tmp_path / "rabi.conf"
    path.write_text("max_terms=900\nSERIES_TOL=1e-13\n# comment\n")
    config = read_config_file(path)
    settings = load_settings(config, environ={"RABI_MAX_TERMS": "800", "RABI_JOBS": "3"})
    assert settings.max_terms == 900
    assert settings.series_tol == 1e-13
    assert settings.jobs == 3


def test_apply_config_layers_over_given_settings() -> None:
    base = Settings(jobs=4)
    layered = apply_config(base, {"isolated_grid": "200"})
    assert layered.isolated_grid == 200
    assert layered.jobs == 4


def test_missing_config_file(tmp_path) -> None:
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "absent.conf")
