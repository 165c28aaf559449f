# tests/test_config.py
import os

import pytest

from backend.config.config import DEFAULT_PRIME, DEFAULT_SAMPLES, DEFAULT_SEED, Config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("EO_SEED", "EO_PRIME", "EO_SAMPLES", "EO_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    config = Config(load_env=False)
    assert config.get_seed() == DEFAULT_SEED
    assert config.get_prime() == DEFAULT_PRIME
    assert config.get_samples() == DEFAULT_SAMPLES
    assert config.get_log_level() == "WARNING"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("EO_SEED", "42")
    monkeypatch.setenv("EO_PRIME", "11")
    monkeypatch.setenv("EO_SAMPLES", "7")
    monkeypatch.setenv("EO_LOG_LEVEL", "debug")
    config = Config(load_env=False)
    assert (config.get_seed(), config.get_prime(), config.get_samples()) == (42, 11, 7)
    assert config.get_log_level() == "DEBUG"


def test_blank_value_falls_back_to_default(monkeypatch):
    monkeypatch.setenv("EO_SEED", "  ")
    assert Config(load_env=False).get_seed() == DEFAULT_SEED


@pytest.mark.parametrize(
    "name, value",
    [
        ("EO_SEED", "-1"),
        ("EO_SEED", "abc"),
        ("EO_PRIME", "2"),
        ("EO_PRIME", "9"),
        ("EO_SAMPLES", "0"),
        ("EO_LOG_LEVEL", "LOUD"),
    ],
)
def test_invalid_values_raise(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError):
        Config(load_env=False)


def test_schema_path_exists():
    path = Config(load_env=False).get_schema_path()
    assert os.path.isabs(path)
    assert os.path.exists(path)
    assert path.endswith(os.path.join("schemas", "report.v1.json"))
