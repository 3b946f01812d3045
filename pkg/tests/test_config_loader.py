import json

import pytest

from core.config_loader import THREADS_ENV, ConfigLoader, Settings
from core.errors import InvalidParams


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"threads": 2, "seed": 5, "samples": 500}), encoding="utf-8")
    return str(path)


def test_defaults():
    settings = ConfigLoader(environ={}).load()
    assert settings == Settings()
    assert settings.format == "json"


def test_precedence(config_file):
    loader = ConfigLoader(environ={THREADS_ENV: "3"})
    settings = loader.load(config_file, {"seed": 9, "samples": None})
    assert settings.threads == 2
    assert settings.seed == 9
    assert settings.samples == 500
    cli = loader.load(config_file, {"threads": 6})
    assert cli.threads == 6


def test_file_without_env(config_file):
    settings = ConfigLoader(environ={THREADS_ENV: ""}).load(config_file)
    assert (settings.threads, settings.seed) == (2, 5)


def test_env_threads_fill_missing_file_key(tmp_path):
    path = tmp_path / "seed_only.json"
    path.write_text(json.dumps({"seed": 5}), encoding="utf-8")
    loader = ConfigLoader(environ={THREADS_ENV: "3"})
    assert loader.load(str(path)).threads == 3
    assert loader.load().threads == 3


def test_unknown_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"threads": 1, "model": "x"}', encoding="utf-8")
    with pytest.raises(InvalidParams, match="model"):
        ConfigLoader(environ={}).load(str(path))


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{threads: 1", encoding="utf-8")
    with pytest.raises(InvalidParams):
        ConfigLoader(environ={}).load(str(path))
    with pytest.raises(InvalidParams):
        ConfigLoader(environ={}).load(str(tmp_path / "missing.json"))


def test_bad_env_value():
    with pytest.raises(InvalidParams):
        ConfigLoader(environ={THREADS_ENV: "many"}).load()


@pytest.mark.parametrize("kwargs", [
    {"threads": 0},
    {"seed": -1},
    {"samples": True},
    {"max_moment_order": 5},
    {"format": "xml"},
])
def test_invalid_settings(kwargs):
    with pytest.raises(InvalidParams):
        Settings(**kwargs)


def test_example_config_loads():
    from pathlib import Path

    example = Path(__file__).resolve().parent.parent / "config.example.json"
    settings = ConfigLoader(environ={}).load(str(example))
    assert settings.threads == 4
