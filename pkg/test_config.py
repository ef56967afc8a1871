"""
Test settings loading and environment overrides.
"""

import logging

import pytest

import src.main as cli
from src.utils import config
from src.utils.config import get_project_root, load_settings, setup_logging


def test_default_settings():
    settings = load_settings(get_project_root() / "config" / "settings.yaml")
    assert settings.runtime["parallel"] >= 1
    assert settings.output["indent"] == 2


def test_missing_file_gives_empty_settings(tmp_path, monkeypatch):
    monkeypatch.delenv("TPB_PARALLEL", raising=False)
    monkeypatch.delenv("TPB_LOG_LEVEL", raising=False)
    settings = load_settings(tmp_path / "absent.yaml")
    assert settings.runtime == {}
    assert settings.output == {}


def test_environment_overrides(tmp_path, monkeypatch):
    path = tmp_path / "settings.yaml"
    path.write_text("runtime:\n  parallel: 1\nlogging:\n  level: WARNING\n", encoding="utf-8")
    monkeypatch.setenv("TPB_PARALLEL", "3")
    monkeypatch.setenv("TPB_LOG_LEVEL", "debug")
    settings = load_settings(path)
    assert settings.runtime["parallel"] == 3
    assert settings.logging["level"] == "DEBUG"

    monkeypatch.setenv("TPB_PARALLEL", "many")
    with pytest.raises(ValueError):
        load_settings(path)


def test_setup_logging_level():
    setup_logging("info")
    assert logging.getLogger().level == logging.INFO
    setup_logging("nonsense")
    assert logging.getLogger().level == logging.WARNING


def test_environment_file_is_loaded_once_per_run(monkeypatch, capsys):
    calls = []
    monkeypatch.setattr(config, "load_env", lambda: pytest.fail("load_settings must not read .env"))
    monkeypatch.setattr(cli, "load_env", lambda: calls.append(1))
    assert cli.main(["--schema", "verdict"]) == cli.EXIT_OK
    assert cli.main(["fan", "complete", "missing.json"]) == cli.EXIT_INPUT
    assert len(calls) == 2
    capsys.readouterr()
