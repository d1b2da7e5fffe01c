"""
Unit Tests for Configuration Module

Tests JSON setting overrides and their validation.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json

import pytest

from src import config
from src.config import DEFAULT_SETTINGS, Settings, load_settings, resolve


@pytest.fixture
def settings_file(tmp_path):
    def _write(payload):
        path = tmp_path / "settings.json"
        path.write_text(json.dumps(payload))
        return str(path)
    return _write


class TestLoadSettings:
    """Test loading setting overrides"""

    def test_overrides_applied(self, settings_file):
        settings = load_settings(settings_file({"residual_tol": 1e-9, "dense_max_dim": 500}))
        assert settings.residual_tol == 1e-9
        assert settings.dense_max_dim == 500
        assert isinstance(settings.dense_max_dim, int)
        assert settings.kernel_rel == DEFAULT_SETTINGS.kernel_rel

    def test_integer_given_for_float(self, settings_file):
        settings = load_settings(settings_file({"shift_rel": 1}))
        assert settings.shift_rel == 1.0
        assert isinstance(settings.shift_rel, float)

    def test_seed_zero_allowed(self, settings_file):
        assert load_settings(settings_file({"seed": 0})).seed == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_settings(str(tmp_path / "absent.json"))

    def test_unknown_key(self, settings_file):
        with pytest.raises(KeyError):
            load_settings(settings_file({"colour": 1}))

    def test_not_an_object(self, settings_file):
        with pytest.raises(ValueError):
            load_settings(settings_file([1, 2]))

    @pytest.mark.parametrize("payload", [
        {"residual_tol": -1.0},
        {"residual_tol": "small"},
        {"dense_max_dim": 10.5},
        {"seed": -3},
        {"threads": True},
    ])
    def test_invalid_values(self, settings_file, payload):
        with pytest.raises(ValueError):
            load_settings(settings_file(payload))

    def test_base_settings_kept(self, settings_file):
        base = Settings(seed=11)
        assert load_settings(settings_file({"residual_tol": 1e-7}), base).seed == 11


class TestDefaults:
    """Test defaults and the thread environment variable"""

    def test_resolve(self):
        custom = Settings(seed=5)
        assert resolve(None) is DEFAULT_SETTINGS
        assert resolve(custom) is custom

    def test_threads_from_env(self, monkeypatch):
        monkeypatch.setenv(config.THREADS_ENV_VAR, "4")
        assert config._threads_from_env() == 4

    def test_threads_env_not_integer(self, monkeypatch):
        monkeypatch.setenv(config.THREADS_ENV_VAR, "many")
        assert config._threads_from_env() == 1

    def test_to_dict_lists_every_field(self):
        payload = DEFAULT_SETTINGS.to_dict()
        assert payload["residual_tol"] == 1e-8
        assert "dense_max_dim" in payload
