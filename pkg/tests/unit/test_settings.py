# tests/unit/test_settings.py
"""
Unit tests for DLN_* settings and logging setup.
"""
import pytest
import structlog

from src.agent_library.errors import ConfigError
from src.config import apply_overrides, configure_logging, get_settings, reset_settings

pytestmark = pytest.mark.unit


class TestSettings:
    """Test suite for get_settings, overrides and the environment layer."""

    def test_defaults(self):
        settings = get_settings()
        assert settings.quad_tol == 1e-10
        assert settings.series_tol == 1e-14
        assert settings.threads == 1
        assert settings.log_level == "INFO"

    def test_cached(self):
        assert get_settings() is get_settings()

    def test_environment_variable(self, monkeypatch):
        monkeypatch.setenv("DLN_QUAD_TOL", "1e-8")
        monkeypatch.setenv("DLN_MAX_PANELS", "64")
        reset_settings()
        settings = get_settings()
        assert settings.quad_tol == 1e-8
        assert settings.max_panels == 64

    def test_empty_variable_ignored(self, monkeypatch):
        monkeypatch.setenv("DLN_THREADS", "")
        reset_settings()
        assert get_settings().threads == 1

    def test_unparseable_variable(self, monkeypatch):
        monkeypatch.setenv("DLN_MAX_PANELS", "many")
        reset_settings()
        with pytest.raises(ConfigError):
            get_settings()

    def test_out_of_range_variable(self, monkeypatch):
        monkeypatch.setenv("DLN_QUAD_TOL", "1e-3")
        reset_settings()
        with pytest.raises(ConfigError):
            get_settings()

    def test_log_level_normalized(self, monkeypatch):
        monkeypatch.setenv("DLN_LOG_LEVEL", "debug")
        reset_settings()
        assert get_settings().log_level == "DEBUG"

    def test_unknown_log_level(self, monkeypatch):
        monkeypatch.setenv("DLN_LOG_LEVEL", "chatty")
        reset_settings()
        with pytest.raises(ConfigError):
            get_settings()

    def test_overrides_win_over_environment(self, monkeypatch):
        monkeypatch.setenv("DLN_QUAD_TOL", "1e-8")
        assert apply_overrides({"quad_tol": 1e-9}).quad_tol == 1e-9
        assert get_settings().quad_tol == 1e-9

    def test_reset_drops_overrides(self):
        apply_overrides({"series_tol": 1e-10})
        reset_settings()
        assert get_settings().series_tol == 1e-14

    def test_invalid_override(self):
        with pytest.raises(ConfigError):
            apply_overrides({"quad_tol": 1.0})


class TestLogging:
    """Test suite for configure_logging."""

    def test_events_reach_stderr(self, capsys):
        configure_logging("INFO")
        structlog.get_logger().info("Grid point done", index=3)
        err = capsys.readouterr().err
        assert "Grid point done" in err
        assert "index=3" in err

    def test_level_filter(self, capsys):
        configure_logging("WARNING")
        structlog.get_logger().info("Hidden event")
        structlog.get_logger().warning("Shown event")
        err = capsys.readouterr().err
        assert "Hidden event" not in err
        assert "Shown event" in err
