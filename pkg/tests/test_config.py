"""
Unit tests for environment-driven settings.
"""

import pytest

from catp import config
from catp.cli.main import configure_logging


# ============================================================================
# TEST SUITE 1: Environment parsing
# ============================================================================


class TestEnvironmentSettings:
    """Test suite for CATP_* variables and their fallbacks."""

    def test_float_default(self, monkeypatch):
        """Test that an unset tolerance uses the default."""
        monkeypatch.delenv("CATP_TOLERANCE", raising=False)
        assert config._float_env("CATP_TOLERANCE", "1e-4") == 1e-4

    def test_float_override(self, monkeypatch):
        """Test that a valid tolerance is read from the environment."""
        monkeypatch.setenv("CATP_TOLERANCE", "1e-5")
        assert config._float_env("CATP_TOLERANCE", "1e-4") == 1e-5

    def test_float_invalid_falls_back(self, monkeypatch):
        """Test that an unparseable tolerance falls back to the default."""
        monkeypatch.setenv("CATP_TOLERANCE", "tight")
        assert config._float_env("CATP_TOLERANCE", "1e-4") == 1e-4

    def test_log_level_is_upper_cased(self, monkeypatch):
        """Test that a known level name is accepted in any case."""
        monkeypatch.setenv("CATP_LOG_LEVEL", " info ")
        assert config._log_level_env("CATP_LOG_LEVEL", "WARNING") == "INFO"

    def test_log_level_invalid_falls_back(self, monkeypatch):
        """Test that an unknown level name falls back to the default."""
        monkeypatch.setenv("CATP_LOG_LEVEL", "LOUD")
        assert config._log_level_env("CATP_LOG_LEVEL", "WARNING") == "WARNING"

    def test_fallback_level_configures_sink(self, monkeypatch):
        """Test that the fallback level can be handed to the stderr sink."""
        monkeypatch.setenv("CATP_LOG_LEVEL", "LOUD")
        level = config._log_level_env("CATP_LOG_LEVEL", "WARNING")
        monkeypatch.setattr("catp.cli.main.LOG_LEVEL", level)
        configure_logging(verbose=False)

    def test_module_level_is_known(self):
        """Test that the imported level is always a registered loguru level."""
        from loguru import logger

        assert logger.level(config.LOG_LEVEL).name == config.LOG_LEVEL


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
