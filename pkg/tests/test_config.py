"""
Tests for configuration loading and logging setup.
"""

import pytest
import logging
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from config import Config, DEFAULTS, SEED_ENV_VAR, load_config, setup_logging


class TestConfig:
    """YAML configuration with built-in defaults."""

    def test_defaults(self, default_config):
        assert default_config.seed == DEFAULTS["sampling"]["seed"]
        assert default_config.samples == 200
        assert default_config.max_degree == 4
        assert default_config.section_degree_bound == 8
        assert default_config.constants_degree_bound == 6
        assert default_config.workers == 4
        assert default_config.log_level == "WARNING"
        assert default_config.log_file is None

    def test_file_overrides(self, sample_config_file, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        config = Config(sample_config_file, env_file=None)
        assert config.seed == 11
        assert config.samples == 30
        assert config.max_degree == 4
        assert config.section_degree_bound == 5
        assert config.log_level == "INFO"

    def test_grouped_views(self, sample_config_file, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        config = Config(sample_config_file, env_file=None)
        assert config.sampling.seed == 11
        assert config.sampling.coefficient_height == 8
        assert config.eigen.section_degree_bound == 5
        assert config.eigen.weight_ball_height == 3

    def test_seed_from_environment(self, sample_config_file, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "99")
        assert Config(sample_config_file, env_file=None).seed == 99

    def test_bad_seed_in_environment_ignored(self, sample_config_file, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "abc")
        assert Config(sample_config_file, env_file=None).seed == 11

    def test_missing_file(self, temp_directory):
        with pytest.raises(FileNotFoundError):
            Config(os.path.join(temp_directory, "nope.yaml"), env_file=None)

    def test_load_config_falls_back(self, temp_directory, caplog):
        with caplog.at_level(logging.WARNING):
            config = load_config(os.path.join(temp_directory, "nope.yaml"))
        assert config.samples == 200
        assert "not found" in caplog.text

    def test_empty_file(self, temp_directory):
        path = os.path.join(temp_directory, "empty.yaml")
        with open(path, "w") as f:
            f.write("")
        assert Config(path, env_file=None).samples == 200

    def test_workers_at_least_one(self, temp_directory):
        path = os.path.join(temp_directory, "workers.yaml")
        with open(path, "w") as f:
            f.write("verify:\n  workers: 0\n")
        assert Config(path, env_file=None).workers == 1


class TestLogging:
    """Root logger configuration."""

    def test_setup_logging_with_file(self, temp_directory):
        path = os.path.join(temp_directory, "logs", "oreforge.log")
        with open(os.path.join(temp_directory, "logging.yaml"), "w") as f:
            f.write(f"logging:\n  level: debug\n  file: {path}\n")
        config = Config(os.path.join(temp_directory, "logging.yaml"), env_file=None)
        setup_logging(config)
        try:
            logging.getLogger("oreforge.test").debug("hello")
            assert logging.getLogger().level == logging.DEBUG
            assert os.path.exists(path)
        finally:
            for handler in logging.getLogger().handlers[:]:
                handler.close()
                logging.getLogger().removeHandler(handler)
