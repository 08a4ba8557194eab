"""
Configuration management for oreforge.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

DEFAULT_CONFIG_PATH = "config/oreforge.yaml"
SEED_ENV_VAR = "OREFORGE_SEED"
LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(name)s: %(message)s"

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "sampling": {
        "seed": 7,
        "samples": 200,
        "max_degree": 4,
        "coefficient_height": 8,
    },
    "eigen": {
        "section_degree_bound": 8,
        "constants_degree_bound": 6,
        "weight_ball_height": 3,
    },
    "verify": {
        "workers": 4,
    },
    "logging": {
        "level": "WARNING",
        "file": None,
    },
}


@dataclass
class SamplingConfig:
    """Random element generation for the property suites."""
    seed: int
    samples: int
    max_degree: int
    coefficient_height: int


@dataclass
class EigenConfig:
    """Search bounds for sections and weight-zero constants."""
    section_degree_bound: int
    constants_degree_bound: int
    weight_ball_height: int


class Config:
    """Main configuration class."""

    def __init__(self, config_path: str = DEFAULT_CONFIG_PATH, env_file: Optional[str] = ".env"):
        self.config_path = config_path
        if env_file and os.path.exists(env_file):
            load_dotenv(env_file)
        self._config = self._load_config()

    @classmethod
    def defaults(cls) -> "Config":
        """A config holding only the built-in defaults."""
        obj = cls.__new__(cls)
        obj.config_path = None
        obj._config = {}
        return obj

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        if not os.path.exists(self.config_path):
            raise FileNotFoundError(f"Config file not found: {self.config_path}")

        with open(self.config_path, "r") as f:
            return yaml.safe_load(f) or {}

    def _get(self, section: str, key: str) -> Any:
        return (self._config.get(section) or {}).get(key, DEFAULTS[section][key])

    @property
    def seed(self) -> int:
        """Random seed; OREFORGE_SEED wins over the file."""
        env = os.environ.get(SEED_ENV_VAR)
        if env:
            try:
                return int(env)
            except ValueError:
                logging.getLogger(__name__).warning(f"Ignoring non-integer {SEED_ENV_VAR}={env!r}")
        return int(self._get("sampling", "seed"))

    @property
    def samples(self) -> int:
        return int(self._get("sampling", "samples"))

    @property
    def max_degree(self) -> int:
        return int(self._get("sampling", "max_degree"))

    @property
    def coefficient_height(self) -> int:
        return int(self._get("sampling", "coefficient_height"))

    @property
    def section_degree_bound(self) -> int:
        return int(self._get("eigen", "section_degree_bound"))

    @property
    def constants_degree_bound(self) -> int:
        return int(self._get("eigen", "constants_degree_bound"))

    @property
    def weight_ball_height(self) -> int:
        return int(self._get("eigen", "weight_ball_height"))

    @property
    def workers(self) -> int:
        """Number of verify suites run in parallel."""
        return max(1, int(self._get("verify", "workers")))

    @property
    def log_level(self) -> str:
        """Get logging level."""
        return str(self._get("logging", "level")).upper()

    @property
    def log_file(self) -> Optional[str]:
        """Get log file path."""
        return self._get("logging", "file")

    @property
    def sampling(self) -> SamplingConfig:
        return SamplingConfig(self.seed, self.samples, self.max_degree, self.coefficient_height)

    @property
    def eigen(self) -> EigenConfig:
        return EigenConfig(self.section_degree_bound, self.constants_degree_bound, self.weight_ball_height)


def load_config(config_path: Optional[str] = None) -> Config:
    """The config at config_path, or the defaults when the file does not exist."""
    path = config_path or DEFAULT_CONFIG_PATH
    try:
        return Config(path)
    except FileNotFoundError:
        if config_path is not None:
            logging.getLogger(__name__).warning(f"Config file {path} not found, using defaults")
        if os.path.exists(".env"):
            load_dotenv(".env")
        return Config.defaults()


def setup_logging(config: Config) -> None:
    """Configure the root logger once; logs go to stderr and optionally a file."""
    handlers = [logging.StreamHandler()]
    if config.log_file:
        Path(config.log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(config.log_file))
    logging.basicConfig(level=getattr(logging, config.log_level, logging.WARNING), format=LOG_FORMAT,
                        handlers=handlers, force=True)
