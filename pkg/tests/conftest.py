"""
Pytest configuration and shared fixtures for the oreforge tests.
"""

import pytest
import random
import tempfile
import shutil
import sys
import os
from pathlib import Path

# Add src to Python path for all tests
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from catalog import BuiltinCatalog
from config import Config, SamplingConfig, EigenConfig


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom settings."""
    # Register custom markers
    config.addinivalue_line("markers", "unit: Unit tests (fast, exact arithmetic only)")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "slow: Slow tests (> 5 seconds)")


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add automatic markers."""
    for item in items:
        if "integration" in item.name.lower() or "test_cli" in item.nodeid:
            item.add_marker(pytest.mark.integration)
        else:
            # Default to unit tests
            item.add_marker(pytest.mark.unit)


# Shared fixtures
@pytest.fixture(scope="session")
def temp_directory():
    """Create a temporary directory for the test session."""
    temp_dir = tempfile.mkdtemp(prefix="oreforge_test_")
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def temp_spec_dir(temp_directory):
    """Create a temporary directory for spec files."""
    spec_dir = Path(temp_directory) / "specs"
    spec_dir.mkdir(exist_ok=True)
    return spec_dir


@pytest.fixture(scope="session")
def catalog():
    """One builtin catalog shared by the session; towers are immutable."""
    return BuiltinCatalog()


@pytest.fixture
def a1(catalog):
    return catalog.tower("A1")


@pytest.fixture
def lw1(catalog):
    return catalog.tower("LW1")


@pytest.fixture
def rw1(catalog):
    return catalog.tower("RW1")


@pytest.fixture
def t2(catalog):
    return catalog.tower("T2")


@pytest.fixture
def u2(catalog):
    return catalog.tower("U2")


@pytest.fixture
def rng():
    """Seeded random source so sampled tests are reproducible."""
    return random.Random(20240601)


@pytest.fixture
def small_sampling():
    """Sampling settings small enough for unit test runs."""
    return SamplingConfig(seed=7, samples=25, max_degree=3, coefficient_height=5)


@pytest.fixture
def small_eigen():
    return EigenConfig(section_degree_bound=6, constants_degree_bound=4, weight_ball_height=1)


@pytest.fixture
def default_config():
    return Config.defaults()


@pytest.fixture
def sample_config_file(temp_directory):
    """A config file with a few overridden settings."""
    path = Path(temp_directory) / "oreforge.yaml"
    path.write_text(
        "sampling:\n"
        "  seed: 11\n"
        "  samples: 30\n"
        "eigen:\n"
        "  section_degree_bound: 5\n"
        "logging:\n"
        "  level: info\n"
    )
    return str(path)
