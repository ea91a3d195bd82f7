"""
Pytest configuration and fixtures for cone-kernel tests.
"""

import os
import sys
from pathlib import Path

import pytest
import structlog

# Add project root directory to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from cone_kernel.models import ConeGeometry  # noqa: E402
from cone_kernel.settings import Settings  # noqa: E402


@pytest.fixture
def plane() -> ConeGeometry:
    """rho = 1: the euclidean plane."""
    return ConeGeometry(rho=1.0)


@pytest.fixture
def half_cone() -> ConeGeometry:
    """rho = 1/2: two images."""
    return ConeGeometry(rho=0.5)


@pytest.fixture
def generic_cone() -> ConeGeometry:
    """A cone with irrational-looking radius and no images."""
    return ConeGeometry(rho=0.7)


@pytest.fixture
def settings() -> Settings:
    """Shipped defaults, independent of the caller's environment."""
    return Settings()


@pytest.fixture(autouse=True)
def _isolate_env(monkeypatch):
    """Keep CONEKERNEL_* variables from the caller's shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("CONEKERNEL_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture(autouse=True)
def _reset_logging():
    """The CLI reconfigures structlog globally; restore the defaults after every test."""
    yield
    structlog.reset_defaults()
