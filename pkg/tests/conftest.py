"""Test configuration and fixtures."""

import logging
import os

import pytest

# No progress bars in test output
os.environ.setdefault("SHOW_PROGRESS", "false")

from typer.testing import CliRunner

from apps.core.config import get_settings
from apps.geometry.base import build_quintic_base
from tests.fixtures.complexes import single_triangle, sphere_complex, torus_complex


@pytest.fixture(scope="session")
def test_settings():
    """Test settings fixture."""
    settings = get_settings()
    settings.show_progress = False
    settings.emit_matrices_dir = None
    return settings


@pytest.fixture(scope="session")
def quintic_base(test_settings):
    """Quintic base shared by the whole session; refinements are cached on it."""
    return build_quintic_base()


@pytest.fixture(scope="session")
def dual_complex(quintic_base):
    return quintic_base.refinement("dual")


@pytest.fixture
def torus():
    """Seven-vertex torus with constant coefficients."""
    return torus_complex()


@pytest.fixture
def sphere3():
    """Boundary of the 4-simplex."""
    return sphere_complex(3)


@pytest.fixture
def triangle():
    return single_triangle()


@pytest.fixture
def cli_runner():
    """CLI runner; the root logger is reset afterwards since the CLI rebinds it."""
    runner = CliRunner()
    yield runner
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
