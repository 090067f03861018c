import math

from click.testing import CliRunner
import numpy as np
import pytest

from biflow.core.config import SolverConfig
from biflow.services.initial_data import band_limited_noise, gaussian_bump
from biflow.spectral.grid import make_grid


@pytest.fixture
def grid_1d():
    """Small 1D periodic grid on [0, 2 pi)."""
    return make_grid(1, 64, 2 * math.pi)


@pytest.fixture
def grid_2d():
    """Small 2D periodic grid on [0, 2 pi)^2."""
    return make_grid(2, 32, 2 * math.pi)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def fast_solver():
    """Solver settings small enough for unit tests."""
    return SolverConfig(time_nodes=16, max_picard_iters=20, stride=4, etd_steps=1000, etd_record=16)


@pytest.fixture
def small_noise(grid_1d, rng):
    """Band-limited noise with sup-norm 0.01."""
    return band_limited_noise(grid_1d, rng, amplitude=0.01)


@pytest.fixture
def bump(grid_1d):
    """Moderate Gaussian bump."""
    return gaussian_bump(grid_1d, amplitude=0.5, width=1.0)


@pytest.fixture
def runner():
    """Click test runner."""
    return CliRunner()
