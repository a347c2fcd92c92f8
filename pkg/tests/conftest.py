"""
Shared fixtures: standard grids, seeded inputs and an isolated calibration store
"""
import numpy as np
import pytest

from hormander.core.config import get_settings
from hormander.services.calibration_service import CalibrationStore
from hormander.services.experiment_service import random_test_function
from hormander.services.grid_service import make_grid, space_function


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def scalar_grid():
    """d=1, n=1, L=16, N=128"""
    return make_grid(1, 1, 16.0, 128)


@pytest.fixture
def bilinear_grid():
    """d=1, n=2, L=16, N=128"""
    return make_grid(1, 2, 16.0, 128)


@pytest.fixture
def maximal_grid():
    """d=1, n=1, L=32, N=256"""
    return make_grid(1, 1, 32.0, 256)


@pytest.fixture
def gaussian(scalar_grid):
    x = scalar_grid.space_mesh(1)[..., 0, 0]
    return space_function(scalar_grid, np.exp(-np.pi * x**2))


@pytest.fixture
def annular_inputs(bilinear_grid):
    """Input pairs for seeds 0..9 with spectra in 1/4 < |xi| < 2 (no zero frequency)"""

    def build(seed):
        return [
            random_test_function(bilinear_grid, seed, band_high=1, band_low=-2, stream=(i,))
            for i in range(bilinear_grid.n)
        ]

    return {seed: build(seed) for seed in range(10)}


@pytest.fixture
def calibration_store(tmp_path):
    return CalibrationStore(path=tmp_path / "baselines.json", drift=0.05)
