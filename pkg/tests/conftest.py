# tests/conftest.py

import logging

import numpy as np
import pytest

from lle_spectra.const import DOMAIN
from lle_spectra.geometry import PointCloud, sample_circle, sample_flat_torus
from lle_spectra.lle_matrix import LLEConfig, assemble_W
from lle_spectra.neighbors import build_eps_neighbors, eps_for_neighbor_count
from lle_spectra.outputs import write_cloud

from tests.const import GRID_N, SMALL_GRID_N, TARGET_NEIGHBORS


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Drop handlers the CLI attached to the package logger."""
    yield
    logger = logging.getLogger(DOMAIN)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def circle4() -> PointCloud:
    """The 4-point uniform circle (a square)."""
    return sample_circle(4)


@pytest.fixture
def circle_grid() -> PointCloud:
    """Uniform circle grid used for spectral checks."""
    return sample_circle(GRID_N)


@pytest.fixture
def small_grid() -> PointCloud:
    """Smaller uniform circle grid for CLI runs."""
    return sample_circle(SMALL_GRID_N)


@pytest.fixture
def flat_torus() -> PointCloud:
    """Grid on the flat 1-torus."""
    return sample_flat_torus(200)


@pytest.fixture
def grid_eps(circle_grid: PointCloud) -> float:
    """Radius giving every grid point the target neighbor count."""
    return eps_for_neighbor_count(circle_grid, TARGET_NEIGHBORS)


@pytest.fixture
def grid_W(circle_grid: PointCloud, grid_eps: float):
    """LLE matrix of the circle grid at rho=3."""
    nbrs = build_eps_neighbors(circle_grid, grid_eps)
    config = LLEConfig.for_neighbors(nbrs, rho=3.0, d=1)
    return assemble_W(circle_grid, nbrs, config, threads=2)


@pytest.fixture
def random_local():
    """Factory for random local data matrices."""

    def _make(p: int, N: int, seed: int = 0) -> np.ndarray:
        return np.random.default_rng(seed).standard_normal((p, N))

    return _make


@pytest.fixture
def circle_csv(tmp_path, small_grid: PointCloud):
    """Small circle grid written the way `generate` writes it."""
    path = tmp_path / "circle.csv"
    write_cloud(small_grid, path)
    return path
