# tests/test_coordinator.py

import numpy as np
import pytest

from lle_spectra import LLECoordinator, __version__
from lle_spectra.const import LIBRARY_VERSION, RULE_EPS, RULE_KNN
from lle_spectra.exceptions import InvalidArgument
from lle_spectra.neighbors import eps_for_neighbor_count

from tests.const import CIRCLE_LB_9, SPECTRUM_REL_TOL, TARGET_NEIGHBORS


def test_version():
    """Test the package version comes from the manifest."""
    assert __version__ == LIBRARY_VERSION


@pytest.mark.parametrize(
    "kwargs", [{}, {"eps": 0.1, "knn": 5}, {"knn": 5, "target_neighbors": 10}]
)
def test_exactly_one_rule(circle_grid, kwargs):
    """Test the neighborhood rule must be given exactly once."""
    with pytest.raises(InvalidArgument):
        LLECoordinator(circle_grid, 3.0, **kwargs)


def test_target_neighbors_resolve_to_eps(circle_grid):
    """Test a neighbor-count target becomes an eps radius."""
    coordinator = LLECoordinator(circle_grid, 3.0, target_neighbors=TARGET_NEIGHBORS)
    assert coordinator.rule == RULE_EPS
    assert coordinator.eps == eps_for_neighbor_count(circle_grid, TARGET_NEIGHBORS)
    assert coordinator.d == 1
    assert coordinator.config.n == circle_grid.n


def test_stages_are_cached(circle_grid, grid_eps):
    """Test each stage is built once."""
    coordinator = LLECoordinator(circle_grid, 3.0, eps=grid_eps, threads=2)
    assert coordinator.neighbors is coordinator.neighbors
    assert coordinator.W is coordinator.W
    assert coordinator.embedding_matrix is coordinator.embedding_matrix
    assert coordinator.generator is coordinator.generator


def test_eps_pipeline(circle_grid, grid_eps):
    """Test the spectrum, embedding and kernel through the coordinator."""
    coordinator = LLECoordinator(circle_grid, 3.0, eps=grid_eps)
    assert coordinator.generator.kind == "L"
    result = coordinator.spectrum(5)
    np.testing.assert_allclose(result.eigenvalues[1:], CIRCLE_LB_9[1:5], rtol=SPECTRUM_REL_TOL)
    assert coordinator.embedding_spectrum(2).eigenvalues[0] < 1e-8
    assert coordinator.embed(2).shape == (circle_grid.n, 2)
    assert coordinator.kernel(4).center == 4
    assert coordinator.pointwise(4, np.ones(circle_grid.n)) == pytest.approx(0.0, abs=1e-12)
    assert coordinator.fourth_order_generator.kind == "L4"


def test_knn_pipeline(circle_grid):
    """Test the KNN rule uses the normalized generator."""
    coordinator = LLECoordinator(circle_grid, 3.0, knn=TARGET_NEIGHBORS)
    assert coordinator.rule == RULE_KNN
    assert coordinator.eps is None
    assert coordinator.generator.kind == "L_knn"
    with pytest.raises(InvalidArgument):
        coordinator.fourth_order_generator


def test_embed_needs_positive_dimension(circle_grid, grid_eps):
    """Test ell < 1 is rejected."""
    with pytest.raises(InvalidArgument):
        LLECoordinator(circle_grid, 3.0, eps=grid_eps).embed(0)
