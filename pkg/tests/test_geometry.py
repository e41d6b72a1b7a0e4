# tests/test_geometry.py

import numpy as np
import pytest
from scipy import integrate, optimize
from scipy.spatial.distance import pdist

from lle_spectra.const import METRIC_PERIODIC
from lle_spectra.exceptions import InvalidArgument
from lle_spectra.geometry import (
    TWO_PI,
    Ellipse,
    PhantomSpec,
    PointCloud,
    load_phantom,
    periodic_distance,
    radon_ellipse,
    sample_circle,
    sample_flat_torus,
    sample_sphere,
    sample_torus,
    shepp_logan_dataset,
    torus_point,
)
from lle_spectra.neighbors import build_knn

UNIT_DISK = PhantomSpec((Ellipse((0.0, 0.0), (1.0, 1.0), 0.0, 1.0),), name="disk")


def _torus_residual(points: np.ndarray) -> np.ndarray:
    x, y, z = points.T
    return (1.0 - np.sqrt(z * z + y * y)) ** 2 + x * x - 0.25


# --- Point cloud ---


def test_point_cloud_rejects_bad_input():
    """Test that non-finite points and oversized dimensions are rejected."""
    with pytest.raises(InvalidArgument):
        PointCloud(np.array([[0.0, np.nan]]), intrinsic_dim=1)
    with pytest.raises(InvalidArgument):
        PointCloud(np.zeros((3, 2)), intrinsic_dim=3)
    with pytest.raises(InvalidArgument):
        PointCloud(np.zeros((3, 2)), intrinsic_dim=1, metric=METRIC_PERIODIC, period=1.0)


# --- Circle ---


def test_circle_four_points_form_square(circle4):
    """Test the 4-point grid lands on the axes."""
    expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    for point in expected:
        assert np.min(np.linalg.norm(circle4.points - point, axis=1)) < 1e-12


def test_circle_three_points_equilateral():
    """Test three grid points are pairwise sqrt(3) apart."""
    cloud = sample_circle(3)
    np.testing.assert_allclose(pdist(cloud.points), np.sqrt(3.0), rtol=1e-12)


def test_nonuniform_circle_on_unit_circle():
    """Test nonuniform samples stay on the circle and keep their angles."""
    cloud = sample_circle(30000, mode="nonuniform", seed=7)
    assert cloud.points.shape == (30000, 2)
    np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 1.0, rtol=1e-12)
    np.testing.assert_allclose(cloud.points[:, 0], np.cos(cloud.params), atol=1e-15)


def test_samplers_are_deterministic():
    """Test that equal seeds give identical clouds."""
    assert np.array_equal(
        sample_circle(500, "nonuniform", seed=3).points,
        sample_circle(500, "nonuniform", seed=3).points,
    )
    assert np.array_equal(
        sample_sphere(500, mode="perturbed", seed=3).points,
        sample_sphere(500, mode="perturbed", seed=3).points,
    )
    assert np.array_equal(sample_torus(500, seed=3).points, sample_torus(500, seed=3).points)


def test_circle_invalid_arguments():
    """Test circle argument validation."""
    with pytest.raises(InvalidArgument):
        sample_circle(2)
    with pytest.raises(InvalidArgument):
        sample_circle(10, mode="spiral")


# --- Sphere ---


def test_uniform_sphere_centered():
    """Test uniform sphere samples have near-zero mean."""
    cloud = sample_sphere(1000, radius=1.0, seed=1)
    assert np.all(np.abs(cloud.points.mean(axis=0)) < 0.1)


@pytest.mark.parametrize(
    "n, radius, mode",
    [(30000, 0.5, "perturbed"), (4, 2.0, "uniform"), (2000, 1.0, "fibonacci")],
)
def test_sphere_radius(n, radius, mode):
    """Test every sample lies on the requested sphere."""
    cloud = sample_sphere(n, radius=radius, mode=mode, seed=11)
    np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), radius, rtol=1e-12)
    assert cloud.intrinsic_dim == 2


def test_sphere_invalid_radius():
    """Test that a non-positive radius is rejected."""
    with pytest.raises(InvalidArgument):
        sample_sphere(10, radius=0.0)


# --- Torus ---


def test_torus_on_level_set():
    """Test torus samples satisfy the defining equation."""
    cloud = sample_torus(10000, seed=5)
    assert np.max(np.abs(_torus_residual(cloud.points))) < 1e-12
    np.testing.assert_allclose(
        torus_point(cloud.params[:, 0], cloud.params[:, 1]), cloud.points
    )


@pytest.mark.parametrize("location", [(0.0, 0.0, -1.5), (0.0, 0.0, -0.5)])
def test_torus_covers_test_points(location):
    """Test the sampler reaches both analytic test points."""
    cloud = sample_torus(10000, seed=5)
    assert cloud.distances_to(location).min() < 0.1


# --- Flat torus ---


def test_flat_torus_wraps():
    """Test periodic distances on the 4-point flat torus."""
    cloud = sample_flat_torus(4)
    np.testing.assert_allclose(cloud.distances_from(0, np.array([3])), [np.pi / 2])
    np.testing.assert_allclose(cloud.distances_from(0, np.array([2])), [np.pi])
    assert periodic_distance(0.1, TWO_PI - 0.1) == pytest.approx(0.2)


def test_flat_torus_gap():
    """Test the nearest-neighbor gap of the flat torus grid."""
    n = 2000
    radii = build_knn(sample_flat_torus(n), 1).radii
    np.testing.assert_allclose(radii, TWO_PI / n, rtol=1e-9)


# --- Tomography ---


def test_radon_unit_disk():
    """Test chord lengths through the unit disk."""
    assert float(radon_ellipse(UNIT_DISK, 0.3, 0.0)) == pytest.approx(2.0)
    assert float(radon_ellipse(UNIT_DISK, 1.1, 1.0)) == pytest.approx(0.0)
    assert float(radon_ellipse(UNIT_DISK, 0.0, 0.6)) == pytest.approx(1.6)


def test_radon_rejects_offsets_outside_disk():
    """Test that |s| > 1 is rejected."""
    with pytest.raises(InvalidArgument):
        radon_ellipse(UNIT_DISK, 0.0, 1.5)


def test_radon_matches_line_quadrature():
    """Test the analytic projection against quadrature along x = 0."""
    phantom = load_phantom()

    def inside(ellipse, y):
        c, s = np.cos(ellipse.angle), np.sin(ellipse.angle)
        dx, dy = -ellipse.center[0], y - ellipse.center[1]
        u = (c * dx + s * dy) / ellipse.axes[0]
        v = (-s * dx + c * dy) / ellipse.axes[1]
        return u * u + v * v - 1.0

    grid = np.linspace(-1.0, 1.0, 20001)
    breaks = [-1.0, 1.0]
    for ellipse in phantom.ellipses:
        values = inside(ellipse, grid)
        for i in np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]:
            breaks.append(
                optimize.brentq(lambda y: inside(ellipse, y), grid[i], grid[i + 1], xtol=1e-15)
            )
    breaks = np.unique(breaks)
    total = sum(
        integrate.quad(lambda y: float(phantom.density(0.0, y)), a, b)[0]
        for a, b in zip(breaks[:-1], breaks[1:])
    )
    assert float(radon_ellipse(phantom, 0.0, 0.0)) == pytest.approx(total, abs=1e-6)


def test_radon_nonnegative_and_vanishes_on_boundary():
    """Test projections are nonnegative for a nonnegative phantom."""
    theta = np.linspace(0.0, TWO_PI, 37)[:, None]
    s = np.linspace(-1.0, 1.0, 65)[None, :]
    values = radon_ellipse(UNIT_DISK, theta, s)
    assert np.all(values >= 0.0)
    np.testing.assert_allclose(values[:, [0, -1]], 0.0, atol=1e-12)


def test_phantom_outside_disk_rejected():
    """Test that ellipses leaving the unit disk are rejected."""
    with pytest.raises(InvalidArgument):
        PhantomSpec((Ellipse((0.5, 0.0), (0.6, 0.2), 0.0, 1.0),))


def test_unknown_phantom():
    """Test that a missing phantom table raises."""
    with pytest.raises(InvalidArgument):
        load_phantom("does_not_exist")


def test_shepp_logan_dataset_shape():
    """Test dataset shape and angle bookkeeping."""
    cloud = shepp_logan_dataset(64, 16)
    assert cloud.points.shape == (64, 16)
    assert cloud.intrinsic_dim == 1
    np.testing.assert_allclose(cloud.params[-1], TWO_PI)


def test_shepp_logan_periodic_in_angle():
    """Test projections at theta and theta + 2 pi coincide."""
    phantom = load_phantom()
    s = np.linspace(-1.0, 1.0, 128)
    np.testing.assert_allclose(
        radon_ellipse(phantom, 0.7, s), radon_ellipse(phantom, 0.7 + TWO_PI, s), atol=1e-12
    )


def test_shepp_logan_rows_distinct():
    """Test no two projections coincide."""
    cloud = shepp_logan_dataset(256, 128)
    assert pdist(cloud.points).min() > 1e-6
