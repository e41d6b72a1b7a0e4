# tests/test_theory.py

import math

import numpy as np
import pytest

from lle_spectra.const import (
    REGIME_BALANCED,
    REGIME_DENSITY,
    REGIME_FOURTH_ORDER,
    REGIME_TRANSITIONAL,
    THEORY_BIAS,
    THEORY_CIRCLE_FOURTH,
    THEORY_CIRCLE_LB,
    THEORY_SPHERE2,
    THEORY_TORUS_POINTWISE,
    TORUS_INNER_BOTTOM,
    TORUS_OUTER_BOTTOM,
)
from lle_spectra.exceptions import InvalidArgument
from lle_spectra.theory import (
    bias_coeff_case0,
    circle_fourth_order_spectrum,
    circle_lb_spectrum,
    coefficient_table,
    covariance_leading_eigenvalue,
    knn_radius,
    p_sphere_rho8_coeffs,
    prediction,
    regularization_regime,
    sphere2_spectrum,
    sphere_area,
    sphere_bias_coeff,
    sphere_spectrum,
    suggest_bandwidth,
    torus_pointwise_coeffs,
)

from tests.const import CIRCLE_FOURTH_5, CIRCLE_LB_9, SPHERE2_9, SPHERE_DENSITY

# eps small enough that the eps^(rho-2) damping has reached its limit
TINY_EPS = 1e-8


def test_circle_tables():
    """Test the S^1 spectra."""
    np.testing.assert_array_equal(circle_lb_spectrum(9), CIRCLE_LB_9)
    np.testing.assert_array_equal(circle_fourth_order_spectrum(5), CIRCLE_FOURTH_5)
    np.testing.assert_array_equal(circle_fourth_order_spectrum(7)[5:], [72.0, 72.0])
    with pytest.raises(InvalidArgument):
        circle_lb_spectrum(0)


def test_sphere_tables():
    """Test S^2 values, radius scaling and agreement with the general sphere."""
    np.testing.assert_array_equal(sphere2_spectrum(9), SPHERE2_9)
    np.testing.assert_allclose(sphere2_spectrum(9, radius=0.5), 4.0 * np.array(SPHERE2_9))
    np.testing.assert_array_equal(sphere_spectrum(2, 9), CIRCLE_LB_9)
    np.testing.assert_array_equal(sphere_spectrum(4, 6), [0, 3, 3, 3, 3, 8])
    assert sphere2_spectrum(16)[-1] == 12.0
    with pytest.raises(InvalidArgument):
        sphere_spectrum(1, 3)
    with pytest.raises(InvalidArgument):
        sphere2_spectrum(3, radius=0.0)


@pytest.mark.parametrize(
    "p, expected",
    [(2, (-1 / 280, -1 / 840, -1 / 280)), (3, (-1 / 192, -1 / 576, -1 / 288))],
)
def test_rho_eight_coefficients(p, expected):
    """Test the fourth-order expansion coefficients on low-dimensional spheres."""
    coeffs = p_sphere_rho8_coeffs(p)
    assert (coeffs.a4, coeffs.a22, coeffs.a2) == pytest.approx(expected)


def test_rho_eight_invalid():
    """Test p < 2 is rejected."""
    with pytest.raises(InvalidArgument):
        p_sphere_rho8_coeffs(1)


@pytest.mark.parametrize(
    "rho, regime",
    [
        (-5.0, REGIME_DENSITY),
        (1.9, REGIME_DENSITY),
        (2.0, REGIME_TRANSITIONAL),
        (3.0, REGIME_BALANCED),
        (3.5, REGIME_TRANSITIONAL),
        (4.0, REGIME_TRANSITIONAL),
        (8.0, REGIME_FOURTH_ORDER),
        (math.inf, REGIME_FOURTH_ORDER),
    ],
)
def test_regularization_regime(rho, regime):
    """Test the regime boundaries."""
    assert regularization_regime(rho) == regime


def test_torus_tables():
    """Test the pointwise coefficients at the two torus test points."""
    for point in (TORUS_OUTER_BOTTOM, TORUS_INNER_BOTTOM):
        assert torus_pointwise_coeffs(point) == {"xx": 1 / 8, "yy": 1 / 8}
    outer = torus_pointwise_coeffs(TORUS_OUTER_BOTTOM, REGIME_FOURTH_ORDER)
    assert outer == {"xx": pytest.approx(-1 / 24), "yy": pytest.approx(1 / 8)}
    inner = torus_pointwise_coeffs(TORUS_INNER_BOTTOM, REGIME_FOURTH_ORDER)
    assert inner == {"xx": 1 / 8, "yy": 1 / 8}
    with pytest.raises(InvalidArgument):
        torus_pointwise_coeffs("top")
    with pytest.raises(InvalidArgument):
        torus_pointwise_coeffs(TORUS_OUTER_BOTTOM, REGIME_DENSITY)


def test_sphere_area():
    """Test |S^0|, |S^1| and |S^2|."""
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    with pytest.raises(InvalidArgument):
        sphere_area(0)


def test_bias_limits():
    """Test the density-weighted and balanced limits of the bias coefficient."""
    P, grad, lap = 0.5, 0.3, -1.0
    density = bias_coeff_case0(0.0, TINY_EPS, 1, P, grad, lap)
    assert density == pytest.approx((0.5 * lap + grad / P) / 3.0)
    balanced = bias_coeff_case0(3.0, TINY_EPS, 1, P, grad, lap)
    assert balanced == pytest.approx(lap / 6.0)
    with pytest.raises(InvalidArgument):
        bias_coeff_case0(3.0, TINY_EPS, 1, 0.0, grad, lap)


def test_sphere_bias():
    """Test the sphere bias coefficient across regimes."""
    assert sphere_bias_coeff(8.0, 0.1, 2, SPHERE_DENSITY, 0.0, -2.0) == 0.0
    assert sphere_bias_coeff(3.0, TINY_EPS, 2, SPHERE_DENSITY, 0.0, -2.0) == pytest.approx(-0.25)
    with pytest.raises(InvalidArgument):
        sphere_bias_coeff(2.5, 0.1, 2, SPHERE_DENSITY, 0.0, -2.0)


def test_knn_radius():
    """Test the K-th neighbor distance on the unit sphere."""
    assert knn_radius(100, 10000, SPHERE_DENSITY, 2) == pytest.approx(0.2)
    with pytest.raises(InvalidArgument):
        knn_radius(10, 10, 1.0, 1)


def test_covariance_eigenvalue():
    """Test the tangent covariance eigenvalue on S^2."""
    expected = 2 * math.pi * SPHERE_DENSITY * 0.2**4 / 8
    assert covariance_leading_eigenvalue(2, SPHERE_DENSITY, 0.2) == pytest.approx(expected)


def test_bandwidth_reexport():
    """Test the bandwidth helper is reachable from the theory module."""
    assert suggest_bandwidth(1000, 1) == pytest.approx((math.log(1000) / 1000) ** 0.2)


@pytest.mark.parametrize(
    "name, values",
    [
        (THEORY_CIRCLE_LB, CIRCLE_LB_9[:5]),
        (THEORY_CIRCLE_FOURTH, CIRCLE_FOURTH_5),
        (THEORY_SPHERE2, SPHERE2_9[:5]),
    ],
)
def test_prediction(name, values):
    """Test the named tables."""
    result = prediction(name, 5)
    assert result.label == name
    np.testing.assert_array_equal(result.values, values)
    assert result.source


def test_prediction_unknown():
    """Test an unknown table name."""
    with pytest.raises(InvalidArgument):
        prediction("torus", 3)


def test_coefficient_table_bias_matches_oracle():
    """Test the bias table is the case-0 coefficient and ignores extra arguments."""
    arguments = {
        "rho": 3.0,
        "eps": 0.1,
        "d": 1,
        "density": 0.2,
        "grad": 0.05,
        "laplacian": 1.0,
        "point": None,
    }
    table = coefficient_table(THEORY_BIAS, arguments)
    assert table == {"coefficient": bias_coeff_case0(3.0, 0.1, 1, 0.2, 0.05, 1.0)}


def test_coefficient_table_torus_regime():
    """Test the torus table follows the requested regime."""
    table = coefficient_table(
        THEORY_TORUS_POINTWISE,
        {"point": TORUS_INNER_BOTTOM, "regime": REGIME_FOURTH_ORDER},
    )
    assert table == {"xx": 0.125, "yy": 0.125}


def test_coefficient_table_errors():
    """Test unknown tables and missing arguments."""
    with pytest.raises(InvalidArgument):
        coefficient_table("torus", {})
    with pytest.raises(InvalidArgument, match="--point"):
        coefficient_table(THEORY_TORUS_POINTWISE, {"regime": REGIME_BALANCED})
