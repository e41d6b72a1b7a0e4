# File: lle_spectra/theory.py
"""Closed-form predictions used as references for LLE runs."""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Any, Mapping, NamedTuple

import numpy as np

from .const import (
    REGIME_BALANCED,
    REGIME_DENSITY,
    REGIME_FOURTH_ORDER,
    REGIME_TRANSITIONAL,
    THEORY_BIAS,
    THEORY_CIRCLE_FOURTH,
    THEORY_CIRCLE_LB,
    THEORY_KNN_RADIUS,
    THEORY_SPHERE2,
    THEORY_SPHERE_RHO8,
    THEORY_TORUS_POINTWISE,
    TORUS_INNER_BOTTOM,
    TORUS_OUTER_BOTTOM,
)
from .exceptions import InvalidArgument
from .neighbors import suggest_bandwidth

__all__ = [
    "TheoryPrediction",
    "bias_coeff_case0",
    "circle_fourth_order_spectrum",
    "circle_lb_spectrum",
    "coefficient_table",
    "covariance_leading_eigenvalue",
    "knn_radius",
    "p_sphere_rho8_coeffs",
    "prediction",
    "regularization_regime",
    "sphere2_spectrum",
    "sphere_area",
    "sphere_bias_coeff",
    "sphere_spectrum",
    "suggest_bandwidth",
    "torus_pointwise_coeffs",
]


@dataclass(frozen=True)
class TheoryPrediction:
    label: str
    values: np.ndarray
    source: str


class RhoEightCoefficients(NamedTuple):
    """eps^4 coefficients of sum d^4_i f, sum_{i!=j} d^2_i d^2_j f and sum d^2_i f."""

    a4: float
    a22: float
    a2: float


def _check_m(m: int) -> None:
    if int(m) != m or m < 1:
        raise InvalidArgument(f"m must be a positive integer, got {m}")


def circle_lb_spectrum(m: int) -> np.ndarray:
    """ceil((k-1)/2)^2 for k = 1..m: 0, 1, 1, 4, 4, ..."""
    _check_m(m)
    k = np.arange(1, m + 1)
    return (np.ceil((k - 1) / 2.0) ** 2).astype(float)


def circle_fourth_order_spectrum(m: int) -> np.ndarray:
    """L_k^2 - L_k: 0, 0, 0, 12, 12, 72, 72, ..."""
    lb = circle_lb_spectrum(m)
    return lb * lb - lb


def sphere_spectrum(p: int, m: int, radius: float = 1.0) -> np.ndarray:
    """Laplace-Beltrami eigenvalues of S^{p-1} of the given radius, with multiplicity."""
    _check_m(m)
    if p < 2:
        raise InvalidArgument(f"ambient dimension must be >= 2, got {p}")
    if not radius > 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    values: list[float] = []
    k = 0
    while len(values) < m:
        lower = math.comb(p + k - 3, p - 1) if k >= 2 else 0
        multiplicity = math.comb(p + k - 1, p - 1) - lower
        values.extend([k * (k + p - 2) / radius**2] * multiplicity)
        k += 1
    return np.asarray(values[:m], dtype=float)


def sphere2_spectrum(m: int, radius: float = 1.0) -> np.ndarray:
    """i(i+1)/r^2 repeated 2i+1 times."""
    return sphere_spectrum(3, m, radius)


def p_sphere_rho8_coeffs(p: int) -> RhoEightCoefficients:
    """Fourth-order expansion coefficients of LLE on S^{p-1} at rho=8."""
    if p < 2:
        raise InvalidArgument(f"p must be >= 2, got {p}")
    denom = (p + 3) * (p + 5)
    return RhoEightCoefficients(
        a4=-(p - 1) / (8 * denom),
        a22=-(p - 1) / (24 * denom),
        a2=-(p + 1) / (24 * denom),
    )


def regularization_regime(rho: float) -> str:
    """Which second-order operator the regularization order leads to."""
    if rho < 2:
        return REGIME_DENSITY
    if rho > 4:
        return REGIME_FOURTH_ORDER
    return REGIME_BALANCED if rho == 3 else REGIME_TRANSITIONAL


_TORUS_TABLES = {
    REGIME_BALANCED: {
        TORUS_OUTER_BOTTOM: {"xx": 1 / 8, "yy": 1 / 8},
        TORUS_INNER_BOTTOM: {"xx": 1 / 8, "yy": 1 / 8},
    },
    # the mean curvature vector vanishes at the inner point, so only the outer
    # point is bent away from the Laplacian
    REGIME_FOURTH_ORDER: {
        TORUS_OUTER_BOTTOM: {"xx": -1 / 24, "yy": 1 / 8},
        TORUS_INNER_BOTTOM: {"xx": 1 / 8, "yy": 1 / 8},
    },
}


def torus_pointwise_coeffs(point: str, regime: str = REGIME_BALANCED) -> dict[str, float]:
    """eps^2 coefficients of the second tangent derivatives at a torus test point.

    ``xx`` runs along the tube (ambient x) and ``yy`` along the ring.
    """
    if regime not in _TORUS_TABLES:
        raise InvalidArgument(f"no torus table for regime {regime!r}")
    table = _TORUS_TABLES[regime]
    if point not in table:
        raise InvalidArgument(f"unknown torus point {point!r}")
    return dict(table[point])


def sphere_area(d: int) -> float:
    """|S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)."""
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def bias_coeff_case0(
    rho: float,
    eps: float,
    d: int,
    P: float,
    gradP_dot_gradf: float,
    laplacian_f: float,
) -> float:
    """eps^2 coefficient of Qf - f when the local covariance has rank d."""
    if not P > 0 or not eps > 0:
        raise InvalidArgument("P and eps must be positive")
    damping = d * (d + 2) * eps ** (rho - 2) / sphere_area(d)
    drift = gradP_dot_gradf / P - gradP_dot_gradf / (P + damping)
    return (0.5 * laplacian_f + drift) / (d + 2)


def sphere_bias_coeff(
    rho: float,
    eps: float,
    d: int,
    P: float,
    gradP_dot_gradf: float,
    laplacian_f: float,
) -> float:
    """eps^2 coefficient on a round sphere.

    All principal curvatures agree, so for rho > 4 the second-order terms
    cancel and the leading term is fourth order.
    """
    regime = regularization_regime(rho)
    if regime == REGIME_FOURTH_ORDER:
        return 0.0
    if regime == REGIME_TRANSITIONAL:
        raise InvalidArgument(f"rho={rho} needs the full curvature expansion")
    return bias_coeff_case0(rho, eps, d, P, gradP_dot_gradf, laplacian_f)


def knn_radius(K: int, n: int, P: float, d: int) -> float:
    """Leading term of the K-th neighbor distance at density P."""
    if not 1 <= K < n or not P > 0:
        raise InvalidArgument("need 1 <= K < n and P > 0")
    return (d / sphere_area(d)) ** (1.0 / d) * (K / (n * P)) ** (1.0 / d)


def covariance_leading_eigenvalue(d: int, P: float, eps: float) -> float:
    """Tangent eigenvalue |S^{d-1}| P eps^{d+2} / (d(d+2)) of the local covariance."""
    return sphere_area(d) * P * eps ** (d + 2) / (d * (d + 2))


_PREDICTIONS = {
    THEORY_CIRCLE_LB: ("Laplace-Beltrami on S^1", circle_lb_spectrum),
    THEORY_CIRCLE_FOURTH: (
        "fourth-order operator on S^1",
        circle_fourth_order_spectrum,
    ),
}


def prediction(name: str, m: int, radius: float = 1.0) -> TheoryPrediction:
    """Named spectrum table for the CLI."""
    if name == THEORY_SPHERE2:
        return TheoryPrediction(
            name, sphere2_spectrum(m, radius), f"Laplace-Beltrami on S^2, r={radius}"
        )
    if name not in _PREDICTIONS:
        raise InvalidArgument(f"unknown theory {name!r}")
    source, table = _PREDICTIONS[name]
    return TheoryPrediction(name, table(m), source)


_COEFFICIENT_TABLES = {
    THEORY_SPHERE_RHO8: (
        ("p",),
        lambda a: p_sphere_rho8_coeffs(a["p"])._asdict(),
    ),
    THEORY_TORUS_POINTWISE: (
        ("point", "regime"),
        lambda a: torus_pointwise_coeffs(a["point"], a["regime"]),
    ),
    THEORY_KNN_RADIUS: (
        ("k", "n", "density", "d"),
        lambda a: {"radius": knn_radius(a["k"], a["n"], a["density"], a["d"])},
    ),
    THEORY_BIAS: (
        ("rho", "eps", "d", "density", "grad", "laplacian"),
        lambda a: {
            "coefficient": bias_coeff_case0(
                a["rho"], a["eps"], a["d"], a["density"], a["grad"], a["laplacian"]
            )
        },
    ),
}


def coefficient_table(name: str, arguments: Mapping[str, Any]) -> dict[str, float]:
    """Named coefficient table for the CLI, built from the oracle's arguments.

    Arguments the table does not use are ignored; missing ones are reported
    together.
    """
    if name not in _COEFFICIENT_TABLES:
        raise InvalidArgument(f"unknown coefficient table {name!r}")
    needed, build = _COEFFICIENT_TABLES[name]
    missing = [key for key in needed if arguments.get(key) is None]
    if missing:
        raise InvalidArgument(
            f"{name} needs " + ", ".join(f"--{key}" for key in missing)
        )
    return {key: float(value) for key, value in build(arguments).items()}
