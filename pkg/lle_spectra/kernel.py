# File: lle_spectra/kernel.py
"""Empirical LLE kernel, local covariance spectra and pointwise operator values."""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Callable

import numpy as np

from .barycentric import barycentric_weights, correction_vector, local_data, local_spectrum
from .const import BIAS_CENTERS, RULE_EPS
from .exceptions import EmptyNeighborhood, InvalidArgument
from .geometry import PointCloud
from .lle_matrix import LLEConfig
from .neighbors import NeighborList, build_eps_neighbors

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelSlice:
    """K(x_k, .) restricted to the neighbors of x_k."""

    center: int
    neighbors: np.ndarray
    distances: np.ndarray
    raw: np.ndarray
    normalized: np.ndarray
    T: np.ndarray
    eps: float
    rho: float


@dataclass(frozen=True)
class CovarianceSpectrum:
    center: int
    eps: float
    eigenvalues: np.ndarray


def kernel_slice(
    cloud: PointCloud, k: int, nbrs: NeighborList, config: LLEConfig
) -> KernelSlice:
    """Raw values 1 - T^T(z_j - z_k) and their normalization by the sum."""
    local = local_data(cloud, k, nbrs)
    radius = nbrs.radius(k)
    T = correction_vector(local, config.regularizer(radius))
    raw = 1.0 - local.G.T @ T
    return KernelSlice(
        center=int(k),
        neighbors=local.neighbors,
        distances=nbrs.distances_of(k),
        raw=raw,
        normalized=raw / raw.sum(),
        T=T,
        eps=radius,
        rho=config.rho,
    )


def covariance_spectrum(cloud: PointCloud, k: int, eps: float) -> CovarianceSpectrum:
    """Eigenvalues of (1/n) G G^T over the eps-ball of x_k, descending."""
    nbrs = build_eps_neighbors(cloud, eps, centers=[k])
    count = nbrs.count(k)
    if count == 0:
        raise EmptyNeighborhood(k)
    if count < cloud.intrinsic_dim + 1:
        raise InvalidArgument(
            f"point {k} has {count} neighbors, needs {cloud.intrinsic_dim + 1}"
        )
    spectrum = local_spectrum(local_data(cloud, k, nbrs))
    return CovarianceSpectrum(int(k), float(eps), spectrum.eigenvalues / cloud.n)


def _values(cloud: PointCloud, f) -> np.ndarray:
    if callable(f):
        f = f(cloud.points)
    f = np.asarray(f, dtype=float)
    if f.shape != (cloud.n,):
        raise InvalidArgument("f must give one value per point")
    return f


def pointwise_apply(
    cloud: PointCloud,
    k: int,
    nbrs: NeighborList,
    config: LLEConfig,
    f: np.ndarray | Callable[[np.ndarray], np.ndarray],
) -> float:
    """sum_j w_k(j) f(x_{k,j}) - f(x_k)."""
    values = _values(cloud, f)
    local = local_data(cloud, k, nbrs)
    weights = barycentric_weights(local, config.regularizer(nbrs.radius(k)))
    return float(weights.w @ (values[local.neighbors] - values[k]))


def averaged_pointwise_bias(
    cloud: PointCloud,
    location,
    config: LLEConfig,
    f: np.ndarray | Callable[[np.ndarray], np.ndarray],
    n_centers: int = BIAS_CENTERS,
) -> float:
    """Mean of (sum w f - f)/eps^2 over the samples nearest `location`."""
    if config.rule != RULE_EPS:
        raise InvalidArgument("pointwise bias is defined for the eps rule")
    values = _values(cloud, f)
    centers = np.argsort(cloud.distances_to(location), kind="stable")[:n_centers]
    nbrs = build_eps_neighbors(cloud, config.eps, centers=centers)
    applied = [pointwise_apply(cloud, k, nbrs, config, values) for k in centers]
    _LOGGER.debug(
        "Pointwise bias at %s: spread %.3g over %d centers",
        location,
        float(np.std(applied)) / config.eps**2,
        len(applied),
    )
    return float(np.mean(applied)) / config.eps**2
