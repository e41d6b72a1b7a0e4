# File: lle_spectra/baseline_dm.py
"""Diffusion-map baseline with alpha-normalization."""
from __future__ import annotations

from dataclasses import asdict, dataclass
import logging
import math

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
import voluptuous as vol

from .const import DENSE_FALLBACK_MAX_N, DM_BANDWIDTH_NEIGHBOR, DM_TRUNCATION, V0_SEED
from .exceptions import InvalidArgument, SolverNotConverged
from .geometry import PointCloud, make_rng
from .neighbors import build_eps_neighbors, build_knn
from .spectral import fix_signs

_LOGGER = logging.getLogger(__name__)

DM_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional("bandwidth"): vol.Any(
            None, vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
        ),
        vol.Required("alpha"): vol.All(vol.Coerce(float), vol.Range(min=0, max=1)),
        vol.Required("ell"): vol.All(vol.Coerce(int), vol.Range(min=1)),
    }
)


@dataclass(frozen=True)
class DMConfig:
    """Gaussian bandwidth sigma (None: data-driven), alpha and target dimension."""

    bandwidth: float | None = None
    alpha: float = 1.0
    ell: int = 2

    def __post_init__(self) -> None:
        try:
            DM_CONFIG_SCHEMA(asdict(self))
        except vol.Invalid as err:
            raise InvalidArgument(f"Invalid diffusion map configuration: {err}") from err


def default_bandwidth(cloud: PointCloud) -> float:
    """Median distance to the 10th nearest neighbor."""
    K = min(DM_BANDWIDTH_NEIGHBOR, cloud.n - 1)
    return float(np.median(build_knn(cloud, K).radii))


def affinity_matrix(cloud: PointCloud, sigma: float) -> scipy.sparse.csr_matrix:
    """exp(-|z_i - z_j|^2 / sigma^2), dropped where it falls below the truncation."""
    cutoff = sigma * math.sqrt(-math.log(DM_TRUNCATION))
    nbrs = build_eps_neighbors(cloud, cutoff)
    rows = np.repeat(np.arange(cloud.n), nbrs.counts())
    values = np.exp(-((nbrs.distances / sigma) ** 2))
    keep = values >= DM_TRUNCATION
    K = scipy.sparse.csr_matrix(
        (values[keep], (rows[keep], nbrs.indices[keep])), shape=(cloud.n, cloud.n)
    )
    K = K + scipy.sparse.identity(cloud.n, format="csr")
    return ((K + K.T) * 0.5).tocsr()


def _normalized(cloud: PointCloud, config: DMConfig):
    sigma = config.bandwidth or default_bandwidth(cloud)
    K = affinity_matrix(cloud, sigma)
    q = np.asarray(K.sum(axis=1)).ravel()
    scale = scipy.sparse.diags(q ** (-config.alpha))
    K_alpha = (scale @ K @ scale).tocsr()
    degree = np.asarray(K_alpha.sum(axis=1)).ravel()
    _LOGGER.debug("DM sigma=%g alpha=%g nnz=%d", sigma, config.alpha, K.nnz)
    return K_alpha, degree


def markov_matrix(cloud: PointCloud, config: DMConfig) -> scipy.sparse.csr_matrix:
    """Row-normalized A = D^{-1} K_alpha."""
    K_alpha, degree = _normalized(cloud, config)
    return (scipy.sparse.diags(1.0 / degree) @ K_alpha).tocsr()


def diffusion_spectrum(
    cloud: PointCloud, config: DMConfig, m: int
) -> tuple[np.ndarray, np.ndarray]:
    """Top m eigenpairs of A, descending, via its symmetric conjugate."""
    if not 1 <= m < cloud.n:
        raise InvalidArgument(f"m must be in [1, {cloud.n - 1}], got {m}")
    K_alpha, degree = _normalized(cloud, config)
    root = scipy.sparse.diags(1.0 / np.sqrt(degree))
    S = (root @ K_alpha @ root).tocsr()
    S = ((S + S.T) * 0.5).tocsr()
    n = cloud.n
    if n <= DENSE_FALLBACK_MAX_N:
        values, vectors = scipy.linalg.eigh(S.toarray(), subset_by_index=[n - m, n - 1])
    else:
        try:
            values, vectors = scipy.sparse.linalg.eigsh(
                S, k=m, which="LA", v0=make_rng(V0_SEED).standard_normal(n)
            )
        except scipy.sparse.linalg.ArpackNoConvergence as err:
            raise SolverNotConverged(
                "diffusion map eigensolver did not converge",
                np.asarray(err.eigenvalues),
                err.eigenvectors,
                np.full(len(err.eigenvalues), np.nan),
            ) from err
    order = np.argsort(values)[::-1]
    values = values[order]
    phi = vectors[:, order] / np.sqrt(degree)[:, None]
    phi = fix_signs(phi / np.linalg.norm(phi, axis=0))
    return values, phi


def dm_embed(cloud: PointCloud, config: DMConfig) -> np.ndarray:
    """Diffusion coordinates phi_2..phi_{ell+1}, unscaled and unit-norm."""
    if cloud.n < config.ell + 2:
        raise InvalidArgument(f"need at least {config.ell + 2} points")
    _, phi = diffusion_spectrum(cloud, config, config.ell + 1)
    return phi[:, 1:]
