# File: lle_spectra/barycentric.py
"""Local data matrices, the regularized pseudo-inverse and barycentric weights."""
from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg

from .const import DENOMINATOR_TOL
from .exceptions import DegenerateLocalGeometry, IllConditionedPoint, InvalidArgument
from .geometry import PointCloud
from .neighbors import NeighborList

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalData:
    """Centered neighbor matrix G (p x N) of one point."""

    index: int | None
    neighbors: np.ndarray
    G: np.ndarray

    @property
    def N(self) -> int:
        return self.G.shape[1]

    @property
    def p(self) -> int:
        return self.G.shape[0]

    @classmethod
    def from_points(cls, center, neighbors) -> LocalData:
        """Build local data from explicit coordinates (rows of `neighbors`)."""
        center = np.atleast_1d(np.asarray(center, dtype=float))
        pts = np.asarray(neighbors, dtype=float).reshape(-1, center.size)
        if pts.shape[0] < 1:
            raise InvalidArgument("local data needs at least one neighbor")
        return cls(None, np.arange(pts.shape[0]), (pts - center).T)


@dataclass(frozen=True)
class LocalSpectrum:
    """Eigen-structure of GG^T taken from a thin SVD of G.

    ``eigenvalues`` holds all p values (descending, zero padded),
    ``eigenvectors`` the full p x p basis and ``right_vectors`` the first
    min(p, N) right singular vectors as rows.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    right_vectors: np.ndarray
    rank: int


@dataclass(frozen=True)
class Weights:
    """Barycentric weights of one point and its correction direction T."""

    w: np.ndarray
    T: np.ndarray


def local_data(cloud: PointCloud, k: int, nbrs: NeighborList) -> LocalData:
    """Columns z_{k,j} - z_k in neighbor-list order."""
    idx = nbrs.require(k)
    return LocalData(int(k), idx, cloud.offsets(k, idx))


def _svd(G: np.ndarray):
    full = G.shape[0] > G.shape[1]
    try:
        return scipy.linalg.svd(G, full_matrices=full)
    except np.linalg.LinAlgError:
        return scipy.linalg.svd(G, full_matrices=full, lapack_driver="gesvd")


def local_spectrum(local: LocalData) -> LocalSpectrum:
    """Decompose GG^T and count its numerical rank."""
    p, N = local.G.shape
    U, s, Vh = _svd(local.G)
    lam = np.zeros(p)
    lam[: s.size] = s * s
    if lam[0] > 0:
        cutoff = max(p, N) * np.finfo(float).eps * lam[0]
        rank = int(np.count_nonzero(lam > cutoff))
    else:
        rank = 0
    return LocalSpectrum(lam, U, Vh, rank)


def regularized_pinv(spec: LocalSpectrum, c: float, index: int | None = None) -> np.ndarray:
    """I_c(GG^T) = U_r diag(1/(lambda + c)) U_r^T on the rank-r block."""
    if c < 0:
        raise InvalidArgument(f"regularizer must be nonnegative, got {c}")
    r = spec.rank
    if c == 0 and r == 0:
        raise DegenerateLocalGeometry(index)
    Ur = spec.eigenvectors[:, :r]
    return (Ur / (spec.eigenvalues[:r] + c)) @ Ur.T


def correction_vector(
    local: LocalData, c: float, spectrum: LocalSpectrum | None = None
) -> np.ndarray:
    """T = I_c(GG^T) G 1."""
    spectrum = spectrum or local_spectrum(local)
    return regularized_pinv(spectrum, c, local.index) @ local.G.sum(axis=1)


def barycentric_weights(
    local: LocalData, c: float, spectrum: LocalSpectrum | None = None
) -> Weights:
    """Weights (1 - G^T T) / (N - T^T G 1).

    The numerator is evaluated as (1 - V_r V_r^T 1) + V_r (c/(s^2+c)) V_r^T 1,
    which is the same vector without cancelling 1 against G^T T.
    """
    spectrum = spectrum or local_spectrum(local)
    T = correction_vector(local, c, spectrum)
    N = local.N
    if N == 1:
        return Weights(np.ones(1), T)
    r = spectrum.rank
    ones = np.ones(N)
    Vr = spectrum.right_vectors[:r].T
    proj = Vr.T @ ones
    numerator = ones - Vr @ proj
    if c > 0:
        numerator += Vr @ (c / (spectrum.eigenvalues[:r] + c) * proj)
    denominator = float(numerator.sum())
    if abs(denominator) <= DENOMINATOR_TOL * N:
        raise IllConditionedPoint(local.index, denominator)
    return Weights(numerator / denominator, T)


def direct_weights_oracle(local: LocalData, c: float) -> Weights:
    """Reference weights from (G^T G + cI) y = 1, w = y / sum(y)."""
    if c < 0:
        raise InvalidArgument(f"regularizer must be nonnegative, got {c}")
    G = local.G
    N = local.N
    gram = G.T @ G + c * np.eye(N)
    if c == 0 and np.linalg.matrix_rank(gram) < N:
        raise DegenerateLocalGeometry(local.index, "singular G^T G with c=0")
    try:
        y = scipy.linalg.solve(gram, np.ones(N), assume_a="pos")
    except np.linalg.LinAlgError as err:
        raise DegenerateLocalGeometry(local.index, str(err)) from err
    local_gram = G @ G.T
    if c > 0:
        T = scipy.linalg.solve(local_gram + c * np.eye(local.p), G.sum(axis=1))
    else:
        T = scipy.linalg.pinv(local_gram) @ G.sum(axis=1)
    return Weights(y / y.sum(), T)


def lagrange_weights_oracle(local: LocalData) -> Weights:
    """Exact c=0 minimizer of |sum_j w_j (z_j - z_k)|^2 subject to sum w = 1.

    When G has a null space the minimum is zero and is attained by the
    projection of 1 onto it; otherwise G^T G is invertible.
    """
    G = local.G
    T = scipy.linalg.pinv(G @ G.T) @ G.sum(axis=1)
    Q = scipy.linalg.null_space(G)
    if Q.shape[1] > 0:
        y = Q @ (Q.T @ np.ones(local.N))
    else:
        y = scipy.linalg.solve(G.T @ G, np.ones(local.N), assume_a="pos")
    total = y.sum()
    if abs(total) <= DENOMINATOR_TOL * local.N:
        raise IllConditionedPoint(local.index, float(total))
    return Weights(y / total, T)


def ridge_weights_oracle(local: LocalData, c: float) -> Weights:
    """Reference weights from a stacked least-squares problem, never forming G^T G.

    With w = 1/N + Z y for an orthonormal basis Z of the complement of 1,
    |G w|^2 + c |w|^2 is |G Z y + G 1/N|^2 + c |y|^2 up to a constant, which
    is [G Z; sqrt(c) I] y = [-G 1/N; 0] in the least-squares sense. T solves
    [G^T; sqrt(c) I] T = [1; 0] the same way.
    """
    if c < 0:
        raise InvalidArgument(f"regularizer must be nonnegative, got {c}")
    G = local.G
    N = local.N
    root = np.sqrt(c)
    ones = np.ones(N)
    T = scipy.linalg.lstsq(
        np.vstack((G.T, root * np.eye(local.p))),
        np.concatenate((ones, np.zeros(local.p))),
    )[0]
    w = ones / N
    if N > 1:
        Z = scipy.linalg.null_space(ones[np.newaxis, :])
        y = scipy.linalg.lstsq(
            np.vstack((G @ Z, root * np.eye(N - 1))),
            np.concatenate((-G @ w, np.zeros(N - 1))),
        )[0]
        w = w + Z @ y
    return Weights(w, T)
