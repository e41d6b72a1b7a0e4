# File: lle_spectra/spectral.py
"""Eigensolvers for LLE-derived operators and the LLE embedding."""
from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
import scipy.stats

from .const import (
    DEFAULT_EIG_TOL,
    DEFAULT_MAX_ITER,
    DENSE_FALLBACK_MAX_N,
    EMBEDDING_SHIFT_FACTOR,
    GENERATOR_SHIFT,
    RESIDUAL_FACTOR,
    RULE_EPS,
    V0_SEED,
)
from .exceptions import InvalidArgument, SolverNotConverged
from .geometry import TWO_PI, PointCloud, make_rng, wrap_offset
from .lle_matrix import LLEConfig, SparseOperator, assemble_W, embedding_matrix
from .neighbors import NeighborList, build_eps_neighbors, build_knn

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending eigenvalues with residuals and the rescale that was applied."""

    eigenvalues: np.ndarray
    residuals: np.ndarray
    scaling: float
    method: str
    operator_norm: float
    eigenvectors: np.ndarray | None = None
    imaginary: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.eigenvalues.size

    @property
    def within_contract(self) -> bool:
        return bool(np.all(self.residuals < RESIDUAL_FACTOR * max(self.operator_norm, 1.0)))


def _as_matrix(op):
    if isinstance(op, SparseOperator):
        return op.matrix, op.scale
    if scipy.sparse.issparse(op):
        return op.tocsr(), 1.0
    return np.asarray(op, dtype=float), 1.0


def _norm_estimate(A) -> float:
    if scipy.sparse.issparse(A):
        return float(scipy.sparse.linalg.norm(A, 1))
    return float(np.linalg.norm(A, 1))


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first nonzero component is real and positive."""
    vectors = np.array(vectors, copy=True)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0:
            continue
        first = int(np.argmax(mags > 1e-12 * top))
        phase = col[first] / mags[first]
        vectors[:, j] = col / phase
    return vectors


def _residuals(A, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    if vectors is None or vectors.size == 0:
        return np.zeros(values.size)
    AV = A @ vectors
    resid = np.linalg.norm(AV - vectors * values, axis=0)
    return resid / np.linalg.norm(vectors, axis=0)


def _start_vector(n: int) -> np.ndarray:
    return make_rng(V0_SEED).standard_normal(n)


def _use_dense(n: int, dense: bool | None) -> bool:
    return n <= DENSE_FALLBACK_MAX_N if dense is None else dense


def smallest_eigs_sym(
    M,
    m: int,
    tol: float = DEFAULT_EIG_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    dense: bool | None = None,
) -> SpectrumResult:
    """The m smallest eigenpairs of a symmetric operator.

    Dense ``eigh`` up to DENSE_FALLBACK_MAX_N points, otherwise Lanczos in
    shift-invert mode just below zero.
    """
    A, scale = _as_matrix(M)
    n = A.shape[0]
    if not 1 <= m < n:
        raise InvalidArgument(f"m must be in [1, {n - 1}], got {m}")
    norm = _norm_estimate(A)
    if _use_dense(n, dense):
        full = A.toarray() if scipy.sparse.issparse(A) else A
        values, vectors = scipy.linalg.eigh(full, subset_by_index=[0, m - 1])
        method = "dense"
    else:
        sigma = -EMBEDDING_SHIFT_FACTOR * max(norm, np.finfo(float).tiny)
        _LOGGER.debug("eigsh: n=%d m=%d sigma=%g", n, m, sigma)
        try:
            values, vectors = scipy.sparse.linalg.eigsh(
                A.tocsc(),
                k=m,
                sigma=sigma,
                which="LM",
                v0=_start_vector(n),
                tol=tol,
                maxiter=max_iter,
            )
        except scipy.sparse.linalg.ArpackNoConvergence as err:
            partial = np.asarray(err.eigenvalues).real
            raise SolverNotConverged(
                f"Lanczos found {partial.size} of {m} eigenpairs",
                partial,
                err.eigenvectors,
                _residuals(A, err.eigenvalues, err.eigenvectors),
            ) from err
        method = "lanczos"
    order = np.argsort(values)
    values = values[order]
    vectors = fix_signs(vectors[:, order])
    residuals = _residuals(A, values, vectors)
    result = SpectrumResult(values, residuals, scale, method, norm, eigenvectors=vectors)
    if not result.within_contract:
        if method == "dense":
            _LOGGER.warning("Dense residuals above contract: %s", residuals.max())
        else:
            raise SolverNotConverged(
                "Lanczos residuals above contract", values, vectors, residuals
            )
    return result


def generator_spectrum(
    L,
    m: int,
    tol: float = DEFAULT_EIG_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    dense: bool | None = None,
    shift: float = GENERATOR_SHIFT,
    vectors: bool = False,
) -> SpectrumResult:
    """The m eigenvalues of -L nearest zero, real parts ascending.

    Imaginary parts are kept as a diagnostic in ``imaginary``.
    """
    A, scale = _as_matrix(L)
    A = -A
    n = A.shape[0]
    if not 1 <= m < n - 1:
        raise InvalidArgument(f"m must be in [1, {n - 2}], got {m}")
    norm = _norm_estimate(A)
    if _use_dense(n, dense):
        full = A.toarray() if scipy.sparse.issparse(A) else A
        values, vecs = scipy.linalg.eig(full)
        keep = np.argsort(np.abs(values), kind="stable")[:m]
        values = values[keep]
        vecs = vecs[:, keep]
        method = "dense"
    else:
        _LOGGER.debug("eigs: n=%d m=%d sigma=%g", n, m, shift)
        try:
            values, vecs = scipy.sparse.linalg.eigs(
                A.tocsc(),
                k=m,
                sigma=shift,
                which="LM",
                v0=_start_vector(n),
                tol=tol,
                maxiter=max_iter,
            )
        except scipy.sparse.linalg.ArpackNoConvergence as err:
            partial = np.asarray(err.eigenvalues)
            raise SolverNotConverged(
                f"Arnoldi found {partial.size} of {m} eigenpairs",
                np.sort(partial.real),
                err.eigenvectors,
                _residuals(A, err.eigenvalues, err.eigenvectors),
            ) from err
        method = "arnoldi"
    order = np.argsort(values.real, kind="stable")
    values = values[order]
    vecs = fix_signs(vecs[:, order])
    residuals = _residuals(A, values, vecs)
    result = SpectrumResult(
        values.real.copy(),
        residuals,
        scale,
        method,
        norm,
        eigenvectors=vecs if vectors else None,
        imaginary=values.imag.copy(),
    )
    if method != "dense" and not result.within_contract:
        raise SolverNotConverged(
            "Arnoldi residuals above contract", result.eigenvalues, vecs, residuals
        )
    return result


def neighbors_for(cloud: PointCloud, config: LLEConfig) -> NeighborList:
    """Neighbor list matching the rule of an LLE configuration."""
    if config.rule == RULE_EPS:
        return build_eps_neighbors(cloud, config.eps)
    return build_knn(cloud, config.k)


def embed(
    cloud: PointCloud,
    config: LLEConfig,
    ell: int,
    nbrs: NeighborList | None = None,
    threads: int | None = None,
) -> np.ndarray:
    """LLE coordinates: eigenvectors 2..ell+1 of (I - W)^T (I - W).

    Of the ell+1 lowest eigenvectors, the one closest to constant is dropped.
    """
    if ell < 1:
        raise InvalidArgument(f"target dimension must be >= 1, got {ell}")
    nbrs = nbrs or neighbors_for(cloud, config)
    W = assemble_W(cloud, nbrs, config, threads=threads)
    return embedding_coordinates(embedding_matrix(W), ell)


def embedding_coordinates(M: SparseOperator, ell: int) -> np.ndarray:
    """Unit-norm low eigenvectors of M with the near-constant one removed."""
    result = smallest_eigs_sym(M, ell + 1)
    vectors = result.eigenvectors
    constancy = np.abs(vectors.sum(axis=0)) / np.sqrt(M.n)
    keep = np.delete(np.arange(ell + 1), int(np.argmax(constancy)))
    coords = vectors[:, keep]
    return coords / np.linalg.norm(coords, axis=0)


def angle_recovery_spearman(coords: np.ndarray, theta: np.ndarray) -> float:
    """How well the planar angle of an embedding tracks the true angle.

    The embedding angle is aligned to `theta` up to orientation and a
    global rotation; the result is the best |Spearman| correlation.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] < 2:
        raise InvalidArgument("angle recovery needs at least two coordinates")
    centered = coords[:, :2] - coords[:, :2].mean(axis=0)
    phi = np.arctan2(centered[:, 1], centered[:, 0])
    truth = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    best = 0.0
    for orientation in (1.0, -1.0):
        drift = wrap_offset(orientation * phi - truth, TWO_PI)
        offset = np.angle(np.mean(np.exp(1j * drift)))
        aligned = truth + wrap_offset(drift - offset, TWO_PI)
        corr = scipy.stats.spearmanr(aligned, truth)[0]
        if np.isfinite(corr):
            best = max(best, abs(float(corr)))
    return best
