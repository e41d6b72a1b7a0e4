# File: lle_spectra/lle_matrix.py
"""Sparse LLE matrix assembly and the operators derived from it."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import logging
import math
import os
from pathlib import Path
from typing import Any

import numpy as np
import scipy.io
import scipy.sparse
import voluptuous as vol

from .barycentric import barycentric_weights, local_data
from .const import (
    DEGENERATE_FRACTION_LIMIT,
    FOURTH_ORDER_SCALE,
    LIBRARY_VERSION,
    RULE_EPS,
    RULE_KNN,
    VALID_RULES,
)
from .exceptions import (
    DegenerateAssembly,
    DegenerateLocalGeometry,
    EmptyNeighborhood,
    IllConditionedPoint,
    InvalidArgument,
)
from .geometry import PointCloud
from .neighbors import NeighborList

_LOGGER = logging.getLogger(__name__)


def validate_rho(value: Any) -> float:
    rho = float(value)
    if math.isnan(rho) or rho == -math.inf:
        raise vol.Invalid(f"Invalid regularization order: {value}")
    return rho


LLE_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Required("rule"): vol.In(VALID_RULES),
        vol.Required("rho"): validate_rho,
        vol.Required("d"): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Required("n"): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional("eps"): vol.Any(
            None, vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
        ),
        vol.Optional("k"): vol.Any(None, vol.All(vol.Coerce(int), vol.Range(min=1))),
    }
)


@dataclass(frozen=True)
class LLEConfig:
    """Neighborhood rule, regularization order rho and dimensions of a run.

    ``rho = inf`` selects the pure pseudo-inverse (c = 0).
    """

    rule: str
    rho: float
    d: int
    n: int
    eps: float | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        try:
            LLE_CONFIG_SCHEMA(asdict(self))
        except vol.Invalid as err:
            raise InvalidArgument(f"Invalid LLE configuration: {err}") from err
        if self.rule == RULE_EPS and self.eps is None:
            raise InvalidArgument("the eps rule needs eps")
        if self.rule == RULE_KNN and self.k is None:
            raise InvalidArgument("the knn rule needs k")

    @classmethod
    def for_neighbors(cls, nbrs: NeighborList, rho: float, d: int) -> LLEConfig:
        return cls(rule=nbrs.rule, rho=rho, d=d, n=nbrs.n, eps=nbrs.eps, k=nbrs.k)

    def regularizer(self, radius: float) -> float:
        """c = n * radius^(d + rho)."""
        if math.isinf(self.rho):
            return 0.0
        return self.n * radius ** (self.d + self.rho)


@dataclass(frozen=True)
class SparseOperator:
    """An n x n CSR matrix plus what produced it."""

    matrix: scipy.sparse.csr_matrix
    kind: str
    symmetric: bool = False
    scale: float = 1.0
    config: LLEConfig | None = None
    skipped: tuple[int, ...] = ()
    singletons: tuple[int, ...] = ()
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        return self.matrix @ other

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _assemble_rows(cloud, nbrs, config, chunk):
    rows = []
    for k in chunk:
        try:
            local = local_data(cloud, k, nbrs)
            c = config.regularizer(nbrs.radius(k))
            weights = barycentric_weights(local, c)
        except (EmptyNeighborhood, DegenerateLocalGeometry, IllConditionedPoint) as err:
            _LOGGER.debug("Skipping point %s: %s", k, err)
            rows.append((k, None, None))
            continue
        order = np.argsort(local.neighbors, kind="stable")
        rows.append((k, local.neighbors[order], weights.w[order]))
    return rows


def assemble_W(
    cloud: PointCloud,
    nbrs: NeighborList,
    config: LLEConfig,
    threads: int | None = None,
) -> SparseOperator:
    """Row k of W holds the barycentric weights of point k at its neighbors.

    Points whose weights cannot be formed get an identity row; more than
    1% of such points aborts the assembly.
    """
    if not nbrs.is_complete or nbrs.n != cloud.n:
        raise InvalidArgument("W needs a neighbor list covering every point")
    n = cloud.n
    threads = max(1, threads or os.cpu_count() or 1)
    size = max(64, math.ceil(n / (4 * threads)))
    chunks = [range(start, min(start + size, n)) for start in range(0, n, size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda ch: _assemble_rows(cloud, nbrs, config, ch), chunks))

    indptr = np.zeros(n + 1, dtype=np.int64)
    cols, vals, skipped, singletons = [], [], [], []
    for rows in results:
        for k, idx, w in rows:
            if idx is None:
                skipped.append(k)
                idx, w = np.array([k]), np.ones(1)
            elif idx.size == 1:
                singletons.append(k)
            cols.append(idx)
            vals.append(w)
            indptr[k + 1] = idx.size
    np.cumsum(indptr, out=indptr)
    matrix = scipy.sparse.csr_matrix(
        (np.concatenate(vals), np.concatenate(cols), indptr), shape=(n, n)
    )
    if singletons:
        _LOGGER.warning(
            "%d points have a single neighbor and get weight 1",
            len(singletons),
            extra={"diagnostic": "singleton_neighborhood", "points": singletons[:50]},
        )
    if skipped:
        _LOGGER.warning(
            "%d of %d points were skipped during assembly",
            len(skipped),
            n,
            extra={"diagnostic": "skipped_points", "points": skipped[:50]},
        )
        if len(skipped) > DEGENERATE_FRACTION_LIMIT * n:
            raise DegenerateAssembly(skipped, n)
    _LOGGER.debug("Assembled W: n=%d nnz=%d rho=%s", n, matrix.nnz, config.rho)
    return SparseOperator(
        matrix,
        kind="W",
        config=config,
        skipped=tuple(skipped),
        singletons=tuple(singletons),
    )


def _w_minus_identity(W: SparseOperator) -> scipy.sparse.csr_matrix:
    """W - I with the diagonal set so every row sums to zero."""
    off = (W.matrix - scipy.sparse.diags(W.matrix.diagonal())).tocsr()
    off.eliminate_zeros()
    row_sums = np.asarray(off.sum(axis=1)).ravel()
    return (off - scipy.sparse.diags(row_sums)).tocsr()


def embedding_matrix(W: SparseOperator) -> SparseOperator:
    """M = (I - W)^T (I - W), symmetrized."""
    A = -_w_minus_identity(W)
    M = (A.T @ A).tocsr()
    M = ((M + M.T) * 0.5).tocsr()
    return SparseOperator(M, kind="M", symmetric=True, config=W.config, skipped=W.skipped)


def scaled_generator(W: SparseOperator, eps: float, d: int) -> SparseOperator:
    """L = (2(d+2)/eps^2)(W - I), approximating the Laplace-Beltrami operator."""
    if W.config is not None and W.config.rule != RULE_EPS:
        raise InvalidArgument("the scaled generator needs an eps-radius W")
    if not eps > 0 or d < 1:
        raise InvalidArgument("eps must be positive and d >= 1")
    scale = 2.0 * (d + 2) / eps**2
    return SparseOperator(
        (scale * _w_minus_identity(W)).tocsr(),
        kind="L",
        scale=scale,
        config=W.config,
        skipped=W.skipped,
    )


def fourth_order_generator(W: SparseOperator, eps: float) -> SparseOperator:
    """(280/eps^4)(W - I), the fourth-order operator rescale on S^1 at rho=8."""
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    scale = FOURTH_ORDER_SCALE / eps**4
    return SparseOperator(
        (scale * _w_minus_identity(W)).tocsr(),
        kind="L4",
        scale=scale,
        config=W.config,
        skipped=W.skipped,
    )


def normalized_knn_generator(
    W: SparseOperator, radii, d: int | None = None
) -> SparseOperator:
    """diag(1/eps(x_i)^2)(W - I) for the KNN rule.

    With `d` the result is also multiplied by 2(d+2), the Laplace-Beltrami
    normalization.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (W.n,):
        raise InvalidArgument("one radius per point is required")
    if np.any(radii <= 0):
        raise InvalidArgument("zero KNN radius, the cloud has duplicate points")
    scale = 1.0 if d is None else 2.0 * (d + 2)
    matrix = scipy.sparse.diags(scale / radii**2) @ _w_minus_identity(W)
    return SparseOperator(
        matrix.tocsr(), kind="L_knn", scale=scale, config=W.config, skipped=W.skipped
    )


def write_matrix_market(op: SparseOperator, path: str | Path) -> Path:
    """Write the operator as a Matrix Market coordinate file."""
    path = Path(path)
    comment = f"lle_spectra {LIBRARY_VERSION} kind={op.kind} scale={op.scale!r}"
    scipy.io.mmwrite(str(path), op.matrix, comment=comment, precision=17)
    # mmwrite appends .mtx when missing
    return path if path.suffix == ".mtx" else path.with_name(path.name + ".mtx")
