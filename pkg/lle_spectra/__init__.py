# File: lle_spectra/__init__.py
"""Locally linear embedding with an explicit regularization order."""
from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from .const import LIBRARY_VERSION, RULE_EPS, RULE_KNN
from .exceptions import InvalidArgument
from .geometry import PointCloud
from .kernel import KernelSlice, kernel_slice, pointwise_apply
from .lle_matrix import (
    LLEConfig,
    SparseOperator,
    assemble_W,
    embedding_matrix,
    fourth_order_generator,
    normalized_knn_generator,
    scaled_generator,
)
from .neighbors import (
    NeighborList,
    build_eps_neighbors,
    build_knn,
    eps_for_neighbor_count,
)
from .spectral import (
    SpectrumResult,
    embedding_coordinates,
    generator_spectrum,
    smallest_eigs_sym,
)

__version__ = LIBRARY_VERSION

_LOGGER = logging.getLogger(__name__)


class LLECoordinator:
    """One cloud and one neighborhood rule, with every derived stage cached.

    Exactly one of `eps`, `knn` or `target_neighbors` picks the rule;
    `target_neighbors` resolves to an eps radius.
    """

    def __init__(
        self,
        cloud: PointCloud,
        rho: float,
        d: int | None = None,
        eps: float | None = None,
        knn: int | None = None,
        target_neighbors: int | None = None,
        threads: int | None = None,
    ) -> None:
        """Initialize the coordinator."""
        if sum(x is not None for x in (eps, knn, target_neighbors)) != 1:
            raise InvalidArgument("give exactly one of eps, knn, target_neighbors")
        self.cloud = cloud
        self.rho = float(rho)
        self.d = int(d or cloud.intrinsic_dim)
        self.threads = threads
        if target_neighbors is not None:
            eps = eps_for_neighbor_count(cloud, target_neighbors)
        self._eps = eps
        self._knn = knn
        self._nbrs: NeighborList | None = None
        self._W: SparseOperator | None = None
        self._M: SparseOperator | None = None
        self._L: SparseOperator | None = None

    @property
    def rule(self) -> str:
        return RULE_KNN if self._knn is not None else RULE_EPS

    @property
    def eps(self) -> float | None:
        return self._eps

    @property
    def config(self) -> LLEConfig:
        return LLEConfig(
            rule=self.rule,
            rho=self.rho,
            d=self.d,
            n=self.cloud.n,
            eps=self._eps,
            k=self._knn,
        )

    @property
    def neighbors(self) -> NeighborList:
        if self._nbrs is None:
            if self.rule == RULE_EPS:
                self._nbrs = build_eps_neighbors(self.cloud, self._eps)
            else:
                self._nbrs = build_knn(self.cloud, self._knn)
            _LOGGER.debug("Built %s neighbor list", self.rule)
        return self._nbrs

    @property
    def W(self) -> SparseOperator:
        if self._W is None:
            self._W = assemble_W(self.cloud, self.neighbors, self.config, self.threads)
        return self._W

    @property
    def embedding_matrix(self) -> SparseOperator:
        if self._M is None:
            self._M = embedding_matrix(self.W)
        return self._M

    @property
    def generator(self) -> SparseOperator:
        """Scaled generator for the eps rule, normalized one for KNN."""
        if self._L is None:
            if self.rule == RULE_EPS:
                self._L = scaled_generator(self.W, self._eps, self.d)
            else:
                self._L = normalized_knn_generator(
                    self.W, self.neighbors.radii, self.d
                )
        return self._L

    @property
    def fourth_order_generator(self) -> SparseOperator:
        if self.rule != RULE_EPS:
            raise InvalidArgument("the fourth-order rescale needs an eps radius")
        return fourth_order_generator(self.W, self._eps)

    def spectrum(self, m: int, **kwargs) -> SpectrumResult:
        """Eigenvalues of -L nearest zero."""
        return generator_spectrum(self.generator, m, **kwargs)

    def embedding_spectrum(self, m: int, **kwargs) -> SpectrumResult:
        return smallest_eigs_sym(self.embedding_matrix, m, **kwargs)

    def embed(self, ell: int) -> np.ndarray:
        """LLE coordinates from the cached embedding matrix."""
        if ell < 1:
            raise InvalidArgument(f"target dimension must be >= 1, got {ell}")
        return embedding_coordinates(self.embedding_matrix, ell)

    def kernel(self, k: int) -> KernelSlice:
        return kernel_slice(self.cloud, k, self.neighbors, self.config)

    def pointwise(self, k: int, f: np.ndarray | Callable) -> float:
        return pointwise_apply(self.cloud, k, self.neighbors, self.config, f)
