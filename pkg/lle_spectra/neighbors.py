# File: lle_spectra/neighbors.py
"""Exact eps-radius and K-nearest-neighbor lists, plus bandwidth helpers."""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.spatial import cKDTree

from .const import RULE_EPS, RULE_KNN
from .exceptions import EmptyNeighborhood, InvalidArgument
from .geometry import PointCloud

_LOGGER = logging.getLogger(__name__)

# tree candidates are padded by this relative slack, then filtered exactly
_TREE_SLACK = 1e-9


@dataclass(frozen=True)
class NeighborList:
    """Neighbor indices and distances in compressed-row layout.

    Row i belongs to point ``centers[i]``. For the eps rule rows are sorted
    by neighbor index; for KNN they are sorted by distance, ties by index.
    """

    rule: str
    indptr: np.ndarray
    indices: np.ndarray
    distances: np.ndarray
    centers: np.ndarray
    n: int
    eps: float | None = None
    k: int | None = None
    radii: np.ndarray | None = None
    empty: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_row", {int(c): i for i, c in enumerate(self.centers)}
        )

    @property
    def is_complete(self) -> bool:
        """True when every point of the cloud has a row."""
        return len(self.centers) == self.n

    def row_of(self, k: int) -> int:
        try:
            return self._row[int(k)]
        except KeyError as err:
            raise InvalidArgument(f"point {k} was not queried") from err

    def neighbors(self, k: int) -> np.ndarray:
        row = self.row_of(k)
        return self.indices[self.indptr[row] : self.indptr[row + 1]]

    def distances_of(self, k: int) -> np.ndarray:
        row = self.row_of(k)
        return self.distances[self.indptr[row] : self.indptr[row + 1]]

    def count(self, k: int) -> int:
        row = self.row_of(k)
        return int(self.indptr[row + 1] - self.indptr[row])

    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def radius(self, k: int) -> float:
        """Per-point bandwidth: eps for the radius rule, K-th distance for KNN."""
        if self.rule == RULE_KNN:
            return float(self.radii[self.row_of(k)])
        return float(self.eps)

    def require(self, k: int) -> np.ndarray:
        """Neighbors of k, raising when the neighborhood is empty."""
        idx = self.neighbors(k)
        if idx.size == 0:
            raise EmptyNeighborhood(k)
        return idx


def _centers(cloud: PointCloud, centers) -> np.ndarray:
    if centers is None:
        return np.arange(cloud.n)
    centers = np.unique(np.asarray(centers, dtype=int))
    if centers.size == 0 or centers[0] < 0 or centers[-1] >= cloud.n:
        raise InvalidArgument("centers must index points of the cloud")
    return centers


def _pack(rows_idx: list[np.ndarray], rows_dist: list[np.ndarray]):
    counts = np.fromiter((r.size for r in rows_idx), dtype=np.int64, count=len(rows_idx))
    indptr = np.concatenate(([0], np.cumsum(counts)))
    indices = np.concatenate(rows_idx) if rows_idx else np.empty(0, dtype=np.int64)
    distances = np.concatenate(rows_dist) if rows_dist else np.empty(0)
    return indptr, indices.astype(np.int64), distances


def _use_tree(cloud: PointCloud, exhaustive: bool) -> bool:
    return not exhaustive and not cloud.is_periodic


def build_eps_neighbors(
    cloud: PointCloud,
    eps: float,
    centers=None,
    exhaustive: bool = False,
) -> NeighborList:
    """All points within the closed ball of radius eps, self excluded."""
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    centers = _centers(cloud, centers)
    candidates = None
    if _use_tree(cloud, exhaustive):
        tree = cKDTree(cloud.points)
        candidates = tree.query_ball_point(
            cloud.points[centers], r=eps * (1.0 + _TREE_SLACK)
        )
    everyone = np.arange(cloud.n)
    rows_idx, rows_dist, empty = [], [], []
    for row, k in enumerate(centers):
        cand = everyone if candidates is None else np.asarray(candidates[row], dtype=int)
        dist = cloud.distances_from(k, cand)
        keep = (dist <= eps) & (cand != k)
        idx, dist = cand[keep], dist[keep]
        order = np.argsort(idx, kind="stable")
        rows_idx.append(idx[order])
        rows_dist.append(dist[order])
        if idx.size == 0:
            empty.append(int(k))
    indptr, indices, distances = _pack(rows_idx, rows_dist)
    if empty:
        _LOGGER.warning(
            "%d of %d points have no neighbors within eps=%g",
            len(empty),
            centers.size,
            eps,
            extra={"diagnostic": "empty_neighborhood", "points": empty[:50]},
        )
    _LOGGER.debug(
        "eps=%g neighbors: mean count %.1f over %d centers",
        eps,
        float(np.mean(np.diff(indptr))),
        centers.size,
    )
    return NeighborList(
        rule=RULE_EPS,
        indptr=indptr,
        indices=indices,
        distances=distances,
        centers=centers,
        n=cloud.n,
        eps=float(eps),
        empty=empty,
    )


def build_knn(
    cloud: PointCloud, K: int, centers=None, exhaustive: bool = False
) -> NeighborList:
    """Exact K nearest neighbors, ties broken by the smaller index."""
    if int(K) != K or not 1 <= K <= cloud.n - 1:
        raise InvalidArgument(f"K must be in [1, {cloud.n - 1}], got {K}")
    K = int(K)
    centers = _centers(cloud, centers)
    candidates = None
    if _use_tree(cloud, exhaustive):
        tree = cKDTree(cloud.points)
        # the (K+1)-th hit bounds the K-th non-self distance; reopen the ball
        # at that radius so every tied point is a candidate
        dist, _ = tree.query(cloud.points[centers], k=K + 1)
        reach = dist[:, -1] * (1.0 + _TREE_SLACK) + np.finfo(float).tiny
        candidates = tree.query_ball_point(cloud.points[centers], r=reach)
    everyone = np.arange(cloud.n)
    rows_idx, rows_dist = [], []
    for row, k in enumerate(centers):
        cand = everyone if candidates is None else np.asarray(candidates[row], dtype=int)
        cand = cand[cand != k]
        dist = cloud.distances_from(k, cand)
        order = np.lexsort((cand, dist))[:K]
        rows_idx.append(cand[order])
        rows_dist.append(dist[order])
    indptr, indices, distances = _pack(rows_idx, rows_dist)
    radii = distances[indptr[1:] - 1]
    return NeighborList(
        rule=RULE_KNN,
        indptr=indptr,
        indices=indices,
        distances=distances,
        centers=centers,
        n=cloud.n,
        k=K,
        radii=radii,
    )


def eps_for_neighbor_count(cloud: PointCloud, target: int, centers=None) -> float:
    """Radius that gives about `target` neighbors per point.

    Midpoint between the median target-th and (target+1)-th neighbor
    distances, so on a grid every point gets exactly `target` neighbors.
    """
    if int(target) != target or target < 1:
        raise InvalidArgument(f"target must be a positive integer, got {target}")
    knn = build_knn(cloud, int(target) + 1, centers=centers)
    rows = knn.distances.reshape(-1, int(target) + 1)
    eps = 0.5 * (float(np.median(rows[:, -2])) + float(np.median(rows[:, -1])))
    _LOGGER.debug("eps=%g targets %d neighbors", eps, target)
    return eps


def suggest_bandwidth(n: int, d: int, cal: float = 1.0) -> float:
    """Bandwidth balancing bias and variance: cal * (log n / n)^(1/(d+4))."""
    if n < 10:
        raise InvalidArgument(f"n must be >= 10, got {n}")
    if d < 1 or not cal > 0:
        raise InvalidArgument("d must be >= 1 and cal positive")
    return cal * (math.log(n) / n) ** (1.0 / (d + 4))
