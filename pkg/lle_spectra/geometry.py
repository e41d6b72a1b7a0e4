# File: lle_spectra/geometry.py
"""Benchmark point clouds: circles, spheres, tori and tomography projections."""
from __future__ import annotations

from dataclasses import dataclass, field
import json
import logging
from typing import Any

import numpy as np

from .const import (
    METRIC_EUCLIDEAN,
    METRIC_PERIODIC,
    PHANTOM_DIR,
    SAMPLER_CIRCLE,
    SAMPLER_FLAT_TORUS,
    SAMPLER_SHEPP_LOGAN,
    SAMPLER_SPHERE,
    SAMPLER_TORUS,
    VALID_CIRCLE_MODES,
    VALID_METRICS,
    VALID_SPHERE_MODES,
)
from .exceptions import InvalidArgument

_LOGGER = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def make_rng(seed: int | None) -> np.random.Generator:
    """Return the library's seeded 64-bit generator (PCG64)."""
    return np.random.Generator(np.random.PCG64(seed))


def wrap_offset(delta: np.ndarray | float, period: float) -> np.ndarray:
    """Signed difference folded into [-period/2, period/2)."""
    half = 0.5 * period
    return np.mod(np.asarray(delta, dtype=float) + half, period) - half


def periodic_distance(a, b, period: float = TWO_PI) -> np.ndarray:
    """Wrap-around distance between coordinates on a circle of length `period`."""
    return np.abs(wrap_offset(np.asarray(a, dtype=float) - b, period))


@dataclass(frozen=True)
class PointCloud:
    """Samples in ambient space plus the metadata needed to rebuild them."""

    points: np.ndarray
    intrinsic_dim: int
    params: np.ndarray | None = None
    metric: str = METRIC_EUCLIDEAN
    period: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1:
            raise InvalidArgument("points must be a non-empty n x p matrix")
        if not np.all(np.isfinite(points)):
            raise InvalidArgument("points must be finite")
        if not 1 <= self.intrinsic_dim <= points.shape[1]:
            raise InvalidArgument(
                f"intrinsic dimension {self.intrinsic_dim} outside [1, {points.shape[1]}]"
            )
        if self.metric not in VALID_METRICS:
            raise InvalidArgument(f"unknown metric {self.metric!r}")
        if self.metric == METRIC_PERIODIC:
            if points.shape[1] != 1 or not self.period or self.period <= 0:
                raise InvalidArgument("periodic_1d needs p=1 and a positive period")
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]

    @property
    def is_periodic(self) -> bool:
        return self.metric == METRIC_PERIODIC

    def offsets(self, k: int, idx: np.ndarray) -> np.ndarray:
        """Return the p x N matrix of differences z_j - z_k under the metric."""
        diff = self.points[idx] - self.points[k]
        if self.is_periodic:
            diff = wrap_offset(diff, self.period)
        return diff.T

    def distances_from(self, k: int, idx: np.ndarray | None = None) -> np.ndarray:
        """Distances from point k to `idx` (all points when omitted)."""
        if idx is None:
            idx = np.arange(self.n)
        return np.linalg.norm(self.offsets(k, idx), axis=0)

    def distances_to(self, location: np.ndarray) -> np.ndarray:
        """Distances from every point to an arbitrary ambient location."""
        diff = self.points - np.asarray(location, dtype=float)
        if self.is_periodic:
            diff = wrap_offset(diff, self.period)
        return np.linalg.norm(diff, axis=1)


def _check_count(n: int, minimum: int) -> None:
    if int(n) != n or n < minimum:
        raise InvalidArgument(f"n must be an integer >= {minimum}, got {n}")


def sample_circle(n: int, mode: str = "uniform", seed: int | None = 0) -> PointCloud:
    """Sample the unit circle on a grid or with the nonuniform angle warp."""
    _check_count(n, 3)
    if mode not in VALID_CIRCLE_MODES:
        raise InvalidArgument(f"unknown circle mode {mode!r}")
    i = np.arange(1, n + 1)
    if mode == "uniform":
        theta = TWO_PI * i / n
    else:
        u = make_rng(seed).random(n)
        theta = TWO_PI * u + 0.3 * np.sin(TWO_PI * i / n)
    points = np.column_stack((np.cos(theta), np.sin(theta)))
    return PointCloud(
        points,
        intrinsic_dim=1,
        params=theta,
        meta={"sampler": SAMPLER_CIRCLE, "mode": mode, "seed": seed, "n": n},
    )


def _fibonacci_directions(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    azimuth = np.pi * (1.0 + np.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    return np.column_stack((r * np.cos(azimuth), r * np.sin(azimuth), z))


def sample_sphere(
    n: int, radius: float = 1.0, mode: str = "uniform", seed: int | None = 0
) -> PointCloud:
    """Sample the 2-sphere of the given radius.

    ``uniform`` normalizes Gaussian vectors, ``perturbed`` lifts the third
    coordinate of a random tenth of them by 1 - cos(2 pi U) before projecting
    back, and ``fibonacci`` is the deterministic golden-angle spiral.
    """
    _check_count(n, 4)
    if not radius > 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    if mode not in VALID_SPHERE_MODES:
        raise InvalidArgument(f"unknown sphere mode {mode!r}")
    rng = make_rng(seed)
    if mode == "fibonacci":
        unit = _fibonacci_directions(n)
    else:
        g = rng.standard_normal((n, 3))
        unit = g / np.linalg.norm(g, axis=1, keepdims=True)
        if mode == "perturbed":
            chosen = rng.choice(n, size=n // 10, replace=False)
            u = rng.random(chosen.size)
            unit[chosen, 2] += 1.0 - np.cos(TWO_PI * u)
            unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    # one more projection keeps |x| = r to rounding after the scale
    unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    points = radius * unit
    angles = np.column_stack(
        (np.arccos(np.clip(unit[:, 2], -1.0, 1.0)), np.arctan2(unit[:, 1], unit[:, 0]))
    )
    return PointCloud(
        points,
        intrinsic_dim=2,
        params=angles,
        meta={
            "sampler": SAMPLER_SPHERE,
            "mode": mode,
            "seed": seed,
            "n": n,
            "radius": radius,
        },
    )


def torus_point(psi, phi) -> np.ndarray:
    """Map tube angle psi and revolution angle phi onto the torus level set."""
    psi = np.asarray(psi, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ring = 1.0 + 0.5 * np.cos(psi)
    return np.stack((0.5 * np.sin(psi), ring * np.sin(phi), ring * np.cos(phi)), axis=-1)


def sample_torus(n: int, seed: int | None = 0) -> PointCloud:
    """Sample the torus (1 - sqrt(z^2 + y^2))^2 + x^2 = 1/4 with uniform angles.

    The product-angle density is not area-uniform: it is heavier on the
    inner ring. ``params`` holds (psi, phi) per row.
    """
    _check_count(n, 4)
    rng = make_rng(seed)
    angles = TWO_PI * rng.random((n, 2))
    points = torus_point(angles[:, 0], angles[:, 1])
    return PointCloud(
        points,
        intrinsic_dim=2,
        params=angles,
        meta={"sampler": SAMPLER_TORUS, "seed": seed, "n": n},
    )


def sample_flat_torus(n: int) -> PointCloud:
    """Uniform grid on the 1-dim flat torus, stored as its angle coordinate."""
    _check_count(n, 3)
    theta = TWO_PI * np.arange(1, n + 1) / n
    return PointCloud(
        theta[:, None],
        intrinsic_dim=1,
        params=theta,
        metric=METRIC_PERIODIC,
        period=TWO_PI,
        meta={"sampler": SAMPLER_FLAT_TORUS, "n": n},
    )


# --- Tomography ---


@dataclass(frozen=True)
class Ellipse:
    """One additive ellipse of a phantom, rotation angle in radians."""

    center: tuple[float, float]
    axes: tuple[float, float]
    angle: float
    intensity: float

    def boundary(self, count: int = 2048) -> np.ndarray:
        t = np.linspace(0.0, TWO_PI, count, endpoint=False)
        c, s = np.cos(self.angle), np.sin(self.angle)
        u = self.axes[0] * np.cos(t)
        v = self.axes[1] * np.sin(t)
        return np.column_stack(
            (self.center[0] + c * u - s * v, self.center[1] + s * u + c * v)
        )


@dataclass(frozen=True)
class PhantomSpec:
    """Sum of ellipses supported in the closed unit disk."""

    ellipses: tuple[Ellipse, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.ellipses:
            raise InvalidArgument("a phantom needs at least one ellipse")
        for ellipse in self.ellipses:
            if min(ellipse.axes) <= 0:
                raise InvalidArgument("ellipse semi-axes must be positive")
            if np.linalg.norm(ellipse.boundary(), axis=1).max() > 1.0 + 1e-9:
                raise InvalidArgument(f"ellipse {ellipse} leaves the unit disk")

    def density(self, x, y) -> np.ndarray:
        """Point evaluation of the phantom."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        total = np.zeros(np.broadcast(x, y).shape)
        for e in self.ellipses:
            c, s = np.cos(e.angle), np.sin(e.angle)
            dx, dy = x - e.center[0], y - e.center[1]
            u = (c * dx + s * dy) / e.axes[0]
            v = (-s * dx + c * dy) / e.axes[1]
            total = total + e.intensity * (u * u + v * v <= 1.0)
        return total


def load_phantom(name: str = "shepp_logan") -> PhantomSpec:
    """Read a versioned ellipse table from the package phantom directory."""
    path = PHANTOM_DIR / f"{name}.json"
    if not path.exists():
        raise InvalidArgument(f"unknown phantom {name!r}")
    with open(path, encoding="utf-8") as f:
        table = json.load(f)
    scale = np.pi / 180.0 if table.get("angle_unit") == "degrees" else 1.0
    ellipses = tuple(
        Ellipse((x0, y0), (a, b), phi * scale, rho)
        for x0, y0, a, b, phi, rho in table["ellipses"]
    )
    _LOGGER.debug("Loaded phantom %s v%s", name, table.get("version"))
    return PhantomSpec(ellipses, name=table.get("name", name))


def radon_ellipse(spec: PhantomSpec, theta, s) -> np.ndarray:
    """Exact Radon transform of the ellipse sum along x . (cos t, sin t) = s.

    `theta` and `s` broadcast against each other.
    """
    theta = np.asarray(theta, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > 1.0):
        raise InvalidArgument("offsets must lie in [-1, 1]")
    total = np.zeros(np.broadcast(theta, s).shape)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    for e in spec.ellipses:
        a, b = e.axes
        shifted = s - (e.center[0] * cos_t + e.center[1] * sin_t)
        a2 = (a * np.cos(theta - e.angle)) ** 2 + (b * np.sin(theta - e.angle)) ** 2
        gap = np.clip(a2 - shifted * shifted, 0.0, None)
        total = total + 2.0 * e.intensity * a * b * np.sqrt(gap) / a2
    return total


def shepp_logan_dataset(
    n: int, p: int, phantom: PhantomSpec | None = None
) -> PointCloud:
    """Discretized projections of a phantom at n equispaced angles.

    Row i samples R_{theta_i} f at s_j = -1 + 2(j-1)/(p-1).
    """
    _check_count(n, 8)
    if int(p) != p or p < 2:
        raise InvalidArgument(f"p must be an integer >= 2, got {p}")
    phantom = phantom or load_phantom("shepp_logan")
    theta = TWO_PI * np.arange(1, n + 1) / n
    s = np.linspace(-1.0, 1.0, p)
    points = radon_ellipse(phantom, theta[:, None], s[None, :])
    return PointCloud(
        points,
        intrinsic_dim=1,
        params=theta,
        meta={"sampler": SAMPLER_SHEPP_LOGAN, "n": n, "p": p, "phantom": phantom.name},
    )
