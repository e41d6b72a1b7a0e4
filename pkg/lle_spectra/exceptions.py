# File: lle_spectra/exceptions.py
"""Errors raised by the LLE spectra library."""
from __future__ import annotations

import numpy as np


class LLESpectraError(Exception):
    """Base error for the library."""


class InvalidArgument(LLESpectraError, ValueError):
    """Error to indicate an argument outside its documented domain."""


class EmptyNeighborhood(LLESpectraError):
    """Error to indicate a point without neighbors."""

    def __init__(self, index: int) -> None:
        super().__init__(f"point {index} has an empty neighborhood")
        self.index = index


class DegenerateLocalGeometry(LLESpectraError):
    """Error to indicate a local Gram matrix that cannot be inverted."""

    def __init__(self, index: int | None, reason: str = "rank 0 with c=0") -> None:
        where = "local data" if index is None else f"point {index}"
        super().__init__(f"degenerate local geometry at {where}: {reason}")
        self.index = index


class IllConditionedPoint(LLESpectraError):
    """Error to indicate a vanishing barycentric denominator."""

    def __init__(self, index: int | None, denominator: float) -> None:
        where = "local data" if index is None else f"point {index}"
        super().__init__(
            f"ill-conditioned weights at {where}: denominator {denominator:.3e}"
        )
        self.index = index
        self.denominator = denominator


class DegenerateAssembly(LLESpectraError):
    """Error to indicate too many skipped points during W assembly."""

    def __init__(self, skipped: list[int], n: int) -> None:
        super().__init__(f"{len(skipped)} of {n} points could not be weighted")
        self.skipped = skipped
        self.n = n


class SolverNotConverged(LLESpectraError):
    """Error to indicate an eigensolver that stopped early, with what it found."""

    def __init__(
        self,
        message: str,
        eigenvalues: np.ndarray,
        eigenvectors: np.ndarray | None,
        residuals: np.ndarray,
    ) -> None:
        super().__init__(message)
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.residuals = residuals
