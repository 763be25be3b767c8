"""Normalized Gaussian radial basis functions over the phase variable.

The same m basis functions serve every stacked dimension; the full basis
matrix at one phase is block-diagonal with one m-wide block per dimension.
Weight vectors are stacked dimension-major: ``w = [w_dim0, w_dim1, ...]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PhaseClampWarning, SchemaError

DEFAULT_BASIS_COUNT = 20


def default_bandwidth(m: int) -> float:
    return 1.0 / (m - 1)


@dataclass(frozen=True)
class BasisConfig:
    """Shape of the basis: count, centers, bandwidth and stacked dimension."""

    m: int
    centers: np.ndarray
    bandwidth: float
    n: int

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        centers.flags.writeable = False
        if self.m < 2:
            raise SchemaError("at least 2 basis functions are required")
        if centers.shape != (self.m,):
            raise SchemaError(f"expected {self.m} centers, got shape {centers.shape}")
        if np.any(np.diff(centers) < 0) or centers[0] < 0 or centers[-1] > 1:
            raise SchemaError("centers must be sorted within [0, 1]")
        if self.bandwidth <= 0:
            raise SchemaError("bandwidth must be positive")
        if self.n < 1:
            raise SchemaError("stacked dimension must be at least 1")
        object.__setattr__(self, "centers", centers)

    @staticmethod
    def default(n: int, m: int = DEFAULT_BASIS_COUNT, bandwidth: float | None = None) -> "BasisConfig":
        if bandwidth is None:
            bandwidth = default_bandwidth(m)
        return BasisConfig(m=m, centers=np.linspace(0.0, 1.0, m), bandwidth=bandwidth, n=n)

    @property
    def size(self) -> int:
        return self.n * self.m


def clamp_phase(phase, warn: bool = True):
    """Clamp phases into [0, 1]; execution scrubbing may overshoot by a sample."""
    arr = np.asarray(phase, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        if warn:
            warnings.warn("phase outside [0, 1] clamped", PhaseClampWarning, stacklevel=3)
        arr = np.clip(arr, 0.0, 1.0)
    return arr


def basis_row(basis: BasisConfig, phase) -> np.ndarray:
    """Normalized RBF activations, shape (..., m); rows sum to 1."""
    ph = clamp_phase(phase)
    ph = np.atleast_1d(ph)
    z = (ph[..., None] - basis.centers) / basis.bandwidth
    raw = np.exp(-0.5 * z * z)
    return raw / raw.sum(axis=-1, keepdims=True)


def eval_basis(basis: BasisConfig, phase: float) -> np.ndarray:
    """Block-diagonal basis matrix at one phase, shape (n, n*m).

    Row d carries the m activations in columns ``d*m:(d+1)*m``.
    """
    row = basis_row(basis, phase)[0]
    out = np.zeros((basis.n, basis.size))
    for d in range(basis.n):
        out[d, d * basis.m:(d + 1) * basis.m] = row
    return out


def design_matrix(basis: BasisConfig, phases: np.ndarray) -> np.ndarray:
    """Per-dimension design matrix over many phases, shape (T, m).

    The block-diagonal structure makes the stacked regression separable:
    the same (T, m) block serves every dimension.
    """
    return basis_row(basis, np.asarray(phases, dtype=float))
