from dataclasses import dataclass

import numpy as np

from riccati_lab.core.errors import InputError
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.quadrature import quadrature


@dataclass(frozen=True)
class WeightedNorm:
    """e^{-rt}-weighted sup or L^p norm of a path."""

    rate: float = 0.0
    mode: str = "sup"
    p: float = 2.0

    def __post_init__(self):
        if self.rate < 0:
            raise InputError(f"weight rate must be >= 0, got {self.rate}")
        if self.mode not in ("sup", "lp"):
            raise InputError(f"norm mode must be 'sup' or 'lp', got {self.mode!r}")
        if self.p < 1:
            raise InputError(f"L^p exponent must be >= 1, got {self.p}")


def pointwise_norms(values) -> np.ndarray:
    """Euclidean norm of vectors, spectral norm of matrices, per time node."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return np.abs(values)
    if values.ndim == 2:
        return np.linalg.norm(values, axis=1)
    return np.linalg.norm(values, ord=2, axis=(1, 2))


def weighted_norm(
    values,
    grid: TimeGrid,
    w: WeightedNorm,
    A=None,
    eps: float = 0.0,
    rule: str = "simpson",
) -> float:
    """Norm of a sampled path; with ``A`` and ``eps`` the pointwise norm is
    the D(A^eps) norm ||(-A)^eps y(t)||."""
    values = np.asarray(values, dtype=float)
    if values.size == 0 or values.shape[0] != grid.size:
        raise InputError("path must be nonempty and sampled on the grid")
    if eps != 0:
        if A is None:
            raise InputError("a D(A^eps) norm needs the generator")
        Ae = fractional_power(A, eps)
        values = np.einsum("ij,kj...->ki...", Ae, values)
    scaled = np.exp(-w.rate * grid.nodes) * pointwise_norms(values)
    if w.mode == "sup":
        return float(np.max(scaled))
    return float(quadrature(scaled**w.p, grid, rule) ** (1.0 / w.p))
