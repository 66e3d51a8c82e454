import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError
from riccati_lab.numkernel.spectral import SpectralData, as_square, spectral_data


def fractional_power(A, alpha: float, spec: SpectralData | None = None) -> np.ndarray:
    """(-A)^alpha for a stable diagonalizable A, principal branch."""
    A = as_square(A)
    if not -1.0 < alpha < 1.0:
        raise InputError(f"fractional exponent must lie in (-1, 1), got {alpha}")
    n = A.shape[0]
    if alpha == 0 or n == 0:
        return np.eye(n)
    spec = spec if spec is not None else spectral_data(A)
    if np.any(spec.eigenvalues.real >= 0):
        raise InputError("fractional powers need every eigenvalue in Re < 0")
    if spec.condition > tol.FRACTIONAL_COND_MAX:
        raise InputError(
            f"generator is numerically defective (eigenvector condition {spec.condition:.3g})"
        )
    return spec.apply(np.power(-spec.eigenvalues.astype(complex), alpha))


def domain_norm(A, eps: float, vectors, spec: SpectralData | None = None) -> np.ndarray:
    """D(A^eps) norms ||(-A)^eps x|| of the rows of ``vectors``."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if eps == 0:
        return np.linalg.norm(vectors, axis=-1)
    Ae = fractional_power(A, eps, spec)
    return np.linalg.norm(vectors @ Ae.T, axis=-1)
