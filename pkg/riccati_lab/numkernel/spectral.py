from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from riccati_lab.core.errors import InputError


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    basis: np.ndarray
    inverse: np.ndarray
    condition: float
    reconstruction: float

    def apply(self, diag: np.ndarray) -> np.ndarray:
        """V diag(d) V^{-1}, real part when the input matrix was real."""
        out = (self.basis * diag) @ self.inverse
        return _realify(out)


def as_matrix(X, name: str = "matrix") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{name} has non-finite entries")
    return X


def as_square(A, name: str = "A") -> np.ndarray:
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"{name} must be square, got shape {A.shape}")
    return A


def spectral_data(A) -> SpectralData:
    A = as_square(A)
    lam, V = la.eig(A)
    try:
        Vinv = la.inv(V)
        cond = float(np.linalg.cond(V))
    except la.LinAlgError:
        return SpectralData(lam, V, np.full_like(V, np.nan), np.inf, np.inf)
    scale = max(np.linalg.norm(A), 1e-300)
    recon = np.linalg.norm((V * lam) @ Vinv - A) / scale
    return SpectralData(lam, V, Vinv, cond, float(recon))


def spectral_abscissa(A) -> float:
    A = as_square(A)
    if A.size == 0:
        return -np.inf
    return float(np.max(la.eigvals(A).real))


def symmetrize(X: np.ndarray) -> np.ndarray:
    return 0.5 * (X + np.swapaxes(X, -1, -2))


def _realify(X: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(X):
        return X.real.copy()
    return X
