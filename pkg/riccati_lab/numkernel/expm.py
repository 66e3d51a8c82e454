"""Semigroup evaluation e^{At}.

Well-conditioned diagonalizable generators go through their eigenbasis;
everything else (defective or nearly so) through ``scipy.linalg.expm``,
the scaling-and-squaring Pade implementation.
"""

import numpy as np
import scipy.linalg as la

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError
from riccati_lab.numkernel.spectral import (
    SpectralData,
    as_matrix,
    as_square,
    spectral_data,
)


def _usable(spec: SpectralData | None) -> bool:
    return (
        spec is not None
        and spec.condition <= tol.EXPM_SPECTRAL_COND_MAX
        and spec.reconstruction <= tol.SPECTRAL_RECONSTRUCTION
    )


def matrix_exponential_apply(A, t: float, X, spec: SpectralData | None = None):
    A = as_square(A)
    X = as_matrix(X, "X")
    if X.shape[0] != A.shape[0]:
        raise InputError(f"dimension mismatch: A is {A.shape}, X is {X.shape}")
    if not np.isfinite(t) or t < 0:
        raise InputError(f"semigroup time must be finite and >= 0, got {t}")
    if t == 0:
        return X.copy()
    spec = spec if spec is not None else spectral_data(A)
    if _usable(spec):
        return spec.apply(np.exp(spec.eigenvalues * t)) @ X
    return la.expm(A * t) @ X


def semigroup_stack(A, times, spec: SpectralData | None = None) -> np.ndarray:
    """Array of shape (len(times), n, n) holding e^{A t_k}."""
    A = as_square(A)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise InputError("semigroup times must be >= 0")
    n = A.shape[0]
    if n == 0:
        return np.zeros((times.size, 0, 0))
    spec = spec if spec is not None else spectral_data(A)
    if _usable(spec):
        E = np.exp(np.outer(times, spec.eigenvalues))
        out = np.einsum("ij,kj,jl->kil", spec.basis, E, spec.inverse)
        return out.real.copy() if np.iscomplexobj(out) else out
    return np.array([la.expm(A * t) for t in times])


def input_gramian_blocks(A, B, h: float):
    """Exact one-step integrals for polynomial inputs on [0, h].

    Returns (e^{Ah}, P0, P1, P2) with Pk = int_0^h e^{A(h-s)} B s^k ds,
    read off one augmented exponential.
    """
    A = as_square(A)
    B = as_matrix(B, "B")
    n, m = B.shape
    if h <= 0:
        raise InputError(f"step must be positive, got {h}")
    size = n + 3 * m
    M = np.zeros((size, size))
    M[:n, :n] = A
    M[:n, n : n + m] = B
    M[n : n + m, n + m : n + 2 * m] = np.eye(m)
    M[n + m : n + 2 * m, n + 2 * m :] = np.eye(m)
    E = la.expm(M * h)
    F = E[:n, :n]
    P0 = E[:n, n : n + m]
    P1 = E[:n, n + m : n + 2 * m]
    P2 = 2.0 * E[:n, n + 2 * m :]
    return F, P0, P1, P2
