"""Lyapunov solves and the Newton-Kleinman iteration built on them."""

import logging

import numpy as np
import scipy.linalg as la

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import ConvergenceError, InputError, SolverError
from riccati_lab.numkernel.spectral import as_square, spectral_abscissa, symmetrize

logger = logging.getLogger(__name__)


def solve_lyapunov(A, Q, check_stable: bool = True) -> np.ndarray:
    """Symmetric X with A^T X + X A + Q = 0 (Bartels-Stewart)."""
    A = as_square(A)
    Q = as_square(Q, "Q")
    if A.shape != Q.shape:
        raise InputError(f"dimension mismatch: A is {A.shape}, Q is {Q.shape}")
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    if np.linalg.norm(Q - Q.T) > 1e-12 * max(1.0, np.linalg.norm(Q)):
        raise InputError("Lyapunov right-hand side must be symmetric")
    if check_stable and spectral_abscissa(A) >= 0:
        raise SolverError("Lyapunov solve needs a stable A")
    X = symmetrize(la.solve_continuous_lyapunov(A.T, -Q))
    residual = np.linalg.norm(A.T @ X + X @ A + Q)
    scale = np.linalg.norm(A) * np.linalg.norm(X) + np.linalg.norm(Q)
    if residual > tol.LYAPUNOV_RESIDUAL * max(scale, 1e-300):
        logger.warning("Lyapunov residual %.3e above tolerance (scale %.3e)", residual, scale)
    return X


def riccati_newton(
    A,
    S,
    W,
    X0=None,
    tol_step: float = tol.NEWTON_TOL,
    max_iter: int = tol.NEWTON_MAX_ITER,
) -> tuple[np.ndarray, int]:
    """Newton-Kleinman for A^T X + X A - X S X + W = 0.

    Each step solves (A - S X_k)^T X + X (A - S X_k) + W + X_k S X_k = 0.
    ``X0`` must make A - S X0 stable. Returns the solution and the number
    of iterations used.
    """
    A = as_square(A)
    n = A.shape[0]
    X = np.zeros((n, n)) if X0 is None else np.array(X0, dtype=float)
    for k in range(1, max_iter + 1):
        closed = A - S @ X
        try:
            X_new = solve_lyapunov(closed, W + X @ S @ X)
        except SolverError as exc:
            raise SolverError(f"Newton step {k}: closed loop lost stability") from exc
        step = np.linalg.norm(X_new - X)
        X = X_new
        if step <= tol_step * max(1.0, np.linalg.norm(X)):
            logger.debug("Newton-Kleinman converged in %d steps (step %.2e)", k, step)
            return X, k
    raise ConvergenceError(f"Newton-Kleinman did not converge in {max_iter} steps")
