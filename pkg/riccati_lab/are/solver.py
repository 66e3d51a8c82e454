"""Two independent solvers for A^T P + P A - P B B^T P + R^T R = 0."""

import logging

import numpy as np
import scipy.linalg as la

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import HorizonMismatch, SolverError
from riccati_lab.are.residuals import are_algebraic_residual
from riccati_lab.are.solution import AreSolution
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.lyapunov import riccati_newton
from riccati_lab.numkernel.spectral import symmetrize

logger = logging.getLogger(__name__)


def _require_infinite(model: LqModel):
    if not model.is_infinite:
        raise HorizonMismatch(
            f"horizon mismatch: the algebraic equation needs T = inf, model has T = {model.T}"
        )


def _finish(P: np.ndarray, model: LqModel, method: str, iterations: int = 0) -> AreSolution:
    P = symmetrize(P)
    residual, scale = are_algebraic_residual(P, model)
    sol = AreSolution.build(P, model, method, residual=residual, iterations=iterations)
    if residual > tol.ARE_RESIDUAL * scale:
        raise SolverError(
            f"{method}: residual {residual:.3e} above {tol.ARE_RESIDUAL:g} x {scale:.3e}"
        )
    lowest = float(np.min(np.linalg.eigvalsh(P)))
    if lowest < tol.PSD_FLOOR * max(1.0, np.linalg.norm(P, 2)):
        raise SolverError(f"{method}: solution is not positive semidefinite ({lowest:.3e})")
    if sol.closed_loop_abscissa >= 0:
        raise SolverError(f"{method}: closed loop A - B B^T P is not stable")
    logger.debug(
        "%s: residual %.3e (scale %.3e), %d iterations", method, residual, scale, iterations
    )
    return sol


def solve_are_newton(
    model: LqModel, tol_step: float = tol.NEWTON_TOL, max_iter: int = tol.NEWTON_MAX_ITER
) -> AreSolution:
    """Newton-Kleinman from P0 = 0, a stabilizing start because A is stable."""
    _require_infinite(model)
    P, iterations = riccati_newton(
        model.A, model.BBt, model.RtR, X0=None, tol_step=tol_step, max_iter=max_iter
    )
    return _finish(P, model, "newton", iterations)


def solve_are_spectral(model: LqModel) -> AreSolution:
    """Stable invariant subspace of the Hamiltonian via an ordered Schur form."""
    _require_infinite(model)
    n = model.n
    H = np.block([[model.A, -model.BBt], [-model.RtR, -model.A.T]])
    eigenvalues = la.eigvals(H)
    gap = float(np.min(np.abs(eigenvalues.real)))
    if gap <= tol.HAMILTONIAN_AXIS * max(1.0, np.linalg.norm(H, 2)):
        raise SolverError(f"Hamiltonian has eigenvalues on the imaginary axis (gap {gap:.3e})")
    _, Z, sdim = la.schur(H, output="real", sort="lhp")
    if sdim != n:
        raise SolverError(f"stable invariant subspace has dimension {sdim}, expected {n}")
    X, Y = Z[:n, :n], Z[n:, :n]
    cond = float(np.linalg.cond(X))
    if cond > tol.SUBSPACE_COND_MAX:
        raise SolverError(f"stable subspace basis is singular (condition {cond:.3e})")
    P = la.solve(X.T, Y.T).T
    return _finish(P, model, "spectral")
