"""Two-sided cost comparison for a candidate solution Q of the ARE.

    upper gap = J(u_hat) - (Qx, x)      u_hat the optimal feedback
    lower gap = (Qx, x) - J(u_Q)        u_Q = -B^T Q y along y' = (A - B B^T Q) y

Costs are integrated by quadrature on a window of at most grid_steps
resolving steps inside [0, T_trunc] and completed with the exact tail
y(T)^T X y(T), X the Lyapunov solution of the stable closed loop.
Both gaps vanish exactly when (Qx, x) = (Px, x).
"""

import logging
from dataclasses import dataclass

import numpy as np

from riccati_lab.are.solver import solve_are_newton
from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import CandidateOutsideClosedLoop, InputError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import matrix_exponential_apply
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.lyapunov import solve_lyapunov
from riccati_lab.numkernel.quadrature import truncation_horizon
from riccati_lab.numkernel.spectral import spectral_abscissa
from riccati_lab.synthesis.closed_loop import closed_loop_ode, resolving_step
from riccati_lab.synthesis.gains import ConstantGain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SandwichResult:
    upper_gap: float
    lower_gap: float
    candidate_value: float

    def passed(self, tolerance: float = tol.SANDWICH_GAP) -> bool:
        return abs(self.upper_gap) <= tolerance and abs(self.lower_gap) <= tolerance

    @property
    def worst_gap(self) -> float:
        return max(abs(self.upper_gap), abs(self.lower_gap))


def infinite_feedback_cost(model: LqModel, Q: np.ndarray, x, grid: TimeGrid) -> float:
    """Cost of u = -B^T Q y from x over [0, inf): quadrature plus exact tail."""
    A_cl = model.A - model.BBt @ Q
    if spectral_abscissa(A_cl) >= 0:
        raise CandidateOutsideClosedLoop()
    traj = closed_loop_ode(model, ConstantGain(Q), x, grid)
    X = solve_lyapunov(A_cl, model.RtR + Q @ model.BBt @ Q)
    return float(traj.cost + traj.final @ X @ traj.final)


def value_sandwich_test(
    Q,
    model: LqModel,
    x,
    T_trunc: float | None = None,
    grid_steps: int = 4000,
    reference=None,
) -> SandwichResult:
    Q = np.asarray(Q, dtype=float)
    x = np.asarray(x, dtype=float)
    if Q.shape != (model.n, model.n) or x.shape != (model.n,):
        raise InputError("candidate or state does not match the model")
    if np.max(np.abs(Q - Q.T)) > tol.SYMMETRY * max(1.0, np.max(np.abs(Q))):
        raise InputError("candidate must be symmetric")
    if np.min(np.linalg.eigvalsh(Q)) < tol.PSD_FLOOR * max(1.0, np.linalg.norm(Q, 2)):
        raise InputError("candidate must be positive semidefinite")
    if T_trunc is None:
        T_trunc = truncation_horizon(model.assumption.omega, model.assumption.M)
    decay = np.linalg.norm(matrix_exponential_apply(model.A, T_trunc, np.eye(model.n)), 2)
    if decay > tol.TRUNCATION_TAIL * (1 + 1e-6):
        raise InputError(
            f"T_trunc={T_trunc:g} too short: ||e^(A T)|| = {decay:.3e} > {tol.TRUNCATION_TAIL:g}"
        )
    reference = reference if reference is not None else solve_are_newton(model)
    P = np.asarray(getattr(reference, "P", reference), dtype=float)
    window = min(T_trunc, grid_steps * resolving_step(model))
    grid = TimeGrid.uniform(0.0, window, grid_steps)

    value = float(x @ Q @ x)
    upper = infinite_feedback_cost(model, P, x, grid) - value
    lower = value - infinite_feedback_cost(model, Q, x, grid)
    logger.debug("value sandwich: upper %.3e, lower %.3e", upper, lower)
    return SandwichResult(upper_gap=upper, lower_gap=lower, candidate_value=value)
