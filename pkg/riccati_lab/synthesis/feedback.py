import logging

import numpy as np

from riccati_lab.models.lq_model import LqModel
from riccati_lab.semiflow.paths import ControlPath, Trajectory
from riccati_lab.synthesis.closed_loop import closed_loop_ode, default_grid
from riccati_lab.synthesis.gains import as_gain_source, constant_value, is_constant

logger = logging.getLogger(__name__)


def optimal_tail(model: LqModel, sol, y_end) -> float:
    """(P y(T), y(T)): the optimal cost beyond a truncated infinite horizon."""
    if not (model.is_infinite and is_constant(sol)):
        return 0.0
    return float(y_end @ constant_value(sol) @ y_end)


def feedback_synthesis(
    model: LqModel, sol, x, grid=None
) -> tuple[ControlPath, Trajectory, float]:
    """u_hat = -B^T P y_hat along the closed loop; J_hat = cost (+ exact tail)."""
    source = as_gain_source(sol)
    grid = grid or default_grid(model, source)
    y_hat = closed_loop_ode(model, source, x, grid)
    u_hat = y_hat.controls
    J_hat = float(y_hat.cost + optimal_tail(model, source, y_hat.final))
    logger.debug("feedback synthesis: J_hat = %.12g over [%g, %g]", J_hat, grid.t0, grid.t1)
    return u_hat, y_hat, J_hat


def feedback_mismatch(model: LqModel, sol, u_hat: ControlPath, y_hat: Trajectory) -> float:
    """max_t ||u_hat(t) + B^T P(t) y_hat(t)||, zero by construction."""
    source = as_gain_source(sol)
    K = np.array([model.B.T @ source.at(t) for t in y_hat.grid.nodes])
    v = u_hat.values + np.einsum("kij,kj->ki", K, y_hat.states)
    return float(np.max(np.abs(v))) if v.size else 0.0
