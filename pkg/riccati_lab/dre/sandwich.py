"""Finite-horizon value sandwich for a candidate path Q on [s, T].

upper gap = J_s(u_hat) - (Q(s)x, x), lower gap = (Q(s)x, x) - J_s(u_Q)
with u_Q = -B^T Q y along the Q closed loop. A candidate in the class
that solves the integral equation has both gaps at quadrature level.
"""

import logging

import numpy as np

from riccati_lab.are.sandwich import SandwichResult
from riccati_lab.core.errors import InputError
from riccati_lab.dre.solution import MatrixPath
from riccati_lab.dre.solver import reference_integrator, solve_dre
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.synthesis.closed_loop import closed_loop_ode

logger = logging.getLogger(__name__)


def dre_value_sandwich(
    Q: MatrixPath, model: LqModel, x, s: float = 0.0, reference: MatrixPath | None = None
) -> SandwichResult:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise InputError(f"state must have {model.n} entries")
    if reference is None:
        steps = Q.grid.size - 1
        reference = solve_dre(model, steps, reference_integrator(model, steps, Q.T), T=Q.T)
    if not np.array_equal(reference.grid.nodes, Q.grid.nodes):
        raise InputError("candidate and reference must share one grid")
    grid = TimeGrid.from_nodes(Q.grid.window(s, Q.T))
    if grid.size < 2:
        return SandwichResult(0.0, 0.0, float(x @ Q.at(s) @ x))

    value = float(x @ Q.at(s) @ x)
    optimal = closed_loop_ode(model, reference, x, grid).cost
    candidate = closed_loop_ode(model, Q, x, grid).cost
    upper, lower = optimal - value, value - candidate
    logger.debug("finite-horizon sandwich at s=%g: upper %.3e, lower %.3e", s, upper, lower)
    return SandwichResult(upper_gap=upper, lower_gap=lower, candidate_value=value)
