"""The fundamental identity along an arbitrary control:

    (Q(t) y(t), y(t)) - (Q(s) x, x)
        = -int_s^t (||R y||^2 + ||u||^2) dr + int_s^t ||u + B^T Q y||^2 dr

It holds for solutions of the integral Riccati equation only, so the
candidate is prechecked first.
"""

import logging
from dataclasses import dataclass

import numpy as np

from riccati_lab.are.residuals import are_algebraic_residual
from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError, PrecheckFailed
from riccati_lab.dre.residuals import ire_strong_residual
from riccati_lab.dre.solution import MatrixPath
from riccati_lab.models.lq_model import LqModel
from riccati_lab.semiflow.input_to_state import ZohPropagator
from riccati_lab.semiflow.paths import ControlPath
from riccati_lab.synthesis.closed_loop import resolving_step
from riccati_lab.synthesis.gains import as_gain_source, check_span, constant_value, is_constant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdentityTerms:
    lhs: float
    cost: float
    completed_square: float

    @property
    def rhs(self) -> float:
        return -self.cost + self.completed_square

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def precheck_residual(source, model: LqModel, s: float, t: float) -> tuple[float, float]:
    """Integral-equation residual of the candidate and the limit it must stay under."""
    source = as_gain_source(source)
    if is_constant(source):
        residual, scale = are_algebraic_residual(constant_value(source), model)
        return residual, tol.ARE_RESIDUAL * scale
    residual = ire_strong_residual(source, model, s, t)
    return residual, tol.IRE_RESIDUAL * max(1.0, float(np.max(np.abs(source.values))))


def precheck(source, model: LqModel, s: float, t: float) -> float:
    """Raises PrecheckFailed unless the candidate solves its Riccati equation."""
    residual, limit = precheck_residual(source, model, s, t)
    if residual > limit:
        raise PrecheckFailed(
            f"candidate fails its Riccati precheck (residual {residual:.3e} > {limit:.3e})"
        )
    return residual


def _integration_nodes(source, u: ControlPath, s: float, t: float, max_step: float) -> np.ndarray:
    nodes = u.grid.window(s, t)
    if isinstance(source, MatrixPath):
        nodes = np.union1d(nodes, source.grid.window(s, t))
        span = max(1.0, abs(t))
        keep = np.concatenate([[True], np.diff(nodes) > 1e-12 * span])
        nodes = nodes[keep]
    # split intervals longer than max_step evenly
    pieces = np.maximum(1, np.ceil(np.diff(nodes) / max_step).astype(int))
    if np.all(pieces == 1):
        return nodes
    refined = [np.linspace(a, b, k + 1)[:-1] for a, b, k in zip(nodes[:-1], nodes[1:], pieces)]
    return np.append(np.concatenate(refined), nodes[-1])


def fundamental_identity_terms(
    Qsource, model: LqModel, u: ControlPath, x, s: float, t: float, check: bool = True
) -> IdentityTerms:
    """Both sides of the identity, integrated per interval with Simpson's rule.

    The integration nodes merge the control breakpoints with the solution
    grid, so every interval sees a constant control and a smooth Q.
    """
    source = as_gain_source(Qsource)
    x = np.asarray(x, dtype=float)
    if s > t:
        raise InputError(f"need s <= t, got s={s}, t={t}")
    if u.m != model.m or x.shape != (model.n,):
        raise InputError("control or initial state does not match the model")
    check_span(source, s, t)
    if check:
        precheck(source, model, s, t)
    if t == s:
        return IdentityTerms(0.0, 0.0, 0.0)

    nodes = _integration_nodes(source, u, s, t, resolving_step(model))
    propagator = ZohPropagator(model)
    B, R = model.B, model.R
    y = x.copy()
    cost = square = 0.0
    for k in range(nodes.size - 1):
        a, b = nodes[k], nodes[k + 1]
        h = b - a
        uk = u.at(a)
        y_mid = propagator.step(y, 0.5 * h, uk)
        y_end = propagator.step(y, h, uk)
        f_cost = []
        f_square = []
        for r, yr in ((a, y), (a + 0.5 * h, y_mid), (b, y_end)):
            Ry = R @ yr
            f_cost.append(float(Ry @ Ry + uk @ uk))
            v = uk + B.T @ (source.at(r) @ yr)
            f_square.append(float(v @ v))
        cost += h / 6.0 * (f_cost[0] + 4 * f_cost[1] + f_cost[2])
        square += h / 6.0 * (f_square[0] + 4 * f_square[1] + f_square[2])
        y = y_end
    lhs = float(y @ source.at(t) @ y - x @ source.at(s) @ x)
    return IdentityTerms(lhs=lhs, cost=cost, completed_square=square)


def fundamental_identity_residual(
    Qsource, model: LqModel, u: ControlPath, x, s: float, t: float
) -> float:
    terms = fundamental_identity_terms(Qsource, model, u, x, s, t)
    logger.debug(
        "identity on [%g, %g]: lhs=%.10g rhs=%.10g", s, t, terms.lhs, terms.rhs
    )
    return terms.residual
