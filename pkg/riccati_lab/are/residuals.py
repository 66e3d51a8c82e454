import numpy as np
import scipy.linalg as la

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import semigroup_stack
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.quadrature import quadrature

INTEGRAL_STEP = 1e-3


def _matrix(sol) -> np.ndarray:
    return np.asarray(getattr(sol, "P", sol), dtype=float)


def are_algebraic_residual(sol, model: LqModel) -> tuple[float, float]:
    """||A^T P + P A - P S P + W|| and the scale it is measured against."""
    P = _matrix(sol)
    A, S, W = model.A, model.BBt, model.RtR
    residual = np.linalg.norm(A.T @ P + P @ A - P @ S @ P + W)
    scale = (
        2 * np.linalg.norm(A) * np.linalg.norm(P)
        + np.linalg.norm(P) ** 2 * np.linalg.norm(S)
        + np.linalg.norm(W)
    )
    return float(residual), float(max(scale, 1.0))


def are_integral_residual(
    sol,
    model: LqModel,
    s: float,
    t: float,
    x,
    y,
    step: float = INTEGRAL_STEP,
    rule: str = "graded",
) -> float:
    """Integrated ARE on [s, t] tested against (x, y).

    The graded rule resolves the fast modes near r = 0; "simpson" uses a
    uniform grid of the given step.
    """
    if s > t:
        raise InputError(f"need s <= t, got s={s}, t={t}")
    if t == s:
        return 0.0
    P = _matrix(sol)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if rule == "graded":
        grid = TimeGrid.graded(0.0, t - s)
    else:
        steps = max(2, int(np.ceil((t - s) / step)))
        steps += steps % 2
        grid = TimeGrid.uniform(0.0, t - s, steps)
    E = semigroup_stack(model.A, np.append(grid.nodes, t - s), model.spectral)
    ex, ey = E[:-1] @ x, E[:-1] @ y
    end_x, end_y = E[-1] @ x, E[-1] @ y
    K = model.B.T @ P
    gained = np.sum((ex @ K.T) * (ey @ K.T), axis=1)
    observed = np.sum((ex @ model.R.T) * (ey @ model.R.T), axis=1)
    ends = end_y @ P @ end_x - y @ P @ x
    value = ends - quadrature(gained, grid, rule) + quadrature(observed, grid, rule)
    return float(abs(value))


def generator_identity_check(sol, model: LqModel) -> float:
    """||A (I - A^{-1} B B^T P) - (A - B B^T P)||."""
    P = _matrix(sol)
    n = model.n
    SP = model.BBt @ P
    return float(np.linalg.norm(model.A @ (np.eye(n) - la.solve(model.A, SP)) - (model.A - SP)))


def check_class_q(sol, model: LqModel, eps: float | None = None) -> dict:
    P = _matrix(sol)
    eps = model.assumption.epsilon if eps is None else eps
    scale = max(1.0, float(np.max(np.abs(P))))
    asym = float(np.max(np.abs(P - P.T)))
    lowest = float(np.min(np.linalg.eigvalsh(0.5 * (P + P.T))))
    V = model.B.T @ P @ fractional_power(model.A, -eps, model.spectral)
    gain = float(np.linalg.norm(V, 2)) if V.size else 0.0
    return {
        "symmetry": (asym <= tol.SYMMETRY * scale, asym),
        "psd": (lowest >= tol.PSD_FLOOR * scale, lowest),
        "gain_bounded": (bool(np.isfinite(gain)), gain),
    }
