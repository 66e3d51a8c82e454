"""Integral forms of the Riccati equation and properties of its solution.

All time integrals run over the solution grid restricted to [s, t]
(Simpson's rule); semigroup factors are exact.
"""

import logging

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError
from riccati_lab.core.parallel import ordered_map
from riccati_lab.core.seeding import unit_probes
from riccati_lab.dre.solution import DreSolution, MatrixPath
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import semigroup_stack
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.ode import rk4_linear
from riccati_lab.numkernel.quadrature import quadrature

logger = logging.getLogger(__name__)


def _check_interval(Q: MatrixPath, s: float, t: float):
    if s > t:
        raise InputError(f"need s <= t, got s={s}, t={t}")
    if s < Q.grid.t0 - 1e-12 or t > Q.T * (1 + 1e-12):
        raise InputError(f"[{s}, {t}] outside the solution span [{Q.grid.t0}, {Q.T}]")


def _window(Q: MatrixPath, model: LqModel, s: float, t: float):
    nodes, Qs = Q.window(s, t)
    E = semigroup_stack(model.A, nodes - s, model.spectral)
    return nodes, Qs, E


def ire_residual(Q: MatrixPath, model: LqModel, s: float, t: float, x, y) -> float:
    _check_interval(Q, s, t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if t == s:
        return 0.0
    nodes, Qs, E = _window(Q, model, s, t)
    ex, ey = E @ x, E @ y
    observed = np.sum((ex @ model.R.T) * (ey @ model.R.T), axis=1)
    Kx = np.einsum("ji,kjl,kl->ki", model.B, Qs, ex)
    Ky = np.einsum("ji,kjl,kl->ki", model.B, Qs, ey)
    gained = np.sum(Kx * Ky, axis=1)
    grid = TimeGrid.from_nodes(nodes)
    ends = ey[-1] @ Qs[-1] @ ex[-1] - y @ Qs[0] @ x
    value = ends + quadrature(observed, grid, "simpson") - quadrature(gained, grid, "simpson")
    return float(abs(value))


def ire_strong_residual(Q: MatrixPath, model: LqModel, s: float, t: float) -> float:
    _check_interval(Q, s, t)
    if t == s:
        return 0.0
    nodes, Qs, E = _window(Q, model, s, t)
    S, W = model.BBt, model.RtR
    inner = W - Qs @ S @ Qs
    integrand = np.swapaxes(E, 1, 2) @ inner @ E
    grid = TimeGrid.from_nodes(nodes)
    M = E[-1].T @ Qs[-1] @ E[-1] - Qs[0] + quadrature(integrand, grid, "simpson")
    return float(np.linalg.norm(M, 2))


def closed_loop_matrix(Q: MatrixPath, model: LqModel):
    return lambda r: model.A - model.BBt @ Q.at(r)


def evolution_apply(Q: MatrixPath, model: LqModel, t0: float, t: float, x) -> np.ndarray:
    """Phi(t, t0) x for y' = (A - B B^T Q(r)) y on the grid nodes of [t0, t]."""
    _check_interval(Q, t0, t)
    nodes = Q.grid.window(t0, t)
    return rk4_linear(closed_loop_matrix(Q, model), nodes, x)[-1]


def evolution_property_residual(
    sol: MatrixPath, model: LqModel, t0: float, sigma: float, t: float, x
) -> float:
    """||Phi(t, sigma) Phi(sigma, t0) x - Phi(t, t0) x|| / (1 + ||x||)."""
    if not t0 <= sigma <= t:
        raise InputError(f"need t0 <= sigma <= t, got {t0}, {sigma}, {t}")
    x = np.asarray(x, dtype=float)
    two_legs = evolution_apply(sol, model, sigma, t, evolution_apply(sol, model, t0, sigma, x))
    direct = evolution_apply(sol, model, t0, t, x)
    return float(np.linalg.norm(two_legs - direct) / (1.0 + np.linalg.norm(x)))


def opric_selfconsistency(
    sol: MatrixPath, model: LqModel, t: float, probes: int = 8, seed: int = 0
) -> float:
    """max over unit x of ||P(t)x - int_t^T e^{A^T(r-t)} R^T R Phi(r, t)x dr||."""
    _check_interval(sol, t, sol.T)
    if t >= sol.T:
        return 0.0
    nodes = sol.grid.window(t, sol.T)
    grid = TimeGrid.from_nodes(nodes)
    E = semigroup_stack(model.A, nodes - t, model.spectral)
    Pt = sol.at(t)
    matrix_at = closed_loop_matrix(sol, model)

    def one(x):
        Phi = rk4_linear(matrix_at, nodes, x)
        integrand = np.einsum("kji,jl,kl->ki", E, model.RtR, Phi)
        return float(np.linalg.norm(Pt @ x - quadrature(integrand, grid, "simpson")))

    residuals = ordered_map(one, list(unit_probes(model.n, probes, seed)))
    return max(residuals)


def gain_square_integrability(
    sol: MatrixPath, model: LqModel, s: float, x
) -> tuple[float, float]:
    """(int_s^T ||B^T P(r) e^{A(r-s)} x||^2 dr, int_s^T ||R e^{A(r-s)} x||^2 dr)."""
    _check_interval(sol, s, sol.T)
    if s >= sol.T:
        return 0.0, 0.0
    nodes, Ps, E = _window(sol, model, s, sol.T)
    ex = E @ np.asarray(x, dtype=float)
    K = np.einsum("ji,kjl,kl->ki", model.B, Ps, ex)
    grid = TimeGrid.from_nodes(nodes)
    gain = quadrature(np.sum(K**2, axis=1), grid, "simpson")
    observed = quadrature(np.sum((ex @ model.R.T) ** 2, axis=1), grid, "simpson")
    return float(gain), float(observed)


def gain_norms(Q: MatrixPath, model: LqModel, eps: float) -> np.ndarray:
    """||B^T Q(t) (-A)^{-eps}|| at every node."""
    Ainv = fractional_power(model.A, -eps, model.spectral)
    V = np.einsum("ji,kjl,lm->kim", model.B, Q.values, Ainv)
    if V.shape[1] == 0:
        return np.zeros(Q.grid.size)
    return np.linalg.norm(V, ord=2, axis=(1, 2))


def check_class_qt(Q: MatrixPath, model: LqModel, eps: float | None = None) -> dict:
    """The five class conditions: name -> (passed, measured value)."""
    eps = model.assumption.epsilon if eps is None else eps
    values = Q.values
    scale = max(1.0, float(np.max(np.abs(values))))
    if Q.grid.size > 1:
        jumps = np.linalg.norm(np.diff(values, axis=0), ord=2, axis=(1, 2))
    else:
        jumps = [0.0]
    jump = float(np.max(jumps))
    asym = float(np.max(np.abs(values - np.swapaxes(values, 1, 2))))
    lowest = float(np.min(np.linalg.eigvalsh(0.5 * (values + np.swapaxes(values, 1, 2)))))
    terminal = float(np.linalg.norm(values[-1]))
    gain = float(np.max(gain_norms(Q, model, eps)))
    checks = {
        "continuity": (jump <= tol.QT_JUMP * scale, jump),
        "symmetry": (asym <= tol.SYMMETRY * scale, asym),
        "psd": (lowest >= tol.PSD_FLOOR * scale, lowest),
        "terminal_zero": (terminal <= tol.SYMMETRY * scale, terminal),
        "gain_bounded": (bool(np.isfinite(gain)), gain),
    }
    failed = [name for name, (ok, _) in checks.items() if not ok]
    if failed:
        logger.warning("class check failed: %s", ", ".join(failed))
    return checks
