"""Measured constants of the regularity assumptions.

Operator norms into time-function spaces have no closed form; they are
estimated as maxima over seeded unit probes (canonical basis first).
Plain matrix norms at a fixed time are computed exactly by SVD.
"""

import logging

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError, NoSingularComponent
from riccati_lab.core.seeding import unit_probes
from riccati_lab.models.kernel import kernel_stack
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.quadrature import quadrature

logger = logging.getLogger(__name__)


def admissibility_gramian(
    model: LqModel, T: float, levels: int | None = None, points: int = tol.GRADED_POINTS
) -> np.ndarray:
    """int_0^T e^{At} B B^T e^{A^T t} dt on a graded grid."""
    if not T > 0:
        raise InputError(f"admissibility needs T > 0, got {T}")
    if model.m == 0:
        return np.zeros((model.n, model.n))
    grid = TimeGrid.graded(0.0, T, levels=levels, points=points)
    F, G = kernel_stack(model, grid.nodes)
    K = F + G
    return quadrature(np.einsum("kji,kjl->kil", K, K), grid, "graded")


def admissibility_constant(
    model: LqModel,
    T: float,
    probes: int = tol.DEFAULT_PROBES,
    seed: int = 0,
    levels: int | None = None,
    points: int = tol.GRADED_POINTS,
) -> float:
    """max over unit x of int_0^T ||B^T e^{A^T t} x||^2 dt.

    The top eigenvector of the Gramian joins the probe set, so the value is
    its largest eigenvalue.
    """
    W = admissibility_gramian(model, T, levels, points)
    if not np.any(W):
        return 0.0
    W = 0.5 * (W + W.T)
    _, vecs = np.linalg.eigh(W)
    X = np.vstack([unit_probes(model.n, probes, seed), vecs[:, -1]])
    return float(max(np.max(np.einsum("ki,ij,kj->k", X, W, X)), 0.0))


def fit_power_law(times, values) -> tuple[float, float, float]:
    """Least-squares fit values ~ N t^{-gamma} in log-log coordinates.

    Returns (gamma, N, rms of the log residuals).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.size < 2:
        raise InputError("power-law fit needs matching series of length >= 2")
    if np.any(times <= 0) or np.any(values <= 0):
        raise InputError("power-law fit needs positive times and values")
    design = np.column_stack([np.ones_like(times), -np.log(times)])
    coef, *_ = np.linalg.lstsq(design, np.log(values), rcond=None)
    residual = np.log(values) - design @ coef
    return float(coef[1]), float(np.exp(coef[0])), float(np.sqrt(np.mean(residual**2)))


def singular_decay_series(
    model: LqModel, t_min: float, t_max: float, nodes: int
) -> tuple[np.ndarray, np.ndarray]:
    """(t, ||F(t)||) on log-spaced times."""
    if not 0 < t_min < t_max:
        raise InputError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    if nodes < tol.FIT_MIN_NODES:
        raise InputError(f"singular decay fit needs at least {tol.FIT_MIN_NODES} nodes")
    times = np.geomspace(t_min, t_max, nodes)
    if model.m == 0:
        return times, np.zeros(nodes)
    F, _ = kernel_stack(model, times)
    return times, np.linalg.norm(F, ord=2, axis=(1, 2))


def estimate_singular_decay(
    model: LqModel, t_min: float, t_max: float, nodes: int = 32
) -> tuple[float, float, float]:
    times, norms = singular_decay_series(model, t_min, t_max, nodes)
    scale = max(np.linalg.norm(model.B), 1.0)
    if np.all(norms <= tol.ZERO_KERNEL * scale):
        raise NoSingularComponent()
    keep = norms > tol.ZERO_KERNEL * scale
    gamma, N, residual = fit_power_law(times[keep], norms[keep])
    logger.debug("singular decay fit: gamma=%.4f N=%.4g residual=%.2e", gamma, N, residual)
    return gamma, N, residual


def weighted_kernel_Lq(
    model: LqModel,
    delta: float,
    q: float,
    eps: float,
    horizon: float,
    probes: int = tol.DEFAULT_PROBES,
    seed: int = 0,
    levels: int | None = None,
    points: int = tol.GRADED_POINTS,
) -> float:
    """max over unit x of ||e^{delta t} B^T e^{A^T t} ((-A)^T)^eps x||_{L^q(0, horizon)}."""
    if not 1 < q < 2:
        raise InputError(f"q must lie in (1, 2), got {q}")
    if not horizon > 0:
        raise InputError(f"horizon must be positive, got {horizon}")
    if model.is_infinite:
        model.assumption.check_delta(delta)
    if model.m == 0:
        return 0.0
    grid = TimeGrid.graded(0.0, horizon, levels=levels, points=points)
    F, G = kernel_stack(model, grid.nodes)
    K = (F + G) * np.exp(delta * grid.nodes)[:, None, None]
    if eps:
        K = K @ fractional_power(model.A, eps, model.spectral).T
    X = unit_probes(model.n, probes, seed)
    # pointwise |K(t) x|^q for every probe: shape (nodes, probes)
    pointwise = np.linalg.norm(np.einsum("kij,pj->kpi", K, X), axis=2) ** q
    integrals = quadrature(pointwise, grid, "graded")
    return float(np.max(np.maximum(integrals, 0.0)) ** (1.0 / q))


def hyperbolic_remainder_constant(
    model: LqModel, T: float, nodes: int = 64, eps: float | None = None
) -> float:
    """sup_t ||G(t) ((-A)^T)^{-eps}|| on log-spaced times in (0, T]."""
    if not T > 0:
        raise InputError(f"need T > 0, got {T}")
    if model.m == 0:
        return 0.0
    eps = model.assumption.epsilon if eps is None else eps
    times = np.geomspace(min(tol.GRADED_INNER_WIDTH, T), T, nodes)
    _, G = kernel_stack(model, times)
    G = G @ fractional_power(model.A, -eps, model.spectral).T
    return float(np.max(np.linalg.norm(G, ord=2, axis=(1, 2))))


def observation_smoothing_constant(model: LqModel, eps: float | None = None) -> float:
    """||((-A)^T)^eps R^T R (-A)^{-eps}||."""
    eps = model.assumption.epsilon if eps is None else eps
    Ae = fractional_power(model.A, eps, model.spectral)
    Ainv = fractional_power(model.A, -eps, model.spectral)
    return float(np.linalg.norm(Ae.T @ model.RtR @ Ainv, 2))
