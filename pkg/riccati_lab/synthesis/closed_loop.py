"""Closed-loop trajectories y' = (A - B B^T Q(t)) y.

Two routes: direct integration (RK4, or the exact exponential when the
gain is constant) and the Picard iteration for the integral equation

    y(t) = e^{At} x - int_0^t e^{A(t-s)} B B^T Q(s) y(s) ds

measured in the weighted norm sup_t e^{-rt} ||(-A)^eps y(t)||. The iteration
stops once that difference is below tol_fp and the unweighted sup difference
is below tol_window.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import ConvergenceError, InputError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import input_gramian_blocks, semigroup_stack
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.norms import WeightedNorm, weighted_norm
from riccati_lab.numkernel.ode import rk4_linear
from riccati_lab.numkernel.quadrature import truncation_horizon
from riccati_lab.semiflow.paths import ControlPath, Trajectory
from riccati_lab.synthesis.gains import (
    as_gain_source,
    check_span,
    constant_value,
    is_constant,
)
from riccati_lab.synthesis.simulate import trajectory_cost

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3
FAST_MODE_FRACTION = 0.1
MAX_GRID_STEPS = 20000


def default_horizon(model: LqModel, source) -> float:
    source = as_gain_source(source)
    if not is_constant(source):
        return source.T
    if not model.is_infinite:
        return model.T
    return truncation_horizon(model.assumption.omega, model.assumption.M)


def resolving_step(model: LqModel, step: float = DEFAULT_STEP) -> float:
    """Step short enough that h |lambda| <= 0.1 for every mode of A."""
    radius = float(np.max(np.abs(model.spectral.eigenvalues)))
    return min(step, FAST_MODE_FRACTION / max(radius, 1.0))


def default_grid(model: LqModel, source, step: float = DEFAULT_STEP) -> TimeGrid:
    """The solution grid for a path; for a constant gain a resolving grid.

    On an infinite horizon the window stops after MAX_GRID_STEPS steps even
    when the truncation horizon lies further out; callers that need the
    cost beyond it add the exact quadratic tail.
    """
    source = as_gain_source(source)
    if not is_constant(source):
        return source.grid
    T = default_horizon(model, source)
    h = resolving_step(model, step)
    if model.is_infinite:
        T = min(T, MAX_GRID_STEPS * h)
    return TimeGrid.uniform(0.0, T, max(2, int(np.ceil(T / h))))


def feedback_controls(model: LqModel, source, grid: TimeGrid, states) -> np.ndarray:
    """u(t) = -B^T Q(t) y(t) at every node."""
    Qs = np.array([source.at(t) for t in grid.nodes])
    return -np.einsum("ji,kjl,kl->ki", model.B, Qs, states)


def closed_loop_ode(model: LqModel, Qpath, x, grid: TimeGrid | None = None) -> Trajectory:
    source = as_gain_source(Qpath)
    grid = grid or default_grid(model, source)
    check_span(source, grid.t0, grid.t1)
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise InputError(f"initial state must have {model.n} entries, got {x.shape}")
    if is_constant(source):
        A_cl = model.A - model.BBt @ constant_value(source)
        E = semigroup_stack(A_cl, grid.nodes - grid.t0)
        states = E @ x
    else:
        states = rk4_linear(lambda t: model.A - model.BBt @ source.at(t), grid.nodes, x)
    u = feedback_controls(model, source, grid, states)
    return Trajectory(
        grid=grid,
        states=states,
        controls=ControlPath(grid, u),
        cost=trajectory_cost(model, grid, states, u),
    )


@dataclass
class FixedPointTrace:
    iterates: list[Trajectory]
    contraction_factors: list[float]
    rate: float
    converged: bool
    differences: list[float] = field(default_factory=list)

    @property
    def limit(self) -> Trajectory:
        return self.iterates[-1]

    @property
    def iterations(self) -> int:
        return len(self.differences)

    @property
    def median_factor(self) -> float:
        factors = [f for f in self.contraction_factors if np.isfinite(f)]
        return float(np.median(factors)) if factors else 0.0


def _quadratic_coefficients(v: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-interval coefficients of v(t_j + tau) ~ c0 + c1 tau + c2 tau^2.

    Forward stencil (j, j+1, j+2), the last interval uses (j-1, j, j+1).
    """
    N = v.shape[0] - 1
    c0 = v[:-1].copy()
    if N == 1:
        return c0, (v[1] - v[0])[None] / h, np.zeros_like(c0)
    c1 = np.empty_like(c0)
    c2 = np.empty_like(c0)
    c1[: N - 1] = (-3 * v[: N - 1] + 4 * v[1:N] - v[2 : N + 1]) / (2 * h)
    c2[: N - 1] = (v[: N - 1] - 2 * v[1:N] + v[2 : N + 1]) / (2 * h * h)
    c1[N - 1] = (v[N] - v[N - 2]) / (2 * h)
    c2[N - 1] = (v[N] - 2 * v[N - 1] + v[N - 2]) / (2 * h * h)
    return c0, c1, c2


class _Convolution:
    """y -> int_0^t e^{A(t-s)} B v(s) ds on a uniform grid by product integration."""

    def __init__(self, model: LqModel, grid: TimeGrid):
        if not grid.is_uniform():
            raise InputError("closed-loop fixed point needs a uniform grid")
        self.h = float(grid.steps[0])
        self.F, self.P0, self.P1, self.P2 = input_gramian_blocks(model.A, model.B, self.h)
        self.n = model.n

    def __call__(self, v: np.ndarray) -> np.ndarray:
        c0, c1, c2 = _quadratic_coefficients(v, self.h)
        w = c0 @ self.P0.T + c1 @ self.P1.T + c2 @ self.P2.T
        out = np.zeros((v.shape[0], self.n))
        for k in range(1, v.shape[0]):
            out[k] = self.F @ out[k - 1] + w[k - 1]
        return out


def closed_loop_fixed_point(
    model: LqModel,
    Qpath,
    x,
    r: float,
    tol_fp: float = tol.PICARD_TOL,
    tol_window: float = tol.PICARD_WINDOW_TOL,
    max_iter: int = tol.PICARD_MAX_ITER,
    grid: TimeGrid | None = None,
    eps: float | None = None,
    keep_iterates: bool = True,
    raise_on_failure: bool = True,
) -> FixedPointTrace:
    if r < 0:
        raise InputError(f"weight rate must be >= 0, got {r}")
    source = as_gain_source(Qpath)
    grid = grid or default_grid(model, source)
    check_span(source, grid.t0, grid.t1)
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise InputError(f"initial state must have {model.n} entries, got {x.shape}")
    eps = model.assumption.epsilon if eps is None else eps
    norm = WeightedNorm(rate=r, mode="sup")
    plain = WeightedNorm(rate=0.0, mode="sup")

    free = semigroup_stack(model.A, grid.nodes - grid.t0, model.spectral) @ x
    if model.m == 0:
        traj = Trajectory(grid, free)
        return FixedPointTrace([traj], [], r, True, [0.0])
    Ks = np.array([model.B.T @ source.at(t) for t in grid.nodes])
    convolve = _Convolution(model, grid)

    y = free
    iterates = [Trajectory(grid, y)]
    differences: list[float] = []
    factors: list[float] = []
    converged = weighted_done = False
    for k in range(max_iter):
        y_next = free - convolve(np.einsum("kij,kj->ki", Ks, y))
        step = y_next - y
        diff = weighted_norm(step, grid, norm, A=model.A, eps=eps)
        scale = max(1.0, weighted_norm(y_next, grid, norm, A=model.A, eps=eps))
        # factors stop once the weighted difference reaches round-off
        if not weighted_done and differences and differences[-1] > 0:
            factors.append(diff / differences[-1])
        differences.append(diff)
        y = y_next
        if keep_iterates:
            iterates.append(Trajectory(grid, y))
        weighted_done = weighted_done or diff <= tol_fp * scale
        if not weighted_done:
            continue
        # e^{-rt} hides late-time errors on a long window
        plain_diff = weighted_norm(step, grid, plain, A=model.A, eps=eps)
        plain_scale = max(1.0, weighted_norm(y, grid, plain, A=model.A, eps=eps))
        if plain_diff <= tol_window * plain_scale:
            converged = True
            break
    if not keep_iterates:
        iterates = [Trajectory(grid, y)]
    trace = FixedPointTrace(iterates, factors, r, converged, differences)
    logger.debug(
        "Picard r=%g: %d iterations, median factor %.4g, converged=%s",
        r,
        trace.iterations,
        trace.median_factor,
        converged,
    )
    if not converged and raise_on_failure:
        last = factors[-1] if factors else float("nan")
        raise ConvergenceError(
            f"closed-loop fixed point did not converge in {max_iter} iterations"
            f" (last factor {last:.4g})"
        )
    return trace
