"""Backward integration of the differential Riccati equation.

    dP/dt = -(A^T P + P A - P B B^T P + R^T R),   P(T) = 0.

In reversed time tau = T - t the right side is g(P) = A^T P + P A - P S P + W
with S = B B^T and W = R^T R. Two integrators: classical RK4, and the
implicit midpoint rule whose stage equation is itself an algebraic
Riccati equation solved by Newton-Kleinman from the previous value.
"""

import logging

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError, SolverError
from riccati_lab.dre.solution import DreSolution
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.lyapunov import riccati_newton
from riccati_lab.numkernel.spectral import symmetrize

logger = logging.getLogger(__name__)

INTEGRATORS = ("rk4", "midpoint")


def riccati_rhs(P: np.ndarray, A: np.ndarray, S: np.ndarray, W: np.ndarray) -> np.ndarray:
    return A.T @ P + P @ A - P @ S @ P + W


def _rk4_step(P, h, A, S, W):
    k1 = riccati_rhs(P, A, S, W)
    k2 = riccati_rhs(P + 0.5 * h * k1, A, S, W)
    k3 = riccati_rhs(P + 0.5 * h * k2, A, S, W)
    k4 = riccati_rhs(P + h * k3, A, S, W)
    return P + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_step(P, h, A, S, W):
    n = A.shape[0]
    A_hat = 0.5 * h * A - 0.5 * np.eye(n)
    M, _ = riccati_newton(A_hat, 0.5 * h * S, 0.5 * h * W + P, X0=P)
    return 2.0 * M - P


def rk4_min_steps(model: LqModel, T: float) -> int:
    """Fewest uniform steps with h * 2 rho(A) inside the real RK4 stability interval."""
    radius = 2.0 * float(np.max(np.abs(model.spectral.eigenvalues)))
    return max(2, int(np.ceil(T * radius / tol.RK4_STABILITY)))


def reference_integrator(model: LqModel, steps: int, T: float) -> str:
    return "rk4" if steps >= rk4_min_steps(model, T) else "midpoint"


def solve_dre(
    model: LqModel,
    steps: int,
    integrator: str = "rk4",
    T: float | None = None,
) -> DreSolution:
    if integrator not in INTEGRATORS:
        raise InputError(f"unknown integrator {integrator!r}; use one of {INTEGRATORS}")
    if steps < 2:
        raise InputError(f"solve_dre needs steps >= 2, got {steps}")
    T = model.require_finite() if T is None else float(T)
    if not T > 0 or np.isinf(T):
        raise InputError(f"DRE horizon must be finite and positive, got {T}")
    if integrator == "rk4" and steps < rk4_min_steps(model, T):
        raise InputError(
            f"rk4 is unstable with {steps} steps on [0, {T:g}] for {model.model_id}:"
            f" use at least {rk4_min_steps(model, T)} steps or the midpoint integrator"
        )

    grid = TimeGrid.uniform(0.0, T, steps)
    A, S, W = model.A, model.BBt, model.RtR
    n = model.n
    P = np.zeros((steps + 1, n, n))
    step = _rk4_step if integrator == "rk4" else _midpoint_step
    for k in range(steps - 1, -1, -1):
        h = grid.nodes[k + 1] - grid.nodes[k]
        P[k] = symmetrize(step(P[k + 1], h, A, S, W))
        size = np.linalg.norm(P[k])
        if not np.isfinite(size) or size > tol.DRE_BLOWUP:
            raise SolverError(f"DRE blow-up at t={grid.nodes[k]:.6g} (|P| = {size:.3e})")

    slopes = -np.array([riccati_rhs(Pk, A, S, W) for Pk in P])
    sol = DreSolution(
        grid=grid,
        values=P,
        slopes=slopes,
        gains=np.einsum("ji,kjl->kil", model.B, P),
        integrator=integrator,
        model_id=model.model_id,
    )
    sol.check_invariants()
    logger.debug(
        "DRE %s: %d steps on [0, %g], |P(0)| = %.6g", integrator, steps, T, np.linalg.norm(P[0])
    )
    return sol
