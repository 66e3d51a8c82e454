"""Dynamic programming for the sampled problem.

    y_{k+1} = F y_k + G u_k,  F = e^{A dt},  G = int_0^dt e^{As} B ds,
    stage cost dt (||R y_k||^2 + ||u_k||^2).
"""

import logging
from dataclasses import dataclass

import numpy as np

from riccati_lab.core.errors import InputError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import input_gramian_blocks
from riccati_lab.numkernel.spectral import symmetrize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscreteValue:
    times: np.ndarray
    P: np.ndarray
    gains: np.ndarray
    dt: float

    def at(self, t: float) -> np.ndarray:
        k = int(np.clip(np.round((t - self.times[0]) / self.dt), 0, self.times.size - 1))
        return self.P[k]

    def cost(self, x, t: float = 0.0) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.at(t) @ x)


def discrete_dp_oracle(model: LqModel, T: float, dt: float) -> DiscreteValue:
    if not dt > 0:
        raise InputError(f"sampling step must be positive, got {dt}")
    if not 0 < T < np.inf:
        raise InputError(f"oracle horizon must be finite and positive, got {T}")
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-9 * max(1.0, T):
        raise InputError(f"dt={dt} does not divide T={T}")
    n, m = model.n, model.m
    if m:
        F, G, _, _ = input_gramian_blocks(model.A, model.B, dt)
    else:
        F, _, _, _ = input_gramian_blocks(model.A, np.zeros((n, 1)), dt)
        G = np.zeros((n, 0))
    Qd = dt * model.RtR
    Rd = dt * np.eye(m)

    P = np.zeros((steps + 1, n, n))
    gains = np.zeros((steps, m, n))
    for k in range(steps - 1, -1, -1):
        Pn = P[k + 1]
        FtPF = F.T @ Pn @ F
        if m:
            L = np.linalg.solve(Rd + G.T @ Pn @ G, G.T @ Pn @ F)
            gains[k] = L
            P[k] = symmetrize(Qd + FtPF - F.T @ Pn @ G @ L)
        else:
            P[k] = symmetrize(Qd + FtPF)
    logger.debug("discrete Riccati recursion: %d steps of %g", steps, dt)
    return DiscreteValue(np.linspace(0.0, steps * dt, steps + 1), P, gains, dt)
