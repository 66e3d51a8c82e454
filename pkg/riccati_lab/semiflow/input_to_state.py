"""The input-to-state map (L_s u)(t) = int_s^t e^{A(t-r)} B u(r) dr.

Controls are piecewise constant, so every interval is propagated exactly
with the zero-order-hold blocks (e^{Ah}, int_0^h e^{Ar}B dr).
"""

import logging

import numpy as np

from riccati_lab.core.errors import InputError
from riccati_lab.core.parallel import ordered_map
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import input_gramian_blocks, semigroup_stack
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.quadrature import quadrature
from riccati_lab.semiflow.paths import ControlPath

logger = logging.getLogger(__name__)


class ZohPropagator:
    """Caches the exact one-step blocks per distinct step length."""

    def __init__(self, model: LqModel):
        self.model = model
        self._blocks: dict[float, tuple] = {}

    def blocks(self, h: float):
        key = float(f"{h:.14g}")
        if key not in self._blocks:
            B = self.model.B if self.model.m else np.zeros((self.model.n, 1))
            self._blocks[key] = input_gramian_blocks(self.model.A, B, h)
        return self._blocks[key]

    def step(self, y: np.ndarray, h: float, u: np.ndarray) -> np.ndarray:
        if h <= 0:
            return y
        F, P0, _, _ = self.blocks(h)
        out = F @ y
        if self.model.m:
            out = out + P0 @ u
        return out

    def sweep(self, nodes: np.ndarray, x: np.ndarray, control: ControlPath | None):
        """States at ``nodes`` from y(nodes[0]) = x."""
        states = np.empty((nodes.size, self.model.n))
        states[0] = x
        m = max(self.model.m, 1)
        for k in range(nodes.size - 1):
            u = control.at(nodes[k]) if control is not None else np.zeros(m)
            states[k + 1] = self.step(states[k], nodes[k + 1] - nodes[k], u)
        return states


def _check_window(model: LqModel, u: ControlPath, s: float, t: float):
    if t < s:
        raise InputError(f"need s <= t, got s={s}, t={t}")
    if not model.is_infinite and t > model.T * (1 + 1e-12):
        raise InputError(f"t={t} beyond the horizon T={model.T}")
    t0, t1 = u.span
    slack = 1e-12 * max(1.0, abs(t1))
    if s < t0 - slack or t > t1 + slack:
        raise InputError(f"[{s}, {t}] outside the control span [{t0}, {t1}]")
    if u.m != model.m:
        raise InputError(f"control has {u.m} channels, model has {model.m}")


def input_to_state(
    model: LqModel,
    s: float,
    u: ControlPath,
    t: float,
    propagator: ZohPropagator | None = None,
) -> np.ndarray:
    _check_window(model, u, s, t)
    if t == s:
        return np.zeros(model.n)
    propagator = propagator or ZohPropagator(model)
    nodes = u.grid.window(s, t)
    return propagator.sweep(nodes, np.zeros(model.n), u)[-1]


def input_to_state_path(
    model: LqModel, s: float, u: ControlPath, x=None
) -> tuple[np.ndarray, np.ndarray]:
    """e^{A(t-s)}x + (L_s u)(t) at every node of u.grid from s on."""
    _check_window(model, u, s, u.grid.t1)
    nodes = u.grid.window(s, u.grid.t1)
    x = np.zeros(model.n) if x is None else np.asarray(x, dtype=float)
    return nodes, ZohPropagator(model).sweep(nodes, x, u)


def linf_input_bound(model: LqModel, s: float, T: float) -> float:
    """int_0^{T-s} ||e^{Ar} B|| dr, the norm of L_s from L^inf into C([s,T]; Y)."""
    if not T > s:
        raise InputError(f"need T > s, got s={s}, T={T}")
    if model.m == 0:
        return 0.0
    grid = TimeGrid.graded(0.0, T - s)
    E = semigroup_stack(model.A, grid.nodes, model.spectral)
    norms = np.linalg.norm(E @ model.B, ord=2, axis=(1, 2))
    return float(quadrature(norms, grid, "graded"))


def regularity_controls(
    model: LqModel, s: float, T: float, samples: int, seed: int, steps: int = 200
) -> list[ControlPath]:
    """Seeded piecewise-constant controls normalized to unit L^{q'} norm."""
    grid = TimeGrid.uniform(s, T, steps)
    q_prime = model.assumption.q_prime
    controls = []
    for k in range(samples):
        u = ControlPath.random(grid, model.m, seed, index=k)
        norm = u.lq_norm(q_prime)
        controls.append(u.scaled(1.0 / norm) if norm > 0 else u)
    return controls


def improved_regularity_probe(
    model: LqModel,
    s: float,
    T: float,
    samples: int,
    seed: int,
    eps: float | None = None,
    controls: list[ControlPath] | None = None,
) -> float:
    """max over unit-L^{q'} controls of sup_t ||(-A)^eps (L_s u)(t)||.

    Reported, not checked against an analytic constant.
    """
    if samples < 1 and controls is None:
        raise InputError("improved_regularity_probe needs samples >= 1")
    eps = model.assumption.epsilon if eps is None else eps
    if controls is None:
        controls = regularity_controls(model, s, T, samples, seed)
    Ae = fractional_power(model.A, eps, model.spectral) if eps else np.eye(model.n)

    def one(u: ControlPath) -> float:
        _, states = input_to_state_path(model, s, u)
        return float(np.max(np.linalg.norm(states @ Ae.T, axis=1)))

    values = ordered_map(one, controls)
    logger.debug("regularity probe over %d controls: %.6g", len(values), max(values, default=0.0))
    return max(values, default=0.0)
