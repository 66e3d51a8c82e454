"""Mild solutions y = e^{At}x + L_0 u and their quadratic cost."""

import numpy as np

from riccati_lab.core.errors import InputError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.quadrature import quadrature
from riccati_lab.semiflow.input_to_state import ZohPropagator
from riccati_lab.semiflow.paths import ControlPath, Trajectory


def running_cost(model: LqModel, states, controls) -> np.ndarray:
    """||R y||^2 + ||u||^2 at every sample."""
    states = np.asarray(states, dtype=float)
    controls = np.asarray(controls, dtype=float)
    observed = np.sum((states @ model.R.T) ** 2, axis=-1)
    if controls.size == 0:
        return observed
    return observed + np.sum(controls**2, axis=-1)


def trajectory_cost(model: LqModel, grid: TimeGrid, states, controls) -> float:
    """Composite Simpson cost of pointwise samples (continuous controls)."""
    return float(max(quadrature(running_cost(model, states, controls), grid, "simpson"), 0.0))


def interval_costs(model: LqModel, propagator: ZohPropagator, nodes, states, u: ControlPath):
    """Per-interval Simpson costs for a piecewise-constant control.

    The midpoint state is propagated exactly, so each interval costs
    h/6 (f(y_k) + 4 f(y_mid) + f(y_{k+1})) + h ||u_k||^2.
    """
    costs = np.zeros(nodes.size - 1)
    for k in range(nodes.size - 1):
        h = nodes[k + 1] - nodes[k]
        uk = u.at(nodes[k])
        mid = propagator.step(states[k], 0.5 * h, uk)
        ends = running_cost(model, np.array([states[k], mid, states[k + 1]]), np.zeros((3, 0)))
        costs[k] = h / 6.0 * (ends[0] + 4 * ends[1] + ends[2]) + h * float(uk @ uk)
    return costs


def simulate(model: LqModel, u: ControlPath, x) -> Trajectory:
    """Trajectory from x at the start of u's grid, with cost over the grid span."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise InputError(f"initial state must have {model.n} entries, got {x.shape}")
    if u.m != model.m:
        raise InputError(f"control has {u.m} channels, model has {model.m}")
    nodes = u.grid.nodes
    if not model.is_infinite and nodes[-1] > model.T * (1 + 1e-12):
        raise InputError(f"control runs past the horizon T={model.T}")
    propagator = ZohPropagator(model)
    states = propagator.sweep(nodes, x, u)
    costs = interval_costs(model, propagator, nodes, states, u)
    running = np.concatenate([[0.0], np.cumsum(costs)])
    return Trajectory(
        grid=u.grid,
        states=states,
        controls=u,
        cost=float(running[-1]),
        running_cost=running,
    )
