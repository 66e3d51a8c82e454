"""Adjoint representations of the weighted kernel maps.

S z  = e^{delta t} B^T e^{A^T t} ((-A)^T)^eps z       (Y -> L^2(U))
T w  = e^{delta t} (-A)^{-eps} e^{At} B w            (U -> L^2(Y))

and their adjoints S* h, T* g as time integrals. Both pairings are taken
with the same quadrature on the same grid.
"""

import numpy as np

from riccati_lab.core.errors import HorizonMismatch, InputError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import semigroup_stack
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.quadrature import quadrature
from riccati_lab.semiflow.paths import ControlPath, Trajectory


def _weighted_stack(model: LqModel, delta: float, nodes: np.ndarray) -> np.ndarray:
    E = semigroup_stack(model.A, nodes, model.spectral)
    return E * np.exp(delta * nodes)[:, None, None]


def adjoint_S(model: LqModel, delta: float, h: ControlPath, eps: float, rule="simpson"):
    """S* h = int e^{delta t} (-A)^eps e^{At} B h(t) dt."""
    Ae = fractional_power(model.A, eps, model.spectral)
    E = _weighted_stack(model, delta, h.grid.nodes)
    integrand = np.einsum("ij,kjl,lm,km->ki", Ae, E, model.B, h.values)
    return quadrature(integrand, h.grid, rule)


def forward_S(model: LqModel, delta: float, grid, z, eps: float) -> np.ndarray:
    Ae = fractional_power(model.A, eps, model.spectral)
    E = _weighted_stack(model, delta, grid.nodes)
    return np.einsum("ji,klj,ml,m->ki", model.B, E, Ae, np.asarray(z, dtype=float))


def adjoint_T(model: LqModel, delta: float, g: Trajectory, eps: float, rule="simpson"):
    """T* g = int e^{delta t} B^T e^{A^T t} ((-A)^T)^{-eps} g(t) dt."""
    Ainv = fractional_power(model.A, -eps, model.spectral)
    E = _weighted_stack(model, delta, g.grid.nodes)
    integrand = np.einsum("ji,klj,ml,km->ki", model.B, E, Ainv, g.states)
    return quadrature(integrand, g.grid, rule)


def forward_T(model: LqModel, delta: float, grid, w, eps: float) -> np.ndarray:
    Ainv = fractional_power(model.A, -eps, model.spectral)
    E = _weighted_stack(model, delta, grid.nodes)
    return np.einsum("ij,kjl,lm,m->ki", Ainv, E, model.B, np.asarray(w, dtype=float))


def adjoint_duality_residual(
    model: LqModel,
    delta: float,
    h: ControlPath,
    g: Trajectory,
    z,
    w,
    horizon: float,
    eps: float | None = None,
    rule: str = "simpson",
) -> tuple[float, float]:
    model.assumption.check_delta(delta)
    eps = model.assumption.epsilon if eps is None else eps
    for name, grid in (("h", h.grid), ("g", g.grid)):
        scale = max(1.0, abs(horizon))
        if abs(grid.t0) > 1e-12 * scale or abs(grid.t1 - horizon) > 1e-12 * scale:
            raise HorizonMismatch(
                f"{name} lives on [{grid.t0}, {grid.t1}], expected [0, {horizon}]"
            )
    if not np.array_equal(h.grid.nodes, g.grid.nodes):
        raise HorizonMismatch("h and g must share one grid")
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape != (model.n,) or w.shape != (model.m,):
        raise InputError(f"need z in R^{model.n} and w in R^{model.m}")

    lhs_S = float(adjoint_S(model, delta, h, eps, rule) @ z)
    Sz = forward_S(model, delta, h.grid, z, eps)
    rhs_S = float(quadrature(np.sum(h.values * Sz, axis=1), h.grid, rule))

    lhs_T = float(adjoint_T(model, delta, g, eps, rule) @ w)
    Tw = forward_T(model, delta, g.grid, w, eps)
    rhs_T = float(quadrature(np.sum(g.states * Tw, axis=1), g.grid, rule))
    return abs(lhs_S - rhs_S), abs(lhs_T - rhs_T)
