"""Uniqueness map for the difference of two Riccati solutions.

For Q = P1 - P with P, P1 both solving the integral equation,

    Q(s) = -int_s^T e^{A^T(r-s)} [P1(r) B B^T Q(r) + Q(r) B B^T P(r)] e^{A(r-s)} dr.

The right side depends on Q only through V = B^T Q; on a short window
[T - delta, T] it is a contraction in sup_s ||B^T Q(s) (-A)^{-eps}||.
"""

import logging

import numpy as np

from riccati_lab.core.errors import HorizonMismatch, InputError
from riccati_lab.core.parallel import ordered_map
from riccati_lab.core.seeding import sub_rng
from riccati_lab.dre.solution import MatrixPath
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import semigroup_stack
from riccati_lab.numkernel.fractional import fractional_power
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.numkernel.quadrature import quadrature

logger = logging.getLogger(__name__)

MAX_WINDOW_NODES = 65
POWER_STEPS = 6


def _same_grid(*paths: MatrixPath):
    first = paths[0].grid.nodes
    for path in paths[1:]:
        if not np.array_equal(path.grid.nodes, first):
            raise HorizonMismatch("grid mismatch: paths must share one grid")


def uniqueness_map_apply(
    Q: MatrixPath, P: MatrixPath, P1: MatrixPath, s: float, model: LqModel
) -> np.ndarray:
    _same_grid(Q, P, P1)
    T = P.T
    if not P.grid.t0 - 1e-12 <= s <= T * (1 + 1e-12):
        raise InputError(f"s={s} outside [{P.grid.t0}, {T}]")
    if s >= T:
        return np.zeros((model.n, model.n))
    nodes = P.grid.window(s, T)
    Qs = np.array([Q.at(r) for r in nodes])
    Ps = np.array([P.at(r) for r in nodes])
    P1s = np.array([P1.at(r) for r in nodes])
    S = model.BBt
    inner = P1s @ S @ Qs + Qs @ S @ Ps
    E = semigroup_stack(model.A, nodes - s, model.spectral)
    integrand = np.swapaxes(E, 1, 2) @ inner @ E
    return -quadrature(integrand, TimeGrid.from_nodes(nodes), "simpson")


class _WindowMap:
    """The uniqueness map on a fixed window, applied to node values."""

    def __init__(self, model: LqModel, P: MatrixPath, P1: MatrixPath, nodes: np.ndarray):
        self.model = model
        self.nodes = nodes
        self.Ps = np.array([P.at(r) for r in nodes])
        self.P1s = np.array([P1.at(r) for r in nodes])
        diffs = nodes[None, :] - nodes[:, None]
        lags = np.round(np.maximum(diffs, 0.0), 14)
        self._lags, self._index = np.unique(lags, return_inverse=True)
        self._index = self._index.reshape(diffs.shape)
        self._E = semigroup_stack(model.A, self._lags, model.spectral)
        self._grids = [TimeGrid.from_nodes(nodes[i:]) for i in range(nodes.size - 1)]

    def apply(self, Qs: np.ndarray) -> np.ndarray:
        S = self.model.BBt
        inner = self.P1s @ S @ Qs + Qs @ S @ self.Ps
        out = np.zeros_like(Qs)
        for i, grid in enumerate(self._grids):
            E = self._E[self._index[i, i:]]
            integrand = np.swapaxes(E, 1, 2) @ inner[i:] @ E
            out[i] = -quadrature(integrand, grid, "simpson")
        return out


def window_nodes(P: MatrixPath, delta: float, max_nodes: int = MAX_WINDOW_NODES) -> np.ndarray:
    T = P.T
    nodes = P.grid.window(T - delta, T)
    stride = max(1, int(np.ceil((nodes.size - 1) / (max_nodes - 1))))
    picked = nodes[::stride]
    if picked[-1] != nodes[-1]:
        picked = np.append(picked, nodes[-1])
    return picked


def gain_sup_norm(Qs: np.ndarray, B: np.ndarray, Ainv: np.ndarray) -> float:
    V = np.einsum("ji,kjl,lm->kim", B, Qs, Ainv)
    if V.shape[1] == 0:
        return 0.0
    return float(np.max(np.linalg.norm(V, ord=2, axis=(1, 2))))


def uniqueness_contraction_estimate(
    P: MatrixPath,
    P1: MatrixPath,
    model: LqModel,
    delta: float,
    probes: int = 8,
    seed: int = 0,
    eps: float | None = None,
    steps: int = POWER_STEPS,
) -> float:
    """rho_hat(delta): largest observed gain ratio of the map on [T - delta, T].

    Each probe is a random symmetric path vanishing at T, pushed through a
    few power steps; the ratio is taken in sup_s ||B^T Q(s) (-A)^{-eps}||.
    """
    _same_grid(P, P1)
    if not 0 < delta <= P.T - P.grid.t0 + 1e-12:
        raise InputError(f"window length must lie in (0, T], got {delta}")
    if model.m == 0 or not np.any(model.B):
        return 0.0
    eps = model.assumption.epsilon if eps is None else eps
    Ainv = fractional_power(model.A, -eps, model.spectral)
    nodes = window_nodes(P, delta)
    if nodes.size < 2:
        return 0.0
    window_map = _WindowMap(model, P, P1, nodes)
    n = model.n

    def one(k: int) -> float:
        G = sub_rng(seed, k).standard_normal((nodes.size, n, n))
        Qs = 0.5 * (G + np.swapaxes(G, 1, 2))
        Qs[-1] = 0.0
        best = 0.0
        norm = gain_sup_norm(Qs, model.B, Ainv)
        for _ in range(steps):
            if norm == 0:
                break
            image = window_map.apply(Qs)
            image_norm = gain_sup_norm(image, model.B, Ainv)
            best = max(best, image_norm / norm)
            Qs, norm = image, image_norm
        return best

    rho = max(ordered_map(one, range(probes)), default=0.0)
    logger.debug("contraction estimate on window %.4g: %.6g", delta, rho)
    return rho
