"""Time quadrature for scalar, vector or matrix samples on a TimeGrid."""

import numpy as np
from scipy import integrate

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError
from riccati_lab.numkernel.grid import TimeGrid

RULES = ("trapezoid", "simpson", "graded")


def quadrature(samples, grid: TimeGrid, rule: str = "trapezoid"):
    """Integrate ``samples`` (first axis = time) over the grid span.

    The graded rule needs a grid from ``TimeGrid.graded``; it integrates
    each Gauss-Legendre panel and adds a geometric extrapolation of the
    uncovered innermost interval.
    """
    samples = np.asarray(samples, dtype=float)
    if rule not in RULES:
        raise InputError(f"unknown quadrature rule {rule!r}")
    if grid.size < 2:
        raise InputError("quadrature needs at least 2 nodes")
    if samples.shape[:1] != (grid.size,):
        raise InputError(
            f"samples have {samples.shape[:1]} time points, grid has {grid.size}"
        )
    if np.any(np.isnan(samples)):
        raise InputError("quadrature samples contain NaN")

    if rule == "graded":
        return _graded(samples, grid)
    if rule == "simpson" and grid.size >= 3:
        return integrate.simpson(samples, x=grid.nodes, axis=0)
    return integrate.trapezoid(samples, x=grid.nodes, axis=0)


def _graded(samples: np.ndarray, grid: TimeGrid):
    if grid.kind != "graded" or grid.weights is None or grid.panels is None:
        raise InputError("graded rule needs a graded grid")
    w = grid.weights.reshape((-1,) + (1,) * (samples.ndim - 1))
    levels = int(grid.panels.max()) + 1
    panel_sums = np.array(
        [np.sum((w * samples)[grid.panels == level], axis=0) for level in range(levels)]
    )
    total = panel_sums.sum(axis=0)
    if levels < 2:
        return total
    inner, outer = panel_sums[-1], panel_sums[-2]
    ratio = np.divide(inner, outer, out=np.zeros_like(inner), where=outer != 0)
    usable = (ratio > 0) & (ratio < 1)
    safe = np.where(usable, ratio, 0.0)
    tail = np.where(usable, inner * safe / (1.0 - safe), 0.0)
    return total + tail


def truncation_horizon(omega: float, M: float = 1.0, tail: float = tol.TRUNCATION_TAIL) -> float:
    """Smallest T with M e^{-omega T} <= tail."""
    if omega <= 0:
        raise InputError(f"truncation needs a positive stability margin, got {omega}")
    if not 0 < tail < 1:
        raise InputError(f"tail bound must lie in (0, 1), got {tail}")
    return float(np.log(max(M, 1.0) / tail) / omega)
