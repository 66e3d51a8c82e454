from typing import Callable

import numpy as np

from riccati_lab.core.errors import InputError


def rk4_linear(
    matrix_at: Callable[[float], np.ndarray], nodes, x, direction: int = 1
) -> np.ndarray:
    """Classical RK4 for y' = M(t) y on the given nodes.

    ``direction=1`` starts from y(nodes[0]) = x; ``direction=-1`` from
    y(nodes[-1]) = x and steps backward. Returns states at every node.
    """
    nodes = np.asarray(nodes, dtype=float)
    x = np.asarray(x, dtype=float)
    if nodes.ndim != 1 or nodes.size < 1:
        raise InputError("rk4 needs a nonempty node array")
    states = np.empty((nodes.size,) + x.shape)
    order = range(nodes.size - 1) if direction > 0 else range(nodes.size - 1, 0, -1)
    first = 0 if direction > 0 else nodes.size - 1
    states[first] = x
    for k in order:
        j = k + 1 if direction > 0 else k - 1
        t, h = nodes[k], nodes[j] - nodes[k]
        mid = t + 0.5 * h
        y = states[k]
        M0, Mm, M1 = matrix_at(t), matrix_at(mid), matrix_at(nodes[j])
        k1 = M0 @ y
        k2 = Mm @ (y + 0.5 * h * k1)
        k3 = Mm @ (y + 0.5 * h * k2)
        k4 = M1 @ (y + h * k3)
        states[j] = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return states
