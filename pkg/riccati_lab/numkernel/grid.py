"""Time grids.

Uniform grids carry only their nodes. Graded grids cluster Gauss-Legendre
panels geometrically (ratio 1/2) toward the left endpoint and remember the
panel each node belongs to, so the graded rule can extrapolate the
innermost interval that no node covers.
"""

from dataclasses import dataclass, field

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError


@dataclass(frozen=True)
class TimeGrid:
    nodes: np.ndarray
    kind: str = "uniform"
    weights: np.ndarray | None = field(default=None, repr=False)
    panels: np.ndarray | None = field(default=None, repr=False)
    start: float | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise InputError("time grid needs a nonempty 1-D node array")
        if not np.all(np.isfinite(nodes)):
            raise InputError("time grid nodes must be finite")
        if nodes.size > 1 and np.any(np.diff(nodes) <= 0):
            raise InputError("time grid must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        if self.start is None:
            object.__setattr__(self, "start", float(nodes[0]))

    @classmethod
    def uniform(cls, t0: float, t1: float, steps: int) -> "TimeGrid":
        if steps < 1 or not t1 > t0:
            raise InputError(f"uniform grid needs t1 > t0 and steps >= 1, got {steps}")
        return cls(np.linspace(t0, t1, steps + 1))

    @classmethod
    def from_nodes(cls, nodes) -> "TimeGrid":
        return cls(np.asarray(nodes, dtype=float))

    @classmethod
    def graded(
        cls,
        t0: float,
        t1: float,
        levels: int | None = None,
        points: int = tol.GRADED_POINTS,
    ) -> "TimeGrid":
        width = t1 - t0
        if not width > 0 or points < 1:
            raise InputError("graded grid needs t1 > t0 and points >= 1")
        if levels is None:
            levels = max(
                tol.GRADED_LEVELS_MIN,
                int(np.ceil(np.log2(max(width, 1.0) / tol.GRADED_INNER_WIDTH))),
            )
        x, w = np.polynomial.legendre.leggauss(points)
        nodes, weights, panels = [], [], []
        # panel l covers [t0 + width/2^(l+1), t0 + width/2^l]
        for level in reversed(range(levels)):
            a = t0 + width * 0.5 ** (level + 1)
            b = t0 + width * 0.5**level
            half = 0.5 * (b - a)
            nodes.append(a + half * (x + 1.0))
            weights.append(half * w)
            panels.append(np.full(points, level))
        return cls(
            np.concatenate(nodes),
            kind="graded",
            weights=np.concatenate(weights),
            panels=np.concatenate(panels),
            start=float(t0),
        )

    @property
    def t0(self) -> float:
        return float(self.start)

    @property
    def t1(self) -> float:
        return float(self.nodes[-1])

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        if self.kind != "uniform" or self.size < 2:
            return False
        h = self.steps
        return bool(np.all(np.abs(h - h[0]) <= rtol * abs(h[0])))

    def index_of(self, t: float, atol: float = 1e-12) -> int | None:
        k = int(np.argmin(np.abs(self.nodes - t)))
        scale = max(1.0, abs(t))
        return k if abs(self.nodes[k] - t) <= atol * scale else None

    def window(self, s: float, t: float) -> np.ndarray:
        """Nodes in [s, t] with s and t themselves included."""
        if t <= s:
            return np.array([s])
        gap = 1e-12 * max(1.0, abs(t))
        inner = self.nodes[(self.nodes > s + gap) & (self.nodes < t - gap)]
        return np.concatenate([[s], inner, [t]])
