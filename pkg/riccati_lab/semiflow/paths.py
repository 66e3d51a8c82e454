from dataclasses import dataclass, field

import numpy as np

from riccati_lab.core.errors import InputError
from riccati_lab.core.seeding import sub_rng
from riccati_lab.numkernel.grid import TimeGrid


@dataclass(frozen=True)
class ControlPath:
    """Piecewise-constant control: values[k] holds on [t_k, t_{k+1})."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.shape[0] != self.grid.size:
            raise InputError(
                f"control values {values.shape} do not match a grid of {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise InputError("control values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: TimeGrid, m: int) -> "ControlPath":
        return cls(grid, np.zeros((grid.size, m)))

    @classmethod
    def constant(cls, grid: TimeGrid, value) -> "ControlPath":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(grid, np.tile(value, (grid.size, 1)))

    @classmethod
    def random(
        cls, grid: TimeGrid, m: int, seed: int, index: int = 0, scale: float = 1.0
    ) -> "ControlPath":
        """Seeded Gaussian piecewise-constant path; the last node repeats
        the last interval's value."""
        draws = scale * sub_rng(seed, index).standard_normal((max(grid.size - 1, 1), m))
        values = np.vstack([draws, draws[-1:]])[: grid.size]
        return cls(grid, values)

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def span(self) -> tuple[float, float]:
        return self.grid.t0, self.grid.t1

    def at(self, t: float) -> np.ndarray:
        """Right-continuous evaluation."""
        t0, t1 = self.span
        if t < t0 - 1e-12 * max(1.0, abs(t0)) or t > t1 + 1e-12 * max(1.0, abs(t1)):
            raise InputError(f"t={t} outside control span [{t0}, {t1}]")
        k = int(np.searchsorted(self.grid.nodes, t, side="right")) - 1
        return self.values[min(max(k, 0), self.grid.size - 1)]

    def interval_values(self) -> np.ndarray:
        return self.values[:-1]

    def lq_norm(self, q: float = 2.0) -> float:
        if q == np.inf:
            return self.sup_norm()
        pointwise = np.linalg.norm(self.interval_values(), axis=1)
        return float(np.sum(self.grid.steps * pointwise**q) ** (1.0 / q))

    def sup_norm(self) -> float:
        if self.grid.size < 2:
            return 0.0
        return float(np.max(np.linalg.norm(self.interval_values(), axis=1)))

    def scaled(self, factor: float) -> "ControlPath":
        return ControlPath(self.grid, factor * self.values)

    def __add__(self, other: "ControlPath") -> "ControlPath":
        if not np.array_equal(self.grid.nodes, other.grid.nodes):
            raise InputError("control paths live on different grids")
        return ControlPath(self.grid, self.values + other.values)


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray
    controls: ControlPath | None = None
    cost: float | None = None
    running_cost: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] != self.grid.size:
            raise InputError(
                f"states {states.shape} do not match a grid of {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(states)):
            raise InputError("trajectory states must be finite")
        if self.cost is not None and self.cost < 0:
            raise InputError(f"trajectory cost must be >= 0, got {self.cost}")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def at_node(self, t: float) -> np.ndarray:
        k = self.grid.index_of(t)
        if k is None:
            raise InputError(f"t={t} is not a trajectory node")
        return self.states[k]
