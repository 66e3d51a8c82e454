from dataclasses import dataclass, field

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError, SolverError
from riccati_lab.numkernel.grid import TimeGrid


@dataclass(frozen=True)
class MatrixPath:
    """Matrices Q(t) sampled on a grid.

    Between nodes ``at`` uses cubic Hermite interpolation when slopes are
    known and linear interpolation otherwise.
    """

    grid: TimeGrid
    values: np.ndarray
    slopes: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 3 or values.shape[0] != self.grid.size:
            raise InputError(
                f"path values {values.shape} do not match a grid of {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise InputError("path values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.slopes is not None:
            slopes = np.asarray(self.slopes, dtype=float)
            if slopes.shape != values.shape:
                raise InputError("slopes must match the path values")
            slopes.setflags(write=False)
            object.__setattr__(self, "slopes", slopes)

    @property
    def T(self) -> float:
        return self.grid.t1

    def node(self, t: float) -> int | None:
        return self.grid.index_of(t)

    def at(self, t: float) -> np.ndarray:
        nodes = self.grid.nodes
        span = max(1.0, abs(nodes[-1]))
        if t < nodes[0] - 1e-12 * span or t > nodes[-1] + 1e-12 * span:
            raise InputError(f"t={t} outside [{nodes[0]}, {nodes[-1]}]")
        k = self.grid.index_of(t)
        if k is not None:
            return self.values[k]
        j = int(np.clip(np.searchsorted(nodes, t) - 1, 0, nodes.size - 2))
        h = nodes[j + 1] - nodes[j]
        u = (t - nodes[j]) / h
        if self.slopes is None:
            return (1 - u) * self.values[j] + u * self.values[j + 1]
        h00 = 2 * u**3 - 3 * u**2 + 1
        h10 = u**3 - 2 * u**2 + u
        h01 = -2 * u**3 + 3 * u**2
        h11 = u**3 - u**2
        return (
            h00 * self.values[j]
            + h10 * h * self.slopes[j]
            + h01 * self.values[j + 1]
            + h11 * h * self.slopes[j + 1]
        )

    def window(self, s: float, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes of [s, t] (endpoints included) and the path on them."""
        nodes = self.grid.window(s, t)
        return nodes, np.array([self.at(r) for r in nodes])

    def __sub__(self, other: "MatrixPath") -> "MatrixPath":
        if not np.array_equal(self.grid.nodes, other.grid.nodes):
            raise InputError("paths live on different grids")
        slopes = None
        if self.slopes is not None and other.slopes is not None:
            slopes = self.slopes - other.slopes
        return MatrixPath(self.grid, self.values - other.values, slopes)

    def shifted(self, D) -> "MatrixPath":
        return MatrixPath(self.grid, self.values + np.asarray(D, dtype=float), self.slopes)


@dataclass(frozen=True)
class DreSolution(MatrixPath):
    """P(t) on [0, T] with P(T) = 0 and gains K(t) = B^T P(t)."""

    gains: np.ndarray | None = field(default=None, repr=False)
    integrator: str = "rk4"
    model_id: str = ""

    @property
    def P(self) -> np.ndarray:
        return self.values

    @property
    def K(self) -> np.ndarray:
        return self.gains

    def gain_at(self, t: float, B: np.ndarray) -> np.ndarray:
        k = self.grid.index_of(t)
        if k is not None and self.gains is not None:
            return self.gains[k]
        return B.T @ self.at(t)

    def check_invariants(self) -> None:
        P = self.values
        scale = max(1.0, float(np.max(np.abs(P))))
        if np.any(P[-1] != 0):
            raise SolverError("terminal condition P(T) = 0 violated")
        asym = float(np.max(np.abs(P - np.swapaxes(P, 1, 2))))
        if asym > tol.SYMMETRY * scale:
            raise SolverError(f"P lost symmetry ({asym:.3e})")
        lowest = float(np.min(np.linalg.eigvalsh(P)))
        if lowest < tol.PSD_FLOOR * scale:
            raise SolverError(f"P lost positivity (eigenvalue {lowest:.3e})")
