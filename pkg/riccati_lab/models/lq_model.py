import enum
import hashlib
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError, ModelError
from riccati_lab.numkernel.spectral import (
    SpectralData,
    as_matrix,
    as_square,
    spectral_data,
)

INVERTIBILITY_COND_MAX = 1e14


class ModelKind(str, enum.Enum):
    scalar = "scalar"
    heat = "heat"
    composite = "composite"
    random = "random"
    custom = "custom"


class AssumptionParams(BaseModel):
    gamma: float = Field(0.5, gt=0, lt=1)
    N: float = Field(1.0, gt=0)
    epsilon: float = Field(0.25, gt=0, lt=1)
    q: float = Field(1.5, gt=1, lt=2)
    omega: float = Field(..., gt=0)
    eta: float = Field(..., gt=0)
    M: float = Field(1.0, ge=1)
    delta: float = Field(0.0, ge=0)

    model_config = ConfigDict(frozen=True)

    @property
    def q_prime(self) -> float:
        return self.q / (self.q - 1.0)

    def check_delta(self, delta: float | None = None) -> float:
        delta = self.delta if delta is None else delta
        if delta < 0 or delta >= min(self.omega, self.eta):
            raise InputError(
                f"delta must lie in [0, min(omega, eta)) = [0, {min(self.omega, self.eta):.6g})"
                f", got {delta}"
            )
        return delta


@dataclass(frozen=True, eq=False)
class LqModel:
    """Generator A, control map B, observer R on a horizon T (math.inf allowed).

    Every model is stable and diagonalizable: D(A^eps) norms and the
    stability constants are read off the eigendecomposition.
    """

    A: np.ndarray
    B: np.ndarray
    R: np.ndarray
    horizon: float
    assumption: AssumptionParams
    parabolic_block: tuple[int, ...] = ()
    kind: ModelKind = ModelKind.custom
    model_id: str = ""
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        A = as_square(self.A).copy()
        n = A.shape[0]
        if n == 0:
            raise ModelError("model needs at least one state")
        B = np.asarray(self.B, dtype=float)
        if B.size == 0:
            B = np.zeros((n, 0))
        B = as_matrix(B, "B").copy()
        R = as_matrix(np.atleast_2d(np.asarray(self.R, dtype=float)), "R").copy()
        if B.shape[0] != n or R.shape[1] != n:
            raise ModelError(
                f"inconsistent dimensions: A {A.shape}, B {B.shape}, R {R.shape}"
            )
        horizon = float(self.horizon)
        if not horizon > 0:
            raise ModelError(f"horizon must be positive or inf, got {horizon}")
        block = tuple(sorted({int(k) for k in self.parabolic_block}))
        if block and (block[0] < 0 or block[-1] >= n):
            raise ModelError(f"parabolic block {block} outside 0..{n - 1}")
        for X in (A, B, R):
            X.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "parabolic_block", block)
        object.__setattr__(self, "kind", ModelKind(self.kind))

        if np.linalg.cond(A) > INVERTIBILITY_COND_MAX:
            raise ModelError("A must be invertible")
        if self.abscissa >= 0:
            raise ModelError(
                f"A is not exponentially stable (spectral abscissa {self.abscissa:.6g})"
            )
        if self.spectral.condition > tol.FRACTIONAL_COND_MAX:
            raise ModelError(
                f"A is numerically defective (eigenvector condition {self.spectral.condition:.3g})"
            )
        if not self.model_id:
            object.__setattr__(self, "model_id", f"{self.kind.value}-{self.fingerprint()[:12]}")

    @classmethod
    def from_matrices(
        cls,
        A,
        B,
        R,
        horizon: float = math.inf,
        parabolic_block=None,
        assumption: AssumptionParams | dict | None = None,
        kind: ModelKind | str = ModelKind.custom,
        model_id: str = "",
        metadata: dict | None = None,
    ) -> "LqModel":
        """Fill omega (spectral margin), eta and M (eigenvector condition)
        from A when the caller does not supply them."""
        A = as_square(A)
        spec = spectral_data(A)
        if not np.all(spec.eigenvalues.real < 0):
            raise ModelError("A is not exponentially stable")
        omega = float(-np.max(spec.eigenvalues.real))
        defaults = {"omega": omega, "eta": omega, "M": max(1.0, spec.condition)}
        if isinstance(assumption, AssumptionParams):
            params = assumption
        else:
            params = AssumptionParams(**{**defaults, **(assumption or {})})
        if parabolic_block is None:
            parabolic_block = range(A.shape[0])
        return cls(
            A=A,
            B=B,
            R=R,
            horizon=horizon,
            assumption=params,
            parabolic_block=tuple(parabolic_block),
            kind=kind,
            model_id=model_id,
            metadata=dict(metadata or {}),
        )

    def with_horizon(self, horizon: float) -> "LqModel":
        base = self.model_id.split("@", 1)[0]
        tag = "inf" if math.isinf(horizon) else f"{float(horizon):g}"
        return replace(self, horizon=float(horizon), model_id=f"{base}@T={tag}")

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for X in (self.A, self.B, self.R):
            digest.update(np.ascontiguousarray(X).tobytes())
            digest.update(str(X.shape).encode())
        digest.update(repr((self.horizon, self.parabolic_block)).encode())
        return digest.hexdigest()

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.R.shape[0]

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.horizon)

    @property
    def T(self) -> float:
        return self.horizon

    @cached_property
    def spectral(self) -> SpectralData:
        return spectral_data(self.A)

    @cached_property
    def abscissa(self) -> float:
        return float(np.max(self.spectral.eigenvalues.real))

    @cached_property
    def RtR(self) -> np.ndarray:
        return self.R.T @ self.R

    @cached_property
    def BBt(self) -> np.ndarray:
        return self.B @ self.B.T

    def require_finite(self) -> float:
        if self.is_infinite:
            raise InputError("operation needs a finite horizon")
        return self.horizon
