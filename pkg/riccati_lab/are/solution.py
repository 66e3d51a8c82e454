from dataclasses import dataclass

import numpy as np

from riccati_lab.numkernel.spectral import spectral_abscissa


@dataclass(frozen=True)
class AreSolution:
    P: np.ndarray
    K: np.ndarray
    A_P: np.ndarray
    method: str
    residual: float = 0.0
    iterations: int = 0
    model_id: str = ""

    def __post_init__(self):
        for X in (self.P, self.K, self.A_P):
            X.setflags(write=False)

    @classmethod
    def build(cls, P: np.ndarray, model, method: str, residual: float = 0.0, iterations: int = 0):
        P = np.array(P, dtype=float)
        K = model.B.T @ P
        return cls(
            P=P,
            K=K,
            A_P=model.A - model.B @ K,
            method=method,
            residual=residual,
            iterations=iterations,
            model_id=model.model_id,
        )

    @property
    def closed_loop_abscissa(self) -> float:
        return spectral_abscissa(self.A_P)

    def at(self, t: float) -> np.ndarray:
        return self.P

    def gain_at(self, t: float, B: np.ndarray | None = None) -> np.ndarray:
        return self.K

    def perturbed(self, D, model) -> "AreSolution":
        P = self.P + np.asarray(D, dtype=float)
        return AreSolution.build(P, model, f"{self.method}+perturbed")
