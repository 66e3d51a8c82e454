"""Gain sources: anything with ``at(t)`` returning the Riccati operator Q(t)."""

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from riccati_lab.are.solution import AreSolution
from riccati_lab.core.errors import HorizonMismatch, InputError
from riccati_lab.dre.solution import MatrixPath


class GainSource(Protocol):
    def at(self, t: float) -> np.ndarray: ...


@dataclass(frozen=True)
class ConstantGain:
    Q: np.ndarray

    def at(self, t: float) -> np.ndarray:
        return self.Q


def as_gain_source(source) -> GainSource:
    if isinstance(source, (MatrixPath, AreSolution, ConstantGain)):
        return source
    Q = np.asarray(source, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise InputError(f"a constant gain source must be a square matrix, got {Q.shape}")
    return ConstantGain(Q)


def is_constant(source) -> bool:
    return isinstance(source, (AreSolution, ConstantGain))


def constant_value(source) -> np.ndarray:
    return source.P if isinstance(source, AreSolution) else source.Q


def check_span(source, t0: float, t1: float) -> None:
    if isinstance(source, MatrixPath):
        lo, hi = source.grid.t0, source.T
        slack = 1e-12 * max(1.0, abs(hi))
        if t0 < lo - slack or t1 > hi + slack:
            raise HorizonMismatch(
                f"gain defined on [{lo}, {hi}] does not cover [{t0}, {t1}]"
            )
