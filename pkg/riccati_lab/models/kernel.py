"""Structural split B^T e^{A^T t} = F(t) + G(t).

F keeps the columns of the parabolic block, G the rest. Any split summing
to the kernel is admissible; this one follows the block structure of the
coupled surrogates.
"""

import numpy as np

from riccati_lab.core.errors import InputError, ModelError
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.expm import matrix_exponential_apply, semigroup_stack


def parabolic_projection(model: LqModel) -> np.ndarray:
    mask = np.zeros(model.n)
    mask[list(model.parabolic_block)] = 1.0
    return mask


def adjoint_kernel(model: LqModel, t: float) -> np.ndarray:
    """B^T e^{A^T t}, shape (m, n)."""
    return matrix_exponential_apply(model.A, t, model.B, model.spectral).T


def decompose_adjoint_kernel(model: LqModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    if model.m == 0:
        raise ModelError("empty model: no control channels")
    if not t > 0:
        raise InputError(f"kernel split needs t > 0, got {t}")
    K = adjoint_kernel(model, t)
    F = K * parabolic_projection(model)
    return F, K - F


def kernel_stack(model: LqModel, times) -> tuple[np.ndarray, np.ndarray]:
    """F and G at every time, shape (len(times), m, n) each."""
    if model.m == 0:
        raise ModelError("empty model: no control channels")
    E = semigroup_stack(model.A, times, model.spectral)
    K = np.einsum("ji,klj->kil", model.B, E)
    F = K * parabolic_projection(model)
    return F, K - F
