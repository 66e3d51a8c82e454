"""Finite-dimensional surrogates of boundary-controlled systems.

Unbounded control is emulated by grading B against the spectrum of A:
b_k ~ lambda_k^beta. As n grows the constants of the singular estimate and
of admissibility blow up the way the infinite-dimensional ones do.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import InputError, ModelError
from riccati_lab.core.seeding import sub_rng
from riccati_lab.models.lq_model import AssumptionParams, LqModel, ModelKind
from riccati_lab.numkernel.spectral import spectral_abscissa, spectral_data

logger = logging.getLogger(__name__)

GAMMA_CLIP = 1e-6


def heat_eigenvalues(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) * np.pi) ** 2


def graded_column(eigenvalues: np.ndarray, beta: float) -> np.ndarray:
    return np.sqrt(2.0) * eigenvalues**beta


@dataclass(frozen=True)
class GradedFamily:
    """Heat surrogates of increasing dimension sharing one grading exponent."""

    beta: float = 0.5
    dims: tuple[int, ...] = (8, 16, 32, 64)

    def __post_init__(self):
        if self.beta < 0:
            raise InputError(f"grading exponent must be >= 0, got {self.beta}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise InputError("dimension sequence must hold positive counts")

    def eigenvalues(self, n: int) -> np.ndarray:
        return heat_eigenvalues(n)

    @property
    def predicted_gamma(self) -> float:
        return float(np.clip(self.beta + 0.25, GAMMA_CLIP, 1 - GAMMA_CLIP))

    def models(self, horizon: float = math.inf) -> list[LqModel]:
        return [heat_boundary_surrogate(n, self.beta, horizon=horizon) for n in self.dims]


def heat_boundary_surrogate(n: int, beta: float, horizon: float = math.inf) -> LqModel:
    if n < 1:
        raise InputError(f"heat surrogate needs n >= 1, got {n}")
    if not 0 <= beta < 1:
        raise InputError(f"grading exponent must lie in [0, 1), got {beta}")
    lam = heat_eigenvalues(n)
    params = AssumptionParams(
        gamma=float(np.clip(beta + 0.25, GAMMA_CLIP, 1 - GAMMA_CLIP)),
        omega=float(lam[0]),
        eta=float(lam[0]),
        M=1.0,
    )
    return LqModel.from_matrices(
        np.diag(-lam),
        graded_column(lam, beta).reshape(-1, 1),
        np.eye(n),
        horizon=horizon,
        parabolic_block=range(n),
        assumption=params,
        kind=ModelKind.heat,
        model_id=f"heat-n{n}-b{beta:g}",
        metadata={"beta": f"{beta:.17g}"},
    )


def _spectrum_text(eigenvalues) -> str:
    eigenvalues = sorted(np.asarray(eigenvalues, dtype=complex), key=lambda z: (z.real, z.imag))
    return " ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in eigenvalues)


def composite_surrogate(
    n_h: int,
    n_p: int,
    kappa: float,
    damping: float,
    beta: float = 0.25,
    seed: int = 0,
    horizon: float = math.inf,
) -> LqModel:
    """Damped skew block coupled to a heat-like block.

    The symmetric part of A is diag(-damping I, D), negative definite, so
    every draw is stable; a draw is still rejected when A comes out
    numerically defective.
    """
    if n_h < 1 or n_p < 1:
        raise InputError("composite surrogate needs n_h, n_p >= 1")
    if kappa < 0 or damping <= 0:
        raise InputError("composite surrogate needs kappa >= 0 and damping > 0")
    if not 0 <= beta < 1:
        raise InputError(f"grading exponent must lie in [0, 1), got {beta}")
    n = n_h + n_p
    mu = heat_eigenvalues(n_p)
    D = np.diag(-mu)
    for attempt in range(tol.STABILITY_RESAMPLES):
        rng = sub_rng(seed, attempt)
        G = rng.standard_normal((n_h, n_h))
        S = 0.5 * (G - G.T)
        C = rng.standard_normal((n_h, n_p))
        C /= max(np.linalg.norm(C, 2), 1e-300)
        hyper = S - damping * np.eye(n_h)
        A = np.block([[hyper, kappa * C], [-kappa * C.T, D]])
        if spectral_abscissa(A) < 0 and spectral_data(A).condition <= tol.FRACTIONAL_COND_MAX:
            break
        logger.warning("composite draw %d rejected, resampling", attempt)
    else:
        raise ModelError(
            f"no stable composite generator after {tol.STABILITY_RESAMPLES} draws"
        )
    b_h = rng.standard_normal(n_h)
    b_h /= max(np.linalg.norm(b_h), 1e-300)
    B = np.concatenate([b_h, graded_column(mu, beta)]).reshape(-1, 1)
    metadata = {
        "kappa": f"{kappa:.17g}",
        "damping": f"{damping:.17g}",
        "beta": f"{beta:.17g}",
        "seed": str(seed),
        "draw": str(attempt),
        "spectrum_hyperbolic": _spectrum_text(np.linalg.eigvals(hyper)),
        "spectrum_parabolic": _spectrum_text(-mu),
    }
    return LqModel.from_matrices(
        A,
        B,
        np.eye(n),
        horizon=horizon,
        parabolic_block=range(n_h, n),
        assumption={"gamma": float(np.clip(beta + 0.25, GAMMA_CLIP, 1 - GAMMA_CLIP))},
        kind=ModelKind.composite,
        model_id=f"composite-h{n_h}-p{n_p}-k{kappa:g}-s{seed}",
        metadata=metadata,
    )


def random_stable(
    n: int,
    m: int,
    p: int,
    seed: int,
    margin: float = 0.5,
    horizon: float = math.inf,
) -> LqModel:
    if n < 1 or m < 0 or p < 1:
        raise InputError(f"random model needs n >= 1, m >= 0, p >= 1, got {(n, m, p)}")
    if margin <= 0:
        raise InputError(f"stability margin must be positive, got {margin}")
    A0 = sub_rng(seed, 0).standard_normal((n, n)) / np.sqrt(n)
    shift = spectral_abscissa(A0) + margin * (1 + 1e-8)
    A = A0 - shift * np.eye(n)
    B = sub_rng(seed, 1).standard_normal((n, m))
    if m:
        B /= np.linalg.norm(B, axis=0)
    R = sub_rng(seed, 2).standard_normal((p, n))
    R /= np.linalg.norm(R, axis=0)
    return LqModel.from_matrices(
        A,
        B,
        R,
        horizon=horizon,
        parabolic_block=range(n),
        kind=ModelKind.random,
        model_id=f"random-n{n}-m{m}-p{p}-s{seed}",
        metadata={"seed": str(seed), "margin": f"{margin:.17g}"},
    )


def scalar_model(a: float = -1.0, b: float = 1.0, r: float = 1.0, horizon: float = math.inf):
    return LqModel.from_matrices(
        [[a]],
        [[b]],
        [[r]],
        horizon=horizon,
        kind=ModelKind.scalar,
        model_id=f"scalar-a{a:g}-b{b:g}-r{r:g}",
    )
