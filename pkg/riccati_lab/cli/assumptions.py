import logging

import numpy as np

from riccati_lab.cli.dependencies import build_model, environment_stamp, output_path, write_json
from riccati_lab.core.errors import NoSingularComponent
from riccati_lab.core.seeding import sub_rng
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.schemas.config import RunConfig, config_echo
from riccati_lab.schemas.report import AssumptionReport
from riccati_lab.semiflow.duality import adjoint_duality_residual
from riccati_lab.semiflow.input_to_state import improved_regularity_probe, linf_input_bound
from riccati_lab.semiflow.metrology import (
    admissibility_constant,
    estimate_singular_decay,
    hyperbolic_remainder_constant,
    observation_smoothing_constant,
    singular_decay_series,
    weighted_kernel_Lq,
)
from riccati_lab.semiflow.paths import ControlPath, Trajectory
from riccati_lab.storage.solution_csv import save_series

logger = logging.getLogger(__name__)

DUALITY_STEP = 1e-3
REGULARITY_SAMPLES = 8


def duality_residuals(model: LqModel, delta: float, horizon: float, seed: int) -> dict:
    steps = max(2, int(np.ceil(horizon / DUALITY_STEP)))
    steps += steps % 2
    grid = TimeGrid.uniform(0.0, horizon, steps)
    rng = sub_rng(seed, 0)
    h = ControlPath(grid, rng.standard_normal((grid.size, model.m)))
    g = Trajectory(grid, rng.standard_normal((grid.size, model.n)))
    z = rng.standard_normal(model.n)
    w = rng.standard_normal(model.m)
    res_S, res_T = adjoint_duality_residual(model, delta, h, g, z, w, horizon)
    return {"S": res_S, "T": res_T}


def cmd_assumptions(config: RunConfig) -> int:
    model = build_model(config)
    opts = config.assumptions
    q = opts.q or model.assumption.q
    eps = model.assumption.epsilon
    T = min(opts.T, model.T)

    gamma = N = rms = None
    singular = "ok"
    try:
        gamma, N, rms = estimate_singular_decay(model, opts.t_min, opts.t_max, opts.nodes)
    except NoSingularComponent as exc:
        singular = exc.detail

    report = AssumptionReport(
        model_id=model.model_id,
        gamma_hat=gamma,
        N_hat=N,
        fit_rms=rms,
        singular_component=singular,
        admissibility_constant=admissibility_constant(model, T, opts.probes, opts.seed),
        admissibility_horizon=T,
        weighted_Lq={
            "eps": weighted_kernel_Lq(model, opts.delta, q, eps, T, opts.probes, opts.seed),
            "zero": weighted_kernel_Lq(model, opts.delta, q, 0.0, T, opts.probes, opts.seed),
        },
        duality_residuals=duality_residuals(model, opts.delta, T, opts.seed),
        constants={
            "q": q,
            "epsilon": eps,
            "linf_input_bound": linf_input_bound(model, 0.0, T),
            "improved_regularity": improved_regularity_probe(
                model, 0.0, T, REGULARITY_SAMPLES, opts.seed
            ),
            "hyperbolic_remainder": hyperbolic_remainder_constant(model, T),
            "observation_smoothing": observation_smoothing_constant(model),
        },
        probes=opts.probes,
        seed=opts.seed,
        environment=environment_stamp(),
        config=config_echo(config),
    )
    write_json(output_path(config, f"{model.model_id}.assumptions.json"), report)

    if opts.csv:
        times, norms = singular_decay_series(model, opts.t_min, opts.t_max, opts.nodes)
        fitted = N * times ** (-gamma) if gamma is not None else np.zeros_like(times)
        save_series(
            output_path(config, f"{model.model_id}.decay.csv"),
            ["t", "norm_F", "fit"],
            times,
            norms,
            fitted,
        )
    if gamma is not None:
        logger.info("%s: gamma_hat=%.4f N_hat=%.4g", model.model_id, gamma, N)
    else:
        logger.info("%s: %s", model.model_id, singular)
    return 0
