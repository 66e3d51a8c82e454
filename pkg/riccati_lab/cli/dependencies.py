import json
import logging
import platform
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from riccati_lab import __version__
from riccati_lab.core.errors import HorizonMismatch, InputError, LabError
from riccati_lab.core.parallel import ordered_map
from riccati_lab.models.generators import (
    composite_surrogate,
    heat_boundary_surrogate,
    random_stable,
    scalar_model,
)
from riccati_lab.models.lq_model import LqModel
from riccati_lab.schemas.config import ModelSource, RunConfig
from riccati_lab.schemas.report import CheckResult
from riccati_lab.storage.files import atomic_write_text
from riccati_lab.storage.model_file import load_model

logger = logging.getLogger(__name__)

# a check returns (residual, default tolerance) or (residual, default tolerance, detail)
Check = Callable[[], tuple]


def build_model(config: RunConfig) -> LqModel:
    section = config.model
    if section.source == ModelSource.file:
        return load_model(section.path)
    if section.source == ModelSource.heat:
        return heat_boundary_surrogate(section.n, section.beta, horizon=section.horizon)
    if section.source == ModelSource.composite:
        return composite_surrogate(
            section.n_h,
            section.n_p,
            section.kappa,
            section.damping,
            beta=section.beta,
            seed=section.seed,
            horizon=section.horizon,
        )
    if section.source == ModelSource.random:
        return random_stable(
            section.n,
            section.m,
            section.p,
            seed=section.seed,
            margin=section.margin,
            horizon=section.horizon,
        )
    return scalar_model(section.a, section.b, section.r, horizon=section.horizon)


def finite_model(config: RunConfig) -> LqModel:
    model = build_model(config)
    if config.grid.T is not None:
        model = model.with_horizon(config.grid.T)
    if model.is_infinite:
        raise HorizonMismatch(
            f"horizon mismatch: the DRE needs a finite T, model {model.model_id} is infinite"
        )
    return model


def infinite_model(config: RunConfig) -> LqModel:
    model = build_model(config)
    if not model.is_infinite:
        raise HorizonMismatch(
            f"horizon mismatch: the ARE needs an infinite horizon, model {model.model_id}"
            f" has T={model.T:g}"
        )
    return model


def environment_stamp() -> dict[str, str]:
    return {
        "riccati_lab": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": sys.platform,
    }


def output_path(config: RunConfig, name: str) -> Path:
    return Path(config.output.dir) / name


def resolve_tolerance(config: RunConfig, name: str, default: float) -> tuple[float, str]:
    override = config.tolerances.lookup(name)
    if override is None:
        return float(default), "default"
    return float(override), "config"


def _run_one(config: RunConfig, name: str, check: Check) -> CheckResult:
    start = time.perf_counter()
    detail = None
    try:
        outcome = check()
        residual, default = outcome[0], outcome[1]
        if len(outcome) > 2:
            detail = outcome[2]
    except LabError as exc:
        logger.warning("check %s raised: %s", name, exc.detail)
        residual, default, detail = float("inf"), 1.0, exc.detail
    tolerance, source = resolve_tolerance(config, name, default)
    return CheckResult.evaluate(
        residual,
        tolerance,
        runtime=time.perf_counter() - start,
        tolerance_source=source,
        detail=detail,
    )


def run_checks(config: RunConfig, checks: dict[str, Check]) -> dict[str, CheckResult]:
    names = sorted(checks)
    results = ordered_map(lambda name: _run_one(config, name, checks[name]), names)
    for name, result in zip(names, results):
        logger.info(
            "%-36s %s residual=%.3e tol=%.1e",
            name,
            "PASS" if result.passed else "FAIL",
            result.residual,
            result.tolerance,
        )
    return dict(zip(names, results))


def select_checks(config: RunConfig, available: dict[str, Check]) -> dict[str, Check]:
    wanted = config.verify.checks
    if wanted is None:
        return available
    unknown = sorted(set(wanted) - set(available))
    if unknown:
        raise InputError(
            f"unknown checks {', '.join(unknown)}; available: {', '.join(sorted(available))}"
        )
    return {name: available[name] for name in wanted}


def write_json(path: Path, data) -> Path:
    if hasattr(data, "model_dump_json"):
        text = data.model_dump_json(indent=2)
    else:
        text = json.dumps(data, indent=2, sort_keys=True)
    return atomic_write_text(path, text + "\n")
