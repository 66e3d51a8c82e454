import logging

import numpy as np

from riccati_lab.are.residuals import are_algebraic_residual, check_class_q
from riccati_lab.are.solver import solve_are_newton, solve_are_spectral
from riccati_lab.cli.dependencies import (
    environment_stamp,
    finite_model,
    infinite_model,
    output_path,
    run_checks,
    write_json,
)
from riccati_lab.core import tolerances as tol
from riccati_lab.dre.residuals import check_class_qt, ire_strong_residual
from riccati_lab.dre.solver import solve_dre
from riccati_lab.schemas.config import RunConfig, config_echo
from riccati_lab.schemas.report import VerificationReport
from riccati_lab.storage.solution_csv import save_are_solution, save_dre_solution

logger = logging.getLogger(__name__)


def _failed_conditions(conditions: dict) -> tuple[float, float, str]:
    failed = sorted(name for name, (ok, _) in conditions.items() if not ok)
    return float(len(failed)), 0.5, ", ".join(failed) or None


def solve_dre_command(config: RunConfig) -> int:
    model = finite_model(config)
    sol = solve_dre(model, config.grid.steps, config.grid.integrator)
    path = save_dre_solution(sol, output_path(config, f"{model.model_id}.dre.csv"))
    scale = max(1.0, float(np.max(np.abs(sol.P))))
    checks = {
        "dre.class_qt": lambda: _failed_conditions(check_class_qt(sol, model)),
        "dre.ire_strong": lambda: (
            ire_strong_residual(sol, model, 0.0, model.T) / scale,
            tol.IRE_RESIDUAL,
        ),
    }
    report = VerificationReport(
        command="solve dre",
        model_id=model.model_id,
        checks=run_checks(config, checks),
        values={
            "solution": str(path),
            "integrator": sol.integrator,
            "steps": config.grid.steps,
            "T": model.T,
            "P0": sol.P[0].tolist(),
        },
        environment=environment_stamp(),
        config=config_echo(config),
    )
    write_json(output_path(config, f"{model.model_id}.dre.report.json"), report)
    return 0 if report.passed else 1


def solve_are_command(config: RunConfig) -> int:
    model = infinite_model(config)
    if config.solve.method == "spectral":
        sol = solve_are_spectral(model)
    else:
        sol = solve_are_newton(model)
    path = save_are_solution(sol, output_path(config, f"{model.model_id}.are.csv"))

    def algebraic():
        residual, scale = are_algebraic_residual(sol, model)
        return residual / scale, tol.ARE_RESIDUAL

    checks = {
        "are.residual": algebraic,
        "are.class_q": lambda: _failed_conditions(check_class_q(sol, model)),
    }
    report = VerificationReport(
        command="solve are",
        model_id=model.model_id,
        checks=run_checks(config, checks),
        values={
            "solution": str(path),
            "method": sol.method,
            "iterations": sol.iterations,
            "closed_loop_abscissa": sol.closed_loop_abscissa,
            "P": sol.P.tolist(),
        },
        environment=environment_stamp(),
        config=config_echo(config),
    )
    write_json(output_path(config, f"{model.model_id}.are.report.json"), report)
    return 0 if report.passed else 1


def cmd_solve(config: RunConfig, kind: str) -> int:
    logger.info("solve %s", kind)
    if kind == "dre":
        return solve_dre_command(config)
    return solve_are_command(config)
