import logging
import threading

import numpy as np

from riccati_lab.are.residuals import (
    are_algebraic_residual,
    are_integral_residual,
    check_class_q,
    generator_identity_check,
)
from riccati_lab.are.sandwich import value_sandwich_test
from riccati_lab.are.solution import AreSolution
from riccati_lab.cli.dependencies import (
    build_model,
    environment_stamp,
    output_path,
    run_checks,
    select_checks,
    write_json,
)
from riccati_lab.core import tolerances as tol
from riccati_lab.core.errors import HorizonMismatch, InputError
from riccati_lab.core.seeding import sub_rng, unit_probes
from riccati_lab.dre.residuals import (
    check_class_qt,
    evolution_property_residual,
    gain_square_integrability,
    ire_residual,
    ire_strong_residual,
    opric_selfconsistency,
)
from riccati_lab.dre.sandwich import dre_value_sandwich
from riccati_lab.dre.solution import DreSolution
from riccati_lab.dre.solver import reference_integrator, solve_dre
from riccati_lab.dre.uniqueness import uniqueness_contraction_estimate, uniqueness_map_apply
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.schemas.config import RunConfig, config_echo
from riccati_lab.schemas.report import VerificationReport
from riccati_lab.semiflow.paths import ControlPath
from riccati_lab.storage.solution_csv import (
    ARE_FORMAT,
    DRE_FORMAT,
    load_are_solution,
    load_dre_solution,
    solution_format,
)
from riccati_lab.synthesis.closed_loop import (
    closed_loop_fixed_point,
    closed_loop_ode,
    default_grid,
)
from riccati_lab.synthesis.feedback import feedback_synthesis
from riccati_lab.synthesis.identity import fundamental_identity_residual, precheck_residual

logger = logging.getLogger(__name__)

CONTROL_INTERVALS = 40
WINDOW_HALVINGS = 6
MAP_POINTS = 5
MEDIAN_SLACK = 1.05


def _failed_conditions(conditions: dict):
    failed = sorted(name for name, (ok, _) in conditions.items() if not ok)
    return float(len(failed)), 0.5, ", ".join(failed) or None


def _pairs(config: RunConfig, n: int):
    """Seeded (k, x, y) with standard normal x, y."""
    for k in range(config.verify.tuples):
        rng = sub_rng(config.verify.seed, k)
        yield k, rng.standard_normal(n), rng.standard_normal(n)


def dre_checks(config: RunConfig, model: LqModel, sol: DreSolution) -> dict:
    T = sol.T
    nodes = sol.grid.nodes
    scale = max(1.0, float(np.max(np.abs(sol.P))))
    cache = {}
    lock = threading.Lock()

    def window(k: int) -> tuple[float, float]:
        i, j = np.sort(sub_rng(config.verify.seed + 1, k).choice(nodes.size, 2, replace=False))
        return float(nodes[i]), float(nodes[j])

    def reference() -> DreSolution:
        with lock:
            if "reference" not in cache:
                steps = sol.grid.size - 1
                integrator = reference_integrator(model, steps, T)
                cache["reference"] = solve_dre(model, steps, integrator, T=T)
        return cache["reference"]

    def ire():
        worst = 0.0
        for k, x, y in _pairs(config, model.n):
            s, t = window(k)
            res = ire_residual(sol, model, s, t, x, y)
            worst = max(worst, res / (1.0 + np.linalg.norm(x) * np.linalg.norm(y)))
        return worst, tol.IRE_RESIDUAL

    def ire_strong():
        worst = max(
            ire_strong_residual(sol, model, *window(k)) for k in range(config.verify.tuples)
        )
        return worst / scale, tol.IRE_RESIDUAL

    def opric():
        res = opric_selfconsistency(sol, model, 0.0, config.verify.probes, config.verify.seed)
        return res / scale, tol.OPRIC_RESIDUAL

    def evolution():
        x = unit_probes(model.n, 1, config.verify.seed, with_basis=False)[0]
        sigma = float(nodes[nodes.size // 2])
        return evolution_property_residual(sol, model, 0.0, sigma, T, x), tol.EVOLUTION_RESIDUAL

    def gain_integrability():
        worst = 0.0
        for x in unit_probes(model.n, config.verify.probes, config.verify.seed):
            gain, observed = gain_square_integrability(sol, model, 0.0, x)
            worst = max(worst, gain - observed)
        return max(worst, 0.0), tol.IRE_RESIDUAL

    def uniqueness_pair() -> DreSolution:
        with lock:
            if "other" not in cache:
                other = "midpoint" if sol.integrator == "rk4" else "rk4"
                cache["other"] = solve_dre(model, sol.grid.size - 1, other, T=T)
        return cache["other"]

    def contraction():
        P1 = uniqueness_pair()
        rhos = []
        for level in range(WINDOW_HALVINGS):
            delta = (T - sol.grid.t0) * 0.5**level
            rhos.append(
                uniqueness_contraction_estimate(
                    sol, P1, model, delta, config.verify.probes, config.verify.seed
                )
            )
        detail = "rho(delta) = " + ", ".join(f"{r:.4g}" for r in rhos)
        return min(rhos), 1.0, detail

    def uniqueness_map():
        P1 = uniqueness_pair()
        Q = P1 - sol
        worst = 0.0
        for s in np.linspace(sol.grid.t0, T, MAP_POINTS + 1)[:-1]:
            s = float(nodes[np.argmin(np.abs(nodes - s))])
            image = uniqueness_map_apply(Q, sol, P1, s, model)
            worst = max(worst, float(np.linalg.norm(image - Q.at(s), 2)))
        return worst / scale, tol.UNIQUENESS_MAP

    def sandwich():
        worst = 0.0
        for x in unit_probes(model.n, config.verify.probes, config.verify.seed, with_basis=False):
            result = dre_value_sandwich(sol, model, x, 0.0, reference=reference())
            worst = max(worst, result.worst_gap)
        return worst, tol.SANDWICH_GAP

    return {
        "dre.class_qt": lambda: _failed_conditions(check_class_qt(sol, model)),
        "dre.ire": ire,
        "dre.ire_strong": ire_strong,
        "dre.opric": opric,
        "dre.evolution": evolution,
        "dre.gain_integrability": gain_integrability,
        "dre.uniqueness_contraction": contraction,
        "dre.uniqueness_map": uniqueness_map,
        "dre.value_sandwich": sandwich,
    }


def are_checks(config: RunConfig, model: LqModel, sol: AreSolution) -> dict:
    def residual():
        res, scale = are_algebraic_residual(sol, model)
        return res / scale, tol.ARE_RESIDUAL

    def integral():
        worst = 0.0
        for k, x, y in _pairs(config, model.n):
            t = float(sub_rng(config.verify.seed + 1, k).uniform(0.1, 5.0))
            res = are_integral_residual(sol, model, 0.0, t, x, y)
            worst = max(worst, res / (1.0 + np.linalg.norm(x) * np.linalg.norm(y)))
        return worst, tol.IRE_RESIDUAL

    def generator():
        scale = max(1.0, np.linalg.norm(model.A) + np.linalg.norm(model.BBt @ sol.P))
        return generator_identity_check(sol, model) / scale, tol.GENERATOR_IDENTITY

    def sandwich():
        worst = 0.0
        for x in unit_probes(model.n, config.verify.probes, config.verify.seed, with_basis=False):
            worst = max(worst, value_sandwich_test(sol.P, model, x).worst_gap)
        return worst, tol.SANDWICH_GAP

    return {
        "are.residual": residual,
        "are.integral": integral,
        "are.generator_identity": generator,
        "are.class_q": lambda: _failed_conditions(check_class_q(sol, model)),
        "are.value_sandwich": sandwich,
    }


def synthesis_checks(config: RunConfig, model: LqModel, sol) -> dict:
    grid = default_grid(model, sol)
    probes = unit_probes(model.n, config.verify.probes, config.verify.seed, with_basis=False)

    def identity():
        control_grid = TimeGrid.uniform(grid.t0, grid.t1, CONTROL_INTERVALS)
        worst = 0.0
        for k in range(config.verify.controls):
            rng = sub_rng(config.verify.seed + 2, k)
            x = rng.standard_normal(model.n)
            u = ControlPath.random(control_grid, model.m, config.verify.seed + 3, k)
            res = fundamental_identity_residual(sol, model, u, x, grid.t0, grid.t1)
            norm = 1.0 + float(x @ x) + u.lq_norm(2.0) ** 2
            worst = max(worst, res / norm)
        return worst, tol.IDENTITY_RESIDUAL

    def identity_precheck():
        residual, limit = precheck_residual(sol, model, grid.t0, grid.t1)
        return residual / limit, 1.0, f"residual {residual:.3e}, limit {limit:.3e}"

    runs = {}
    lock = threading.Lock()

    def traces(x):
        key = x.tobytes()
        with lock:
            if key not in runs:
                runs[key] = [
                    closed_loop_fixed_point(
                        model, sol, x, r, grid=grid, keep_iterates=False, raise_on_failure=False
                    )
                    for r in config.verify.rates
                ]
        return runs[key]

    def contraction():
        x = probes[0]
        runs = traces(x)
        failures = sum(not run.converged for run in runs)
        # medians over the iterations every rate went through
        common = min(len(run.contraction_factors) for run in runs)
        medians = [
            float(np.median(run.contraction_factors[:common])) if common else 0.0 for run in runs
        ]
        failures += sum(b > MEDIAN_SLACK * a for a, b in zip(medians, medians[1:]))
        detail = "median factors " + ", ".join(f"{m:.4g}" for m in medians)
        return float(failures), 0.5, detail

    def match():
        x = probes[0]
        direct = closed_loop_ode(model, sol, x, grid).states
        worst = 0.0
        for run in traces(x):
            worst = max(worst, float(np.max(np.abs(run.limit.states - direct))))
        return worst / (1.0 + np.linalg.norm(x)), tol.FIXED_POINT_MATCH

    def feedback_cost():
        worst = 0.0
        P0 = sol.at(grid.t0)
        for x in probes:
            _, _, J_hat = feedback_synthesis(model, sol, x, grid)
            worst = max(worst, abs(J_hat - float(x @ P0 @ x)) / (1.0 + float(x @ x)))
        return worst, tol.FEEDBACK_COST

    return {
        "synthesis.fundamental_identity": identity,
        "synthesis.identity_precheck": identity_precheck,
        "synthesis.closed_loop_contraction": contraction,
        "synthesis.closed_loop_match": match,
        "synthesis.feedback_cost": feedback_cost,
    }


def load_solution(config: RunConfig) -> tuple[LqModel, object, str]:
    if config.verify.solution is None:
        raise InputError("verify needs verify.solution (the solution file)")
    path = config.verify.solution
    kind = solution_format(path)
    model = build_model(config)
    if kind == DRE_FORMAT:
        grid = load_dre_solution(path).grid
        if model.is_infinite or model.T != grid.t1:
            model = model.with_horizon(grid.t1)
        sol = load_dre_solution(path, model)
        label = "dre"
    elif kind == ARE_FORMAT:
        if not model.is_infinite:
            raise HorizonMismatch(
                f"horizon mismatch: ARE solution against finite model {model.model_id}"
            )
        sol = load_are_solution(path, model)
        label = "are"
    else:
        raise InputError(f"{path} is not a solution file")
    if sol.model_id.split("@")[0] != model.model_id.split("@")[0]:
        raise InputError(f"solution belongs to {sol.model_id}, model is {model.model_id}")
    return model, sol, label


def cmd_verify(config: RunConfig) -> int:
    model, sol, label = load_solution(config)
    if label == "dre":
        available = dre_checks(config, model, sol)
    else:
        available = are_checks(config, model, sol)
    available.update(synthesis_checks(config, model, sol))
    checks = run_checks(config, select_checks(config, available))
    report = VerificationReport(
        command=f"verify {label}",
        model_id=model.model_id,
        checks=checks,
        values={"solution": config.verify.solution},
        environment=environment_stamp(),
        config=config_echo(config),
    )
    write_json(output_path(config, f"{model.model_id}.{label}.verify.json"), report)
    if not report.passed:
        logger.warning("failed checks: %s", ", ".join(report.failed))
    return 0 if report.passed else 1
