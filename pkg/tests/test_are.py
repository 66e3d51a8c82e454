import math

import numpy as np
import pytest

from riccati_lab.are.residuals import (
    are_algebraic_residual,
    are_integral_residual,
    check_class_q,
    generator_identity_check,
)
from riccati_lab.are.sandwich import infinite_feedback_cost, value_sandwich_test
from riccati_lab.are.solver import solve_are_newton, solve_are_spectral
from riccati_lab.core.errors import CandidateOutsideClosedLoop, HorizonMismatch, InputError
from riccati_lab.models.generators import heat_boundary_surrogate, random_stable, scalar_model
from riccati_lab.numkernel.grid import TimeGrid

scalar = scalar_model()
ROOT = math.sqrt(2) - 1


@pytest.mark.parametrize("solver", [solve_are_newton, solve_are_spectral])
def test_scalar_solution(solver):
    sol = solver(scalar)
    assert sol.P[0, 0] == pytest.approx(ROOT, abs=1e-12)
    assert sol.K[0, 0] == pytest.approx(ROOT, abs=1e-12)
    assert sol.closed_loop_abscissa == pytest.approx(-math.sqrt(2), abs=1e-12)
    assert sol.model_id == scalar.model_id


@pytest.mark.parametrize(
    "model",
    [heat_boundary_surrogate(8, 0.25)]
    + [random_stable(n, max(1, n // 4), n // 2, seed=n) for n in (4, 8, 16, 32)],
    ids=["heat", "random-4", "random-8", "random-16", "random-32"],
)
def test_newton_and_spectral_agree(model):
    newton = solve_are_newton(model)
    spectral = solve_are_spectral(model)
    assert newton.iterations >= 1
    gap = np.linalg.norm(newton.P - spectral.P, 2)
    assert gap <= 1e-9 * np.linalg.norm(newton.P, 2)
    residual, scale = are_algebraic_residual(newton, model)
    assert residual <= 1e-9 * scale


def test_are_needs_infinite_horizon():
    with pytest.raises(HorizonMismatch):
        solve_are_newton(scalar.with_horizon(1.0))
    with pytest.raises(HorizonMismatch):
        solve_are_spectral(scalar.with_horizon(1.0))


def test_integral_form_holds_for_solution():
    sol = solve_are_newton(scalar)
    x, y = np.array([1.0]), np.array([-2.0])
    assert are_integral_residual(sol, scalar, 0.0, 2.0, x, y) < 1e-9
    assert are_integral_residual(sol, scalar, 0.0, 2.0, x, y, rule="simpson") < 1e-9
    assert are_integral_residual(sol, scalar, 1.0, 1.0, x, y) == 0.0
    wrong = sol.perturbed([[0.1]], scalar)
    assert are_integral_residual(wrong, scalar, 0.0, 2.0, x, y) > 1e-3
    with pytest.raises(InputError):
        are_integral_residual(sol, scalar, 2.0, 1.0, x, y)


def test_integral_form_on_stiff_model():
    model = heat_boundary_surrogate(8, 0.25)
    sol = solve_are_newton(model)
    rng = np.random.default_rng(3)
    x, y = rng.standard_normal(8), rng.standard_normal(8)
    residual = are_integral_residual(sol, model, 0.0, 1.0, x, y)
    assert residual / (1 + np.linalg.norm(x) * np.linalg.norm(y)) < 1e-6


def test_generator_identity_and_class():
    model = random_stable(5, 2, 2, seed=1)
    sol = solve_are_newton(model)
    assert generator_identity_check(sol, model) < 1e-10
    conditions = check_class_q(sol, model)
    assert set(conditions) == {"symmetry", "psd", "gain_bounded"}
    assert all(ok for ok, _ in conditions.values())


def test_class_flags_indefinite_candidate():
    sol = solve_are_newton(scalar).perturbed([[-1.0]], scalar)
    ok, lowest = check_class_q(sol, scalar)["psd"]
    assert not ok and lowest < 0


def test_value_sandwich_for_solution():
    sol = solve_are_newton(scalar)
    result = value_sandwich_test(sol.P, scalar, np.array([1.0]), reference=sol)
    assert result.passed()
    assert result.candidate_value == pytest.approx(ROOT)


def test_value_sandwich_for_vector_model():
    model = random_stable(4, 2, 2, seed=5)
    sol = solve_are_newton(model)
    x = np.array([1.0, 0.0, -1.0, 0.5])
    assert value_sandwich_test(sol.P, model, x, reference=sol).worst_gap < 1e-6


def test_value_sandwich_flags_perturbed_candidate():
    sol = solve_are_newton(scalar)
    result = value_sandwich_test(sol.P + 0.1, scalar, np.array([1.0]), reference=sol)
    assert not result.passed()
    assert result.upper_gap < 0


@pytest.mark.parametrize("seed", range(10))
def test_value_sandwich_flags_psd_perturbations(seed):
    model = random_stable(4, 2, 2, seed=5)
    sol = solve_are_newton(model)
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((4, 4))
    D = 2e-3 * (np.eye(4) + G @ G.T / np.linalg.norm(G @ G.T, 2))
    x = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    result = value_sandwich_test(sol.P + D, model, x, reference=sol)
    assert result.worst_gap >= 1e-4
    assert result.upper_gap == pytest.approx(-float(x @ D @ x), abs=1e-5)


@pytest.mark.parametrize(
    "Q, T_trunc",
    [
        ([[-1.0]], None),
        ([[1.0, 0.0], [0.0, 1.0]], None),
        ([[ROOT]], 1.0),
    ],
)
def test_value_sandwich_rejects(Q, T_trunc):
    with pytest.raises(InputError):
        value_sandwich_test(Q, scalar, np.array([1.0]), T_trunc=T_trunc)


def test_destabilizing_candidate_is_outside_closed_loop():
    grid = TimeGrid.uniform(0.0, 1.0, 10)
    with pytest.raises(CandidateOutsideClosedLoop):
        infinite_feedback_cost(scalar, np.array([[-2.0]]), np.array([1.0]), grid)
