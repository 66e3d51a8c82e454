import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from riccati_lab.are.solver import solve_are_newton
from riccati_lab.core.errors import ConvergenceError, InputError, PrecheckFailed
from riccati_lab.dre.solver import solve_dre
from riccati_lab.models.catalog import shipped_model
from riccati_lab.models.generators import random_stable, scalar_model
from riccati_lab.numkernel.expm import input_gramian_blocks
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.semiflow.paths import ControlPath
from riccati_lab.synthesis.closed_loop import (
    closed_loop_fixed_point,
    closed_loop_ode,
    default_grid,
    resolving_step,
)
from riccati_lab.synthesis.dp_oracle import discrete_dp_oracle
from riccati_lab.synthesis.feedback import feedback_mismatch, feedback_synthesis
from riccati_lab.synthesis.gains import ConstantGain, as_gain_source
from riccati_lab.synthesis.identity import fundamental_identity_residual, fundamental_identity_terms
from riccati_lab.synthesis.simulate import simulate

scalar = scalar_model()
are = solve_are_newton(scalar)
ROOT = math.sqrt(2) - 1


def test_gain_sources():
    assert isinstance(as_gain_source([[1.0]]), ConstantGain)
    assert as_gain_source(are) is are
    with pytest.raises(InputError):
        as_gain_source([1.0, 2.0])


def test_simulate_free_response():
    grid = TimeGrid.uniform(0.0, 1.0, 100)
    traj = simulate(scalar, ControlPath.zeros(grid, 1), np.array([1.0]))
    assert_allclose(traj.states[:, 0], np.exp(-grid.nodes), rtol=1e-12)
    assert traj.cost == pytest.approx((1 - math.exp(-2.0)) / 2, rel=1e-9)
    assert traj.running_cost[0] == 0.0
    assert traj.running_cost[-1] == pytest.approx(traj.cost)


def test_simulate_rejects_mismatched_control():
    grid = TimeGrid.uniform(0.0, 1.0, 10)
    with pytest.raises(InputError):
        simulate(scalar, ControlPath.zeros(grid, 2), np.array([1.0]))
    with pytest.raises(InputError):
        simulate(scalar.with_horizon(0.5), ControlPath.zeros(grid, 1), np.array([1.0]))


def test_resolving_grid():
    model = random_stable(3, 1, 1, seed=0)
    h = resolving_step(model)
    assert h * np.max(np.abs(model.spectral.eigenvalues)) <= 0.1 + 1e-12
    grid = default_grid(scalar, are)
    assert grid.t0 == 0.0
    assert grid.t1 == pytest.approx(math.log(1e6))


def test_closed_loop_ode_constant_gain():
    grid = TimeGrid.uniform(0.0, 2.0, 200)
    traj = closed_loop_ode(scalar, are, np.array([2.0]), grid)
    assert_allclose(traj.states[:, 0], 2.0 * np.exp(-math.sqrt(2) * grid.nodes), rtol=1e-12)
    assert_allclose(traj.controls.values[:, 0], -ROOT * traj.states[:, 0], rtol=1e-12)


def test_feedback_synthesis_attains_are_value():
    x = np.array([1.5])
    u_hat, y_hat, J_hat = feedback_synthesis(scalar, are, x)
    assert J_hat == pytest.approx(ROOT * 2.25, rel=1e-9)
    assert feedback_mismatch(scalar, are, u_hat, y_hat) < 1e-14


def test_feedback_synthesis_attains_dre_value():
    model = random_stable(4, 2, 2, seed=3, horizon=1.0)
    sol = solve_dre(model, 400)
    x = np.array([1.0, 0.5, -1.0, 0.0])
    _, _, J_hat = feedback_synthesis(model, sol, x)
    assert J_hat == pytest.approx(float(x @ sol.P[0] @ x), abs=1e-8)


def test_feedback_beats_every_other_control():
    model = random_stable(4, 2, 2, seed=3, horizon=1.0)
    sol = solve_dre(model, 400)
    x = np.array([1.0, 0.5, -1.0, 0.0])
    u_hat, _, J_hat = feedback_synthesis(model, sol, x)
    grid = TimeGrid.uniform(0.0, 1.0, 40)
    costs = [simulate(model, ControlPath.zeros(grid, 2), x).cost]
    costs += [
        simulate(model, ControlPath.random(grid, 2, seed=21, index=k, scale=0.5), x).cost
        for k in range(20)
    ]
    assert min(costs) >= J_hat - 1e-8
    # sampled optimal control
    held = simulate(model, u_hat, x).cost
    assert J_hat - 1e-8 <= held < J_hat + 1e-3


def test_fixed_point_matches_direct_integration():
    grid = TimeGrid.uniform(0.0, 2.0, 2000)
    x = np.array([1.0])
    direct = closed_loop_ode(scalar, are, x, grid).states
    for r in (0.0, 1.0, 4.0):
        trace = closed_loop_fixed_point(scalar, are, x, r, grid=grid)
        assert trace.converged
        assert trace.median_factor < 1.0
        assert np.max(np.abs(trace.limit.states - direct)) < 1e-6


def test_fixed_point_matches_direct_integration_on_long_window():
    composite = shipped_model("composite")
    gain = solve_are_newton(composite)
    x = np.ones(composite.n) / math.sqrt(composite.n)
    grid = default_grid(composite, gain)
    direct = closed_loop_ode(composite, gain, x, grid).states
    for r in (1.0, 2.0, 4.0, 8.0):
        trace = closed_loop_fixed_point(composite, gain, x, r, grid=grid, keep_iterates=False)
        assert trace.converged
        assert np.max(np.abs(trace.limit.states - direct)) < 1e-6


def test_contraction_factor_falls_as_weight_grows():
    grid = TimeGrid.uniform(0.0, 2.0, 2000)
    traces = [
        closed_loop_fixed_point(scalar, are, np.array([1.0]), r, grid=grid)
        for r in (1.0, 2.0, 4.0, 8.0)
    ]
    common = min(len(trace.contraction_factors) for trace in traces)
    medians = [float(np.median(trace.contraction_factors[:common])) for trace in traces]
    assert all(b <= a for a, b in zip(medians, medians[1:]))
    assert medians[-1] < medians[0]


def test_fixed_point_keeps_iterates():
    grid = TimeGrid.uniform(0.0, 1.0, 100)
    trace = closed_loop_fixed_point(scalar, are, np.array([1.0]), 2.0, grid=grid)
    assert len(trace.iterates) == trace.iterations + 1
    assert trace.differences[-1] <= trace.differences[0]
    lean = closed_loop_fixed_point(
        scalar, are, np.array([1.0]), 2.0, grid=grid, keep_iterates=False
    )
    assert len(lean.iterates) == 1


def test_fixed_point_reports_non_convergence():
    grid = TimeGrid.uniform(0.0, 1.0, 100)
    with pytest.raises(ConvergenceError):
        closed_loop_fixed_point(scalar, are, np.array([1.0]), 1.0, max_iter=2, grid=grid)
    trace = closed_loop_fixed_point(
        scalar, are, np.array([1.0]), 1.0, max_iter=2, grid=grid, raise_on_failure=False
    )
    assert not trace.converged


def test_fixed_point_rejects_bad_arguments():
    with pytest.raises(InputError):
        closed_loop_fixed_point(scalar, are, np.array([1.0]), -1.0)
    with pytest.raises(InputError):
        closed_loop_fixed_point(scalar, are, np.array([1.0]), 1.0, grid=TimeGrid.graded(0.0, 1.0))


def test_fundamental_identity_for_are_solution():
    grid = TimeGrid.uniform(0.0, 2.0, 40)
    u = ControlPath.random(grid, 1, seed=4)
    x = np.array([0.7])
    assert fundamental_identity_residual(are, scalar, u, x, 0.0, 2.0) < 1e-9
    terms = fundamental_identity_terms(are, scalar, u, x, 0.0, 2.0)
    assert terms.cost > 0 and terms.completed_square > 0


def test_fundamental_identity_for_dre_solution():
    model = random_stable(4, 2, 2, seed=3, horizon=1.0)
    sol = solve_dre(model, 200)
    u = ControlPath.random(TimeGrid.uniform(0.0, 1.0, 40), 2, seed=9)
    x = np.array([0.3, -1.0, 0.2, 0.8])
    assert fundamental_identity_residual(sol, model, u, x, 0.0, 1.0) < 1e-7


def test_fundamental_identity_for_many_controls():
    heat = shipped_model("heat")
    gain = solve_are_newton(heat)
    grid = TimeGrid.uniform(0.0, 0.5, 20)
    rng = np.random.default_rng(8)
    worst = 0.0
    for k in range(50):
        x = rng.standard_normal(heat.n)
        u = ControlPath.random(grid, heat.m, seed=8, index=k)
        residual = fundamental_identity_residual(gain, heat, u, x, 0.0, 0.5)
        worst = max(worst, residual / (1.0 + float(x @ x) + u.lq_norm(2.0) ** 2))
    assert worst < 1e-5


def test_fundamental_identity_converges_with_solution_grid():
    model = random_stable(4, 2, 2, seed=3, horizon=1.0)
    u = ControlPath.random(TimeGrid.uniform(0.0, 1.0, 40), 2, seed=9)
    x = np.array([0.3, -1.0, 0.2, 0.8])
    residuals = [
        fundamental_identity_terms(solve_dre(model, steps), model, u, x, 0.0, 1.0, check=False)
        .residual
        for steps in (20, 40, 80)
    ]
    assert residuals[0] / residuals[1] > 6
    assert residuals[1] / residuals[2] > 6


def test_fundamental_identity_prechecks_candidate():
    grid = TimeGrid.uniform(0.0, 2.0, 40)
    u = ControlPath.random(grid, 1, seed=4)
    wrong = are.perturbed([[0.2]], scalar)
    with pytest.raises(PrecheckFailed):
        fundamental_identity_residual(wrong, scalar, u, np.array([1.0]), 0.0, 2.0)
    terms = fundamental_identity_terms(wrong, scalar, u, np.array([1.0]), 0.0, 2.0, check=False)
    assert terms.residual > 1e-3


def test_dp_oracle_approaches_dre_value():
    model = scalar.with_horizon(1.0)
    sol = solve_dre(model, 400)
    coarse = discrete_dp_oracle(model, 1.0, 1e-2).cost([1.0])
    fine = discrete_dp_oracle(model, 1.0, 1e-3).cost([1.0])
    exact = float(sol.P[0, 0, 0])
    assert abs(fine - exact) < abs(coarse - exact)
    assert fine == pytest.approx(exact, abs=1e-2)
    with pytest.raises(InputError):
        discrete_dp_oracle(model, 1.0, 0.3)


def test_dp_oracle_last_steps_in_closed_form():
    model = random_stable(3, 1, 2, seed=1, horizon=1.0)
    dt = 0.1
    oracle = discrete_dp_oracle(model, 1.0, dt)
    assert_allclose(oracle.P[-1], 0.0)
    assert_allclose(oracle.P[-2], dt * model.RtR, rtol=1e-12, atol=1e-15)
    assert_allclose(oracle.gains[-1], 0.0)
    F, G, _, _ = input_gramian_blocks(model.A, model.B, dt)
    Qd = dt * model.RtR
    L = np.linalg.solve(dt * np.eye(1) + G.T @ Qd @ G, G.T @ Qd @ F)
    expected = Qd + F.T @ Qd @ F - F.T @ Qd @ G @ L
    assert_allclose(oracle.P[-3], expected, rtol=1e-10, atol=1e-14)
    assert_allclose(oracle.gains[-2], L, rtol=1e-10, atol=1e-14)


def test_dp_oracle_converges_at_first_order():
    model = scalar.with_horizon(1.0)
    exact = float(solve_dre(model, 2000).P[0, 0, 0])
    errors = [
        abs(discrete_dp_oracle(model, 1.0, dt).cost([1.0]) - exact) for dt in (1e-2, 5e-3, 2.5e-3)
    ]
    assert errors[0] / errors[1] == pytest.approx(2.0, abs=0.2)
    assert errors[1] / errors[2] == pytest.approx(2.0, abs=0.2)


def test_dp_oracle_agrees_with_feedback_cost():
    model = random_stable(4, 2, 2, seed=3, horizon=1.0)
    x = np.array([1.0, 0.5, -1.0, 0.0])
    _, _, J_hat = feedback_synthesis(model, solve_dre(model, 1000), x)
    assert discrete_dp_oracle(model, 1.0, 1e-3).cost(x) == pytest.approx(J_hat, rel=1e-2)
