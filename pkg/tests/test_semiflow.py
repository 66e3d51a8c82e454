import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from riccati_lab.core.errors import HorizonMismatch, InputError, NoSingularComponent
from riccati_lab.models.generators import (
    GradedFamily,
    heat_boundary_surrogate,
    random_stable,
    scalar_model,
)
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.semiflow.duality import adjoint_duality_residual
from riccati_lab.semiflow.input_to_state import (
    improved_regularity_probe,
    input_to_state,
    input_to_state_path,
    linf_input_bound,
    regularity_controls,
)
from riccati_lab.semiflow.metrology import (
    admissibility_constant,
    estimate_singular_decay,
    fit_power_law,
    hyperbolic_remainder_constant,
    observation_smoothing_constant,
    weighted_kernel_Lq,
)
from riccati_lab.semiflow.paths import ControlPath, Trajectory

scalar = scalar_model()


def test_control_path_is_right_continuous():
    grid = TimeGrid.uniform(0.0, 1.0, 2)
    u = ControlPath(grid, [1.0, 2.0, 2.0])
    assert u.at(0.0)[0] == 1.0
    assert u.at(0.5)[0] == 2.0
    assert u.at(0.49)[0] == 1.0
    with pytest.raises(InputError):
        u.at(1.5)


def test_control_path_norms():
    grid = TimeGrid.uniform(0.0, 4.0, 8)
    u = ControlPath.constant(grid, [2.0])
    assert u.lq_norm(2.0) == pytest.approx(4.0)
    assert u.lq_norm(1.0) == pytest.approx(8.0)
    assert u.sup_norm() == 2.0
    assert (u + u.scaled(-1.0)).sup_norm() == 0.0


def test_random_controls_are_seeded():
    grid = TimeGrid.uniform(0.0, 1.0, 10)
    a = ControlPath.random(grid, 2, seed=5, index=1)
    assert_allclose(a.values, ControlPath.random(grid, 2, seed=5, index=1).values)
    assert not np.allclose(a.values, ControlPath.random(grid, 2, seed=5, index=2).values)
    with pytest.raises(InputError):
        a + ControlPath.zeros(TimeGrid.uniform(0.0, 2.0, 10), 2)


def test_trajectory_checks_shapes():
    grid = TimeGrid.uniform(0.0, 1.0, 2)
    with pytest.raises(InputError):
        Trajectory(grid, np.zeros((2, 1)))
    with pytest.raises(InputError):
        Trajectory(grid, np.zeros((3, 1)), cost=-1.0)
    assert_allclose(Trajectory(grid, np.ones((3, 1))).at_node(0.5), [1.0])


def test_input_to_state_is_exact_for_piecewise_constant_controls():
    grid = TimeGrid.uniform(0.0, 1.0, 7)
    u = ControlPath.constant(grid, [1.0])
    assert input_to_state(scalar, 0.0, u, 1.0)[0] == pytest.approx(1 - math.exp(-1.0), rel=1e-12)
    assert input_to_state(scalar, 0.5, u, 0.5)[0] == 0.0


def test_input_to_state_is_linear():
    model = random_stable(4, 2, 2, seed=3)
    grid = TimeGrid.uniform(0.0, 2.0, 20)
    u = ControlPath.random(grid, 2, seed=1)
    v = ControlPath.random(grid, 2, seed=2)
    lhs = input_to_state(model, 0.3, u + v.scaled(2.0), 1.7)
    rhs = input_to_state(model, 0.3, u, 1.7) + 2.0 * input_to_state(model, 0.3, v, 1.7)
    assert_allclose(lhs, rhs, atol=1e-12)


def test_input_to_state_path_with_initial_state():
    grid = TimeGrid.uniform(0.0, 2.0, 10)
    nodes, states = input_to_state_path(scalar, 0.0, ControlPath.constant(grid, [1.0]), x=[3.0])
    expected = 3.0 * np.exp(-nodes) + 1.0 - np.exp(-nodes)
    assert_allclose(states[:, 0], expected, rtol=1e-12)


@pytest.mark.parametrize("s, t, m", [(0.6, 0.4, 1), (0.0, 1.5, 1), (0.0, 1.0, 2)])
def test_input_to_state_rejects_bad_windows(s, t, m):
    grid = TimeGrid.uniform(0.0, 1.0, 4)
    with pytest.raises(InputError):
        input_to_state(scalar, s, ControlPath.zeros(grid, m), t)


def test_linf_input_bound_scalar():
    assert linf_input_bound(scalar, 0.0, 2.0) == pytest.approx(1 - math.exp(-2.0), rel=1e-8)
    with pytest.raises(InputError):
        linf_input_bound(scalar, 1.0, 1.0)


def test_regularity_controls_are_normalized():
    model = heat_boundary_surrogate(4, 0.25)
    controls = regularity_controls(model, 0.0, 1.0, samples=3, seed=0)
    assert len(controls) == 3
    for u in controls:
        assert u.lq_norm(model.assumption.q_prime) == pytest.approx(1.0)
    value = improved_regularity_probe(model, 0.0, 1.0, 3, 0, controls=controls)
    assert math.isfinite(value) and value > 0


def test_fit_power_law_recovers_exponent():
    t = np.geomspace(1e-3, 1.0, 20)
    gamma, N, rms = fit_power_law(t, 3.0 * t**-0.4)
    assert gamma == pytest.approx(0.4)
    assert N == pytest.approx(3.0)
    assert rms < 1e-12
    with pytest.raises(InputError):
        fit_power_law(t, -t)


def test_heat_singular_decay_matches_grading():
    gamma, N, rms = estimate_singular_decay(heat_boundary_surrogate(64, 0.5), 1e-4, 1e-1, 32)
    assert gamma == pytest.approx(0.75, abs=0.05)
    assert N > 0


def test_heat_singular_decay_on_a_small_surrogate():
    gamma, _, rms = estimate_singular_decay(heat_boundary_surrogate(16, 0.5), 1e-3, 1e-2, 16)
    assert gamma == pytest.approx(0.75, abs=0.05)
    assert rms < 0.05


def test_singular_decay_grows_with_grading():
    gammas = [
        estimate_singular_decay(heat_boundary_surrogate(32, beta), 1e-3, 1e-2, 16)[0]
        for beta in (0.0, 0.25, 0.5)
    ]
    assert gammas == sorted(gammas)
    assert gammas[0] < gammas[1] < gammas[2]


def test_admissibility_constant_grows_with_dimension():
    family = GradedFamily(beta=0.5)
    constants = [admissibility_constant(model, 1.0, probes=4) for model in family.models()]
    assert all(b >= a for a, b in zip(constants, constants[1:]))
    assert constants[-1] > constants[0]


def test_no_singular_component():
    model = LqModel.from_matrices(
        np.diag([-1.0, -2.0]), [[1.0], [1.0]], np.eye(2), parabolic_block=[]
    )
    with pytest.raises(NoSingularComponent):
        estimate_singular_decay(model, 1e-4, 1e-1)


def test_admissibility_constant_scalar():
    expected = (1 - math.exp(-2.0)) / 2
    assert admissibility_constant(scalar, 1.0, probes=4) == pytest.approx(expected, rel=1e-8)


def test_weighted_kernel_lq_scalar():
    expected = ((1 - math.exp(-1.5)) / 1.5) ** (1 / 1.5)
    value = weighted_kernel_Lq(scalar, 0.0, 1.5, 0.0, 1.0, probes=2)
    assert value == pytest.approx(expected, rel=1e-8)
    with pytest.raises(InputError):
        weighted_kernel_Lq(scalar, 0.0, 2.5, 0.0, 1.0)
    with pytest.raises(InputError):
        weighted_kernel_Lq(scalar, 1.0, 1.5, 0.0, 1.0)


def test_remainder_and_smoothing_constants_for_heat():
    model = heat_boundary_surrogate(6, 0.25)
    assert hyperbolic_remainder_constant(model, 1.0) == 0.0
    assert observation_smoothing_constant(model) == pytest.approx(1.0)


def test_adjoint_duality_holds_to_roundoff():
    model = random_stable(4, 2, 3, seed=2)
    grid = TimeGrid.uniform(0.0, 2.0, 400)
    rng = np.random.default_rng(0)
    h = ControlPath(grid, rng.standard_normal((grid.size, 2)))
    g = Trajectory(grid, rng.standard_normal((grid.size, 4)))
    res_S, res_T = adjoint_duality_residual(
        model, 0.1, h, g, rng.standard_normal(4), rng.standard_normal(2), 2.0
    )
    assert res_S < 1e-10
    assert res_T < 1e-10


def test_adjoint_duality_rejects_mismatched_horizon():
    grid = TimeGrid.uniform(0.0, 1.0, 10)
    h = ControlPath.zeros(grid, 1)
    g = Trajectory(grid, np.zeros((grid.size, 1)))
    with pytest.raises(HorizonMismatch):
        adjoint_duality_residual(scalar, 0.0, h, g, [1.0], [1.0], 2.0)
