import numpy as np
import pytest
from numpy.testing import assert_array_equal

from riccati_lab.are.solver import solve_are_newton
from riccati_lab.core.errors import InputError
from riccati_lab.dre.solver import solve_dre
from riccati_lab.models.generators import composite_surrogate, random_stable, scalar_model
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.semiflow.paths import ControlPath
from riccati_lab.storage.model_file import dumps_model, load_model, loads_model, save_model
from riccati_lab.storage.solution_csv import (
    ARE_FORMAT,
    DRE_FORMAT,
    load_are_solution,
    load_dre_solution,
    save_are_solution,
    save_dre_solution,
    save_series,
    save_trajectory,
    solution_format,
)
from riccati_lab.synthesis.simulate import simulate


def test_model_file_reload_is_exact(tmp_path):
    model = composite_surrogate(3, 2, 0.5, 0.1, seed=2)
    path = save_model(model, tmp_path / "composite.model")
    again = load_model(path)
    assert again.model_id == model.model_id
    assert again.kind == model.kind
    assert again.parabolic_block == model.parabolic_block
    assert again.assumption == model.assumption
    assert again.metadata == model.metadata
    for name in ("A", "B", "R"):
        assert_array_equal(getattr(again, name), getattr(model, name))
    assert again.is_infinite


def test_model_file_keeps_finite_horizon():
    model = scalar_model(horizon=2.5)
    assert loads_model(dumps_model(model)).T == 2.5


@pytest.mark.parametrize(
    "old, new",
    [
        ("riccati-lab-model/1", "riccati-lab-model/9"),
        ("\n0 = ", "\n7 = "),
        ("[dims]", "[sizes]"),
        ("gamma = ", "gamma = 2"),
    ],
)
def test_model_file_rejects_damaged_text(old, new):
    text = dumps_model(random_stable(3, 1, 2, seed=0)).replace(old, new, 1)
    with pytest.raises(InputError):
        loads_model(text)


def test_missing_model_file(tmp_path):
    with pytest.raises(InputError):
        load_model(tmp_path / "absent.model")


def test_dre_solution_reload(tmp_path):
    model = random_stable(3, 2, 2, seed=1, horizon=1.0)
    sol = solve_dre(model, 20)
    path = save_dre_solution(sol, tmp_path / "sol.dre.csv")
    assert solution_format(path) == DRE_FORMAT
    bare = load_dre_solution(path)
    assert bare.slopes is None
    assert_array_equal(bare.P, sol.P)
    assert_array_equal(bare.K, sol.K)
    assert_array_equal(bare.grid.nodes, sol.grid.nodes)
    full = load_dre_solution(path, model)
    np.testing.assert_allclose(full.slopes, sol.slopes, rtol=1e-13, atol=1e-13)
    assert full.model_id == model.model_id
    assert full.integrator == "rk4"


def test_dre_solution_against_wrong_model(tmp_path):
    sol = solve_dre(random_stable(3, 2, 2, seed=1, horizon=1.0), 10)
    path = save_dre_solution(sol, tmp_path / "sol.dre.csv")
    with pytest.raises(InputError):
        load_dre_solution(path, scalar_model(horizon=1.0))


def test_are_solution_reload(tmp_path):
    model = random_stable(4, 2, 2, seed=2)
    sol = solve_are_newton(model)
    path = save_are_solution(sol, tmp_path / "sol.are.csv")
    assert solution_format(path) == ARE_FORMAT
    again = load_are_solution(path, model)
    assert_array_equal(again.P, sol.P)
    assert again.method == "newton"
    assert again.iterations == sol.iterations
    with pytest.raises(InputError):
        load_dre_solution(path)


def test_unreadable_solution_files(tmp_path):
    with pytest.raises(InputError):
        solution_format(tmp_path / "absent.csv")
    path = tmp_path / "broken.csv"
    path.write_text("# format=riccati-lab-dre/1\n1,2,x\n")
    with pytest.raises(InputError):
        load_dre_solution(path)


def test_trajectory_and_series_files(tmp_path):
    grid = TimeGrid.uniform(0.0, 1.0, 4)
    traj = simulate(scalar_model(), ControlPath.constant(grid, [1.0]), np.array([1.0]))
    path = save_trajectory(traj, tmp_path / "traj.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "# format=riccati-lab-trajectory/1"
    assert lines[2] == "# t,y0,u0,running_cost"
    table = np.loadtxt(path, delimiter=",")
    assert table.shape == (5, 4)
    assert table[-1, 3] == pytest.approx(traj.cost)

    series = save_series(tmp_path / "s.csv", ["a", "b"], [1.0, 2.0], [3.0, 4.0])
    assert_array_equal(np.loadtxt(series, delimiter=","), [[1.0, 3.0], [2.0, 4.0]])
