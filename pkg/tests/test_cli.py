import json
import math

import pytest

from riccati_lab.are.solver import solve_are_newton
from riccati_lab.main import main
from riccati_lab.models.catalog import SHIPPED, shipped_model
from riccati_lab.models.generators import scalar_model
from riccati_lab.schemas.report import VerificationReport
from riccati_lab.storage.model_file import save_model
from riccati_lab.storage.solution_csv import save_are_solution

SCALAR = "scalar-a-1-b1-r1"
FAST = ["--set", "verify.tuples=3", "--set", "verify.probes=2", "--set", "verify.controls=2"]


def read_json(path):
    return json.loads(path.read_text())


def test_gen_writes_model_file(tmp_path, capsys):
    assert main(["gen", "--kind", "heat", "--n", "4", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "heat-n4-b0.25"
    assert (tmp_path / "heat-n4-b0.25.model").is_file()


def test_gen_explicit_target(tmp_path):
    target = tmp_path / "models" / "r.model"
    argv = ["gen", "--kind", "random", "--n", "3", "--m", "1", "--p", "2", "--seed", "4"]
    assert main(argv + ["--set", f"output.model={target}"]) == 0
    assert target.read_text().startswith("[model]")


def test_gen_refuses_file_source(tmp_path):
    main(["gen", "--kind", "scalar", "--out", str(tmp_path)])
    model_file = tmp_path / f"{SCALAR}.model"
    assert main(["gen", "--model-file", str(model_file), "--out", str(tmp_path)]) == 2


def test_solve_are(tmp_path):
    assert main(["solve", "are", "--out", str(tmp_path)]) == 0
    assert (tmp_path / f"{SCALAR}.are.csv").is_file()
    report = read_json(tmp_path / f"{SCALAR}.are.report.json")
    assert report["command"] == "solve are"
    assert set(report["checks"]) == {"are.residual", "are.class_q"}
    assert all(check["passed"] for check in report["checks"].values())
    assert report["values"]["P"][0][0] == pytest.approx(math.sqrt(2) - 1)
    assert report["environment"]["riccati_lab"]


def test_solve_are_spectral_from_model_file(tmp_path):
    main(["gen", "--kind", "heat", "--n", "4", "--out", str(tmp_path)])
    model_file = tmp_path / "heat-n4-b0.25.model"
    argv = ["solve", "are", "--method", "spectral", "--model-file", str(model_file)]
    assert main(argv + ["--out", str(tmp_path)]) == 0
    report = read_json(tmp_path / "heat-n4-b0.25.are.report.json")
    assert report["values"]["method"] == "spectral"
    assert report["values"]["closed_loop_abscissa"] < 0


def test_solve_dre_needs_finite_horizon(tmp_path, capsys):
    assert main(["solve", "dre", "--out", str(tmp_path)]) == 2
    assert "horizon mismatch" in capsys.readouterr().err


def test_solve_are_rejects_finite_horizon(tmp_path, capsys):
    assert main(["solve", "are", "--set", "model.horizon=1", "--out", str(tmp_path)]) == 2
    assert "horizon mismatch" in capsys.readouterr().err


def test_solve_dre(tmp_path):
    argv = ["solve", "dre", "--T", "1", "--steps", "200", "--out", str(tmp_path)]
    assert main(argv) == 0
    report = read_json(tmp_path / f"{SCALAR}@T=1.dre.report.json")
    assert report["values"]["T"] == 1.0
    assert report["values"]["steps"] == 200
    assert all(check["passed"] for check in report["checks"].values())
    assert (tmp_path / f"{SCALAR}@T=1.dre.csv").is_file()


def test_verify_dre_solution(tmp_path):
    main(["solve", "dre", "--T", "1", "--steps", "200", "--out", str(tmp_path)])
    solution = tmp_path / f"{SCALAR}@T=1.dre.csv"
    argv = ["verify", "--solution", str(solution), "--out", str(tmp_path)] + FAST
    assert main(argv) == 0
    report = read_json(tmp_path / f"{SCALAR}@T=1.dre.verify.json")
    assert len(report["checks"]) == 14
    assert {name.split(".")[0] for name in report["checks"]} == {"dre", "synthesis"}
    assert "rho(delta)" in report["checks"]["dre.uniqueness_contraction"]["detail"]


def test_verify_are_solution(tmp_path):
    main(["solve", "are", "--out", str(tmp_path)])
    solution = tmp_path / f"{SCALAR}.are.csv"
    argv = ["verify", "--solution", str(solution), "--out", str(tmp_path)] + FAST
    assert main(argv) == 0
    report = read_json(tmp_path / f"{SCALAR}.are.verify.json")
    assert len(report["checks"]) == 10
    assert all(check["passed"] for check in report["checks"].values())


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_verify_are_on_every_shipped_model(name, tmp_path):
    model = shipped_model(name)
    model_file = save_model(model, tmp_path / f"{name}.model")
    argv = ["--model-file", str(model_file), "--out", str(tmp_path)]
    assert main(["solve", "are"] + argv) == 0
    solution = tmp_path / f"{model.model_id}.are.csv"
    assert main(["verify", "--solution", str(solution)] + argv + FAST) == 0
    checks = read_json(tmp_path / f"{model.model_id}.are.verify.json")["checks"]
    assert checks["synthesis.closed_loop_match"]["residual"] < 1e-5
    assert checks["synthesis.identity_precheck"]["passed"]


def test_verify_flags_wrong_candidate(tmp_path):
    model = scalar_model()
    wrong = solve_are_newton(model).perturbed([[0.1]], model)
    solution = save_are_solution(wrong, tmp_path / "wrong.are.csv")
    checks = "are.residual,are.value_sandwich,synthesis.fundamental_identity"
    checks += ",synthesis.identity_precheck"
    argv = ["verify", "--solution", str(solution), "--checks", checks, "--out", str(tmp_path)]
    assert main(argv + FAST) == 1
    report = read_json(tmp_path / f"{SCALAR}.are.verify.json")
    assert not any(check["passed"] for check in report["checks"].values())
    identity = report["checks"]["synthesis.fundamental_identity"]
    assert identity["residual"] == math.inf
    assert "precheck" in identity["detail"]
    precheck = report["checks"]["synthesis.identity_precheck"]
    assert precheck["residual"] > 1.0
    assert precheck["tolerance"] == 1.0


def test_verify_rerun_reproduces_report(tmp_path):
    main(["solve", "are", "--out", str(tmp_path)])
    solution = tmp_path / f"{SCALAR}.are.csv"
    argv = ["verify", "--solution", str(solution), "--out", str(tmp_path)] + FAST
    bodies = []
    for _ in range(2):
        assert main(argv) == 0
        data = read_json(tmp_path / f"{SCALAR}.are.verify.json")
        bodies.append(VerificationReport.model_validate(data).body())
    assert bodies[0] == bodies[1]
    assert "runtime" not in bodies[0]["checks"]["are.residual"]


def test_verify_selected_checks_and_overrides(tmp_path):
    main(["solve", "are", "--out", str(tmp_path)])
    solution = tmp_path / f"{SCALAR}.are.csv"
    argv = ["verify", "--solution", str(solution), "--checks", "are.residual,are.class_q"]
    argv += ["--set", "tolerances.are_residual=0.5", "--out", str(tmp_path)]
    assert main(argv) == 0
    checks = read_json(tmp_path / f"{SCALAR}.are.verify.json")["checks"]
    assert set(checks) == {"are.residual", "are.class_q"}
    assert checks["are.residual"]["tolerance"] == 0.5
    assert checks["are.residual"]["tolerance_source"] == "config"
    assert checks["are.class_q"]["tolerance_source"] == "default"


def test_verify_unknown_check(tmp_path):
    main(["solve", "are", "--out", str(tmp_path)])
    solution = tmp_path / f"{SCALAR}.are.csv"
    argv = ["verify", "--solution", str(solution), "--checks", "are.nonsense"]
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_verify_are_against_finite_model(tmp_path):
    main(["solve", "are", "--out", str(tmp_path)])
    solution = tmp_path / f"{SCALAR}.are.csv"
    argv = ["verify", "--solution", str(solution), "--set", "model.horizon=2"]
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_verify_missing_solution(tmp_path):
    assert main(["verify", "--solution", str(tmp_path / "absent.csv")]) == 2
    assert main(["verify", "--out", str(tmp_path)]) == 2


def test_assumptions_report(tmp_path):
    argv = ["assumptions", "--set", "model.source=heat", "--set", "model.n=8", "--csv"]
    assert main(argv + ["--set", "assumptions.probes=8", "--out", str(tmp_path)]) == 0
    report = read_json(tmp_path / "heat-n8-b0.25.assumptions.json")
    assert report["singular_component"] == "ok"
    assert report["gamma_hat"] > 0
    assert report["admissibility_constant"] > 0
    assert set(report["weighted_Lq"]) == {"eps", "zero"}
    assert report["duality_residuals"]["S"] < 1e-8
    assert report["constants"]["hyperbolic_remainder"] == 0.0
    assert (tmp_path / "heat-n8-b0.25.decay.csv").is_file()


def test_assumptions_rerun_with_same_seed_is_identical(tmp_path):
    argv = ["assumptions", "--set", "model.source=heat", "--set", "model.n=4"]
    argv += ["--set", "assumptions.probes=4", "--set", "assumptions.seed=11"]
    argv += ["--out", str(tmp_path)]
    reports = []
    for _ in range(2):
        assert main(argv) == 0
        reports.append(read_json(tmp_path / "heat-n4-b0.25.assumptions.json"))
    assert reports[0] == reports[1]
    assert reports[0]["seed"] == 11


def test_config_file(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[model]\nsource = random\nn = 3\nm = 1\np = 2\nseed = 5\n\n"
        f"[output]\ndir = {tmp_path}\n"
    )
    assert main(["solve", "are", "--config", str(config)]) == 0
    assert (tmp_path / "random-n3-m1-p2-s5.are.csv").is_file()


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "are", "--set", "grid.colour=red"],
        ["solve", "are", "--set", "nonsense"],
        ["solve", "are", "--set", "grid.steps=1"],
        ["solve", "are", "--config", "/nonexistent/run.ini"],
        ["assumptions", "--set", "assumptions.t_min=1", "--set", "assumptions.t_max=0.5"],
    ],
)
def test_bad_configuration_exits_with_usage_code(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_argument_errors():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "lyapunov"])
    assert exc.value.code == 2
