"""Solution and trajectory CSVs.

Metadata travels in ``# key=value`` header lines above the column names;
numbers are written with %.17g so a reload is exact.

    DRE          t, vec(P(t)) row-major, vec(K(t)) row-major
    ARE          one row: vec(P), vec(K), abscissa of A - B K, residual
    trajectory   t, y(t), u(t), running cost
"""

import io
from pathlib import Path

import numpy as np

from riccati_lab.are.solution import AreSolution
from riccati_lab.core.errors import InputError
from riccati_lab.dre.solution import DreSolution
from riccati_lab.dre.solver import riccati_rhs
from riccati_lab.models.lq_model import LqModel
from riccati_lab.numkernel.grid import TimeGrid
from riccati_lab.semiflow.paths import Trajectory
from riccati_lab.storage.files import atomic_write_text

DRE_FORMAT = "riccati-lab-dre/1"
ARE_FORMAT = "riccati-lab-are/1"
TRAJECTORY_FORMAT = "riccati-lab-trajectory/1"


def _dumps(table: np.ndarray, meta: dict, columns: list[str]) -> str:
    header = [f"{k}={v}" for k, v in meta.items()] + [",".join(columns)]
    buf = io.StringIO()
    np.savetxt(buf, np.atleast_2d(table), fmt="%.17g", delimiter=",", header="\n".join(header))
    return buf.getvalue()


def _read(path) -> tuple[dict, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"solution file not found: {path}")
    text = path.read_text(encoding="utf-8")
    meta = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, sep, value = line[1:].strip().partition("=")
        if sep:
            meta[key] = value
    try:
        table = np.loadtxt(io.StringIO(text), delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise InputError(f"malformed solution file {path}: {exc}")
    return meta, table


def _columns(prefix: str, rows: int, cols: int) -> list[str]:
    return [f"{prefix}{i}_{j}" for i in range(rows) for j in range(cols)]


def solution_format(path) -> str:
    meta, _ = _read(path)
    return meta.get("format", "")


def dumps_dre_solution(sol: DreSolution) -> str:
    N, n, _ = sol.P.shape
    m = sol.K.shape[1]
    table = np.hstack([sol.grid.nodes[:, None], sol.P.reshape(N, n * n), sol.K.reshape(N, m * n)])
    meta = {
        "format": DRE_FORMAT,
        "model_id": sol.model_id,
        "integrator": sol.integrator,
        "n": n,
        "m": m,
    }
    return _dumps(table, meta, ["t"] + _columns("P", n, n) + _columns("K", m, n))


def save_dre_solution(sol: DreSolution, path) -> Path:
    return atomic_write_text(path, dumps_dre_solution(sol))


def load_dre_solution(path, model: LqModel | None = None) -> DreSolution:
    """Reload a DRE CSV; with the model at hand the Hermite slopes are rebuilt."""
    meta, table = _read(path)
    if meta.get("format") != DRE_FORMAT:
        raise InputError(f"{path} is not a DRE solution file")
    n, m = int(meta["n"]), int(meta["m"])
    if table.shape[1] != 1 + n * n + m * n:
        raise InputError(f"{path}: expected {1 + n * n + m * n} columns, got {table.shape[1]}")
    N = table.shape[0]
    P = table[:, 1 : 1 + n * n].reshape(N, n, n)
    K = table[:, 1 + n * n :].reshape(N, m, n)
    slopes = None
    if model is not None:
        if model.n != n or model.m != m:
            raise InputError(f"{path} does not match model {model.model_id}")
        slopes = -np.array([riccati_rhs(Pk, model.A, model.BBt, model.RtR) for Pk in P])
    return DreSolution(
        grid=TimeGrid.from_nodes(table[:, 0]),
        values=P,
        slopes=slopes,
        gains=K,
        integrator=meta.get("integrator", "rk4"),
        model_id=meta.get("model_id", ""),
    )


def dumps_are_solution(sol: AreSolution) -> str:
    n = sol.P.shape[0]
    m = sol.K.shape[0]
    row = np.concatenate([sol.P.ravel(), sol.K.ravel(), [sol.closed_loop_abscissa, sol.residual]])
    meta = {
        "format": ARE_FORMAT,
        "model_id": sol.model_id,
        "method": sol.method,
        "iterations": sol.iterations,
        "n": n,
        "m": m,
    }
    columns = _columns("P", n, n) + _columns("K", m, n) + ["abscissa", "residual"]
    return _dumps(row[None, :], meta, columns)


def save_are_solution(sol: AreSolution, path) -> Path:
    return atomic_write_text(path, dumps_are_solution(sol))


def load_are_solution(path, model: LqModel) -> AreSolution:
    """Reload P; the gain and closed loop are rebuilt from the model."""
    meta, table = _read(path)
    if meta.get("format") != ARE_FORMAT:
        raise InputError(f"{path} is not an ARE solution file")
    n, m = int(meta["n"]), int(meta["m"])
    if model.n != n or model.m != m:
        raise InputError(f"{path} does not match model {model.model_id}")
    if table.shape != (1, n * n + m * n + 2):
        raise InputError(f"{path}: unexpected table shape {table.shape}")
    P = table[0, : n * n].reshape(n, n)
    return AreSolution.build(
        P,
        model,
        meta.get("method", ""),
        residual=float(table[0, -1]),
        iterations=int(meta.get("iterations", 0)),
    )


def save_trajectory(traj: Trajectory, path) -> Path:
    nodes = traj.grid.nodes
    columns = ["t"] + [f"y{i}" for i in range(traj.states.shape[1])]
    blocks = [nodes[:, None], traj.states]
    if traj.controls is not None and traj.controls.m:
        u = np.array([traj.controls.at(t) for t in nodes])
        columns += [f"u{i}" for i in range(u.shape[1])]
        blocks.append(u)
    if traj.running_cost is not None:
        columns.append("running_cost")
        blocks.append(np.asarray(traj.running_cost)[:, None])
    meta = {"format": TRAJECTORY_FORMAT}
    if traj.cost is not None:
        meta["cost"] = f"{traj.cost:.17g}"
    return atomic_write_text(path, _dumps(np.hstack(blocks), meta, columns))


def save_series(path, columns: list[str], *series) -> Path:
    table = np.column_stack([np.asarray(s, dtype=float) for s in series])
    return atomic_write_text(path, _dumps(table, {}, columns))
