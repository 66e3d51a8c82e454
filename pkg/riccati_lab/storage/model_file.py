"""Model file: sectioned key/value text, matrices row by row in %.17g.

    [model]       version, model_id, kind, horizon, parabolic_block
    [dims]        n, m, p
    [A] [B] [R]   one key per row index: "0 = a00 a01 ..."
    [assumption]  AssumptionParams fields
    [metadata]    free-form strings
"""

import configparser
import io
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from riccati_lab.core.errors import InputError
from riccati_lab.models.lq_model import AssumptionParams, LqModel, ModelKind
from riccati_lab.storage.files import atomic_write_text

VERSION = "riccati-lab-model/1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    return parser


def dumps_model(model: LqModel) -> str:
    parser = _parser()
    parser["model"] = {
        "version": VERSION,
        "model_id": model.model_id,
        "kind": model.kind.value,
        "horizon": _fmt(model.horizon),
        "parabolic_block": " ".join(str(k) for k in model.parabolic_block),
    }
    parser["dims"] = {"n": str(model.n), "m": str(model.m), "p": str(model.p)}
    for name, X in (("A", model.A), ("B", model.B), ("R", model.R)):
        parser[name] = {str(i): " ".join(_fmt(v) for v in row) for i, row in enumerate(X)}
    parser["assumption"] = {k: _fmt(v) for k, v in model.assumption.model_dump().items()}
    parser["metadata"] = dict(model.metadata)
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _matrix(section, rows: int, cols: int, name: str) -> np.ndarray:
    if len(section) != rows:
        raise InputError(f"[{name}] has {len(section)} rows, expected {rows}")
    X = np.zeros((rows, cols))
    for i in range(rows):
        try:
            values = [float(tok) for tok in section[str(i)].split()]
        except KeyError:
            raise InputError(f"[{name}] is missing row {i}")
        except ValueError as exc:
            raise InputError(f"[{name}] row {i}: {exc}")
        if len(values) != cols:
            raise InputError(f"[{name}] row {i} has {len(values)} entries, expected {cols}")
        X[i] = values
    return X


def loads_model(text: str) -> LqModel:
    parser = _parser()
    try:
        parser.read_string(text)
        head = parser["model"]
        if head.get("version") != VERSION:
            raise InputError(f"unsupported model file version {head.get('version')!r}")
        n, m, p = (int(parser["dims"][k]) for k in ("n", "m", "p"))
        A = _matrix(parser["A"], n, n, "A")
        B = _matrix(parser["B"], n, m, "B") if m else np.zeros((n, 0))
        R = _matrix(parser["R"], p, n, "R")
        assumption = AssumptionParams(
            **{k: float(v) for k, v in parser["assumption"].items()}
        )
        metadata = dict(parser["metadata"]) if parser.has_section("metadata") else {}
        return LqModel(
            A=A,
            B=B,
            R=R,
            horizon=float(head["horizon"]),
            assumption=assumption,
            parabolic_block=tuple(int(k) for k in head.get("parabolic_block", "").split()),
            kind=ModelKind(head["kind"]),
            model_id=head["model_id"],
            metadata=metadata,
        )
    except (configparser.Error, KeyError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        if isinstance(exc, ValidationError):
            raise InputError(f"invalid assumption parameters: {exc}")
        raise InputError(f"malformed model file: {exc}")


def save_model(model: LqModel, path) -> Path:
    return atomic_write_text(path, dumps_model(model))


def load_model(path) -> LqModel:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"model file not found: {path}")
    return loads_model(path.read_text(encoding="utf-8"))
