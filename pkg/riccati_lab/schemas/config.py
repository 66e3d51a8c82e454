import configparser
import json
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from riccati_lab.core.errors import InputError


class ModelSource(str, Enum):
    heat = "heat"
    composite = "composite"
    random = "random"
    scalar = "scalar"
    file = "file"


class ModelSection(BaseModel):
    source: ModelSource = ModelSource.scalar
    path: Optional[str] = None
    n: int = Field(8, ge=1)
    beta: float = Field(0.25, ge=0)
    n_h: int = Field(4, ge=0)
    n_p: int = Field(4, ge=0)
    kappa: float = Field(0.5, ge=0)
    damping: float = Field(0.1, gt=0)
    m: int = Field(2, ge=0)
    p: int = Field(3, ge=0)
    margin: float = Field(0.5, gt=0)
    a: float = -1.0
    b: float = 1.0
    r: float = 1.0
    seed: int = Field(0, ge=0)
    horizon: float = Field(float("inf"), gt=0)

    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="constants")

    @model_validator(mode="after")
    def file_exists(self):
        if self.source == ModelSource.file:
            if not self.path:
                raise ValueError("model source 'file' needs model.path")
            if not Path(self.path).is_file():
                raise ValueError(f"model file not found: {self.path}")
        return self


class GridSection(BaseModel):
    steps: int = Field(2000, ge=2)
    integrator: str = "rk4"
    T: Optional[float] = Field(None, gt=0)

    model_config = ConfigDict(extra="forbid")

    @field_validator("integrator")
    @classmethod
    def known_integrator(cls, v):
        if v not in ("rk4", "midpoint"):
            raise ValueError(f"unknown integrator {v!r}")
        return v


class SolveSection(BaseModel):
    method: str = "newton"

    model_config = ConfigDict(extra="forbid")

    @field_validator("method")
    @classmethod
    def known_method(cls, v):
        if v not in ("newton", "spectral"):
            raise ValueError(f"unknown ARE method {v!r}")
        return v


class VerifySection(BaseModel):
    solution: Optional[str] = None
    checks: Optional[list[str]] = None
    tuples: int = Field(10, ge=1)
    controls: int = Field(10, ge=1)
    probes: int = Field(8, ge=1)
    rates: list[float] = [1.0, 2.0, 4.0, 8.0]
    seed: int = Field(0, ge=0)

    model_config = ConfigDict(extra="forbid")

    @field_validator("checks", "rates", mode="before")
    @classmethod
    def split_list(cls, v):
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v

    @field_validator("solution")
    @classmethod
    def solution_exists(cls, v):
        if v is not None and not Path(v).is_file():
            raise ValueError(f"solution file not found: {v}")
        return v


class AssumptionsSection(BaseModel):
    t_min: float = Field(1e-4, gt=0)
    t_max: float = Field(1e-1, gt=0)
    nodes: int = Field(32, ge=8)
    probes: int = Field(64, ge=1)
    T: float = Field(1.0, gt=0)
    delta: float = Field(0.0, ge=0)
    q: Optional[float] = Field(None, gt=1, lt=2)
    seed: int = Field(0, ge=0)
    csv: bool = False

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def ordered_window(self):
        if not self.t_min < self.t_max:
            raise ValueError("assumptions.t_min must be below assumptions.t_max")
        return self


class ToleranceSection(BaseModel):
    """Overrides keyed by check name with dots replaced by underscores."""

    dre_class_qt: Optional[float] = Field(None, gt=0)
    dre_ire: Optional[float] = Field(None, gt=0)
    dre_ire_strong: Optional[float] = Field(None, gt=0)
    dre_opric: Optional[float] = Field(None, gt=0)
    dre_evolution: Optional[float] = Field(None, gt=0)
    dre_gain_integrability: Optional[float] = Field(None, gt=0)
    dre_uniqueness_contraction: Optional[float] = Field(None, gt=0)
    dre_uniqueness_map: Optional[float] = Field(None, gt=0)
    dre_value_sandwich: Optional[float] = Field(None, gt=0)
    are_residual: Optional[float] = Field(None, gt=0)
    are_integral: Optional[float] = Field(None, gt=0)
    are_generator_identity: Optional[float] = Field(None, gt=0)
    are_class_q: Optional[float] = Field(None, gt=0)
    are_value_sandwich: Optional[float] = Field(None, gt=0)
    synthesis_fundamental_identity: Optional[float] = Field(None, gt=0)
    synthesis_identity_precheck: Optional[float] = Field(None, gt=0)
    synthesis_closed_loop_contraction: Optional[float] = Field(None, gt=0)
    synthesis_closed_loop_match: Optional[float] = Field(None, gt=0)
    synthesis_feedback_cost: Optional[float] = Field(None, gt=0)

    model_config = ConfigDict(extra="forbid")

    def lookup(self, check: str) -> Optional[float]:
        return getattr(self, check.replace(".", "_"), None)


class OutputSection(BaseModel):
    dir: str = "out"
    model: Optional[str] = None

    model_config = ConfigDict(extra="forbid")


class RunConfig(BaseModel):
    model: ModelSection = ModelSection()
    grid: GridSection = GridSection()
    solve: SolveSection = SolveSection()
    verify: VerifySection = VerifySection()
    assumptions: AssumptionsSection = AssumptionsSection()
    tolerances: ToleranceSection = ToleranceSection()
    output: OutputSection = OutputSection()

    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="constants")


def _read_sections(path: str | None) -> dict[str, dict[str, str]]:
    if path is None:
        return {}
    if not Path(path).is_file():
        raise InputError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise InputError(f"unreadable config {path}: {exc}")
    return {name: dict(parser.items(name)) for name in parser.sections()}


def _apply_override(raw: dict, item: str):
    key, sep, value = item.partition("=")
    section, dot, name = key.strip().partition(".")
    if not sep or not dot or not section or not name:
        raise InputError(f"override must look like section.key=value, got {item!r}")
    raw.setdefault(section, {})[name] = value.strip()


def load_run_config(
    path: str | None = None,
    overrides: list[str] | None = None,
    shortcuts: dict[str, dict[str, str]] | None = None,
) -> RunConfig:
    """Read the ini file, apply shortcuts then --set overrides, validate."""
    raw = _read_sections(path)
    for section, values in (shortcuts or {}).items():
        raw.setdefault(section, {}).update(values)
    for item in overrides or []:
        _apply_override(raw, item)
    try:
        return RunConfig(**raw)
    except ValidationError as exc:
        raise InputError(f"invalid configuration: {exc}")
    except TypeError as exc:
        raise InputError(f"invalid configuration: {exc}")


def config_echo(config: RunConfig) -> dict:
    return json.loads(config.model_dump_json())
