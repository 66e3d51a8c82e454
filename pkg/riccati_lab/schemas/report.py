import math
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class CheckResult(BaseModel):
    residual: float
    tolerance: float = Field(..., gt=0)
    passed: bool
    runtime: float = Field(0.0, ge=0)
    tolerance_source: str = "default"
    detail: Optional[str] = None

    model_config = ConfigDict(ser_json_inf_nan="constants")

    @classmethod
    def evaluate(
        cls,
        residual: float,
        tolerance: float,
        runtime: float = 0.0,
        tolerance_source: str = "default",
        detail: Optional[str] = None,
    ) -> "CheckResult":
        residual = float(residual)
        passed = math.isfinite(residual) and residual <= tolerance
        return cls(
            residual=residual,
            tolerance=tolerance,
            passed=passed,
            runtime=runtime,
            tolerance_source=tolerance_source,
            detail=detail,
        )


class VerificationReport(BaseModel):
    command: str
    model_id: str
    checks: dict[str, CheckResult] = {}
    values: dict[str, Any] = {}
    environment: dict[str, str] = {}
    config: dict[str, Any] = {}

    model_config = ConfigDict(ser_json_inf_nan="constants", protected_namespaces=())

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [name for name, check in self.checks.items() if not check.passed]

    def body(self) -> dict:
        """Report content without the runtime fields."""
        data = self.model_dump()
        for check in data["checks"].values():
            check.pop("runtime")
        return data


class AssumptionReport(BaseModel):
    model_id: str
    gamma_hat: Optional[float] = None
    N_hat: Optional[float] = None
    fit_rms: Optional[float] = None
    singular_component: str = "ok"
    admissibility_constant: float
    admissibility_horizon: float
    weighted_Lq: dict[str, float] = {}
    duality_residuals: dict[str, float] = {}
    constants: dict[str, float] = {}
    probes: int
    seed: int
    environment: dict[str, str] = {}
    config: dict[str, Any] = {}

    model_config = ConfigDict(ser_json_inf_nan="constants", protected_namespaces=())
