from __future__ import annotations

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import settings
from .norms import finite_or_none


class CheckStatus(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    SKIP = "Skip"


class CheckOutcome(BaseModel):
    """Результат одной проверки; при Fail measured содержит нарушающую величину"""
    name: str
    status: CheckStatus
    measured: Dict[str, Optional[float]] = Field(default_factory=dict)
    tolerance: float = 0.0
    notes: str = ""

    @model_validator(mode="after")
    def check_failure_evidence(self):
        if self.status is CheckStatus.FAIL and not self.measured:
            raise ValueError(f"Failed check {self.name!r} must report the measured quantity")
        return self

    @classmethod
    def judged(cls, name: str, passed: bool, measured: Dict[str, float], tolerance: float, notes: str = "") -> "CheckOutcome":
        return cls(
            name=name,
            status=CheckStatus.PASS if passed else CheckStatus.FAIL,
            measured={k: finite_or_none(float(v)) for k, v in measured.items()},
            tolerance=tolerance,
            notes=notes,
        )

    @classmethod
    def skipped(cls, name: str, reason: str, measured: Optional[Dict[str, float]] = None) -> "CheckOutcome":
        values = {k: finite_or_none(float(v)) for k, v in (measured or {}).items()}
        return cls(name=name, status=CheckStatus.SKIP, measured=values, notes=reason)


class SuiteSummary(BaseModel):
    passed: int = Field(default=0, alias="pass")
    failed: int = Field(default=0, alias="fail")
    skipped: int = Field(default=0, alias="skip")

    model_config = ConfigDict(populate_by_name=True)


class SuiteConfig(BaseModel):
    """
    suite: "acceptance" - только acceptance.*, "all" - весь реестр.
    checks: явный список имен; пустой список дает пустой отчет.
    """
    suite: str = Field(default="acceptance", pattern="^(acceptance|all)$")
    checks: Optional[List[str]] = None
    seed: int = Field(default_factory=lambda: settings.RUN_SEED)
    threads: int = Field(default_factory=lambda: settings.RUN_THREADS, ge=1)


class SuiteReport(BaseModel):
    outcomes: List[CheckOutcome] = Field(default_factory=list)
    summary: SuiteSummary = Field(default_factory=SuiteSummary)
    config_echo: Dict[str, Any] = Field(default_factory=dict)
    generated_at: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return 0 if self.summary.failed == 0 else 1

    def to_json_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "config_echo": self.config_echo,
            "outcomes": [o.model_dump(mode="json") for o in self.outcomes],
            "summary": self.summary.model_dump(by_alias=True),
        }
        if self.generated_at is not None:
            payload["generated_at"] = self.generated_at
        return payload
