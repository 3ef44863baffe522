from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class IdentityCheck(BaseModel):
    """Обе части тождества ∫f″|f|^{p−2}f = −(p−1)∫|f′|²|f|^{p−2}"""
    lhs: float
    rhs: float
    residual: float

    model_config = ConfigDict(frozen=True)


class ExperimentReport(BaseModel):
    """Отчет эксперимента: по строке на момент времени"""
    name: str
    config_echo: Dict[str, Any] = Field(default_factory=dict)
    columns: List[str] = Field(default_factory=list)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    generated_at: Optional[str] = None

    def column(self, name: str) -> List[Any]:
        return [row.get(name) for row in self.rows]
