"""Схемы запросов и ответов исчисления показателей"""
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

# операции, доступные через CLI и POST /api/indices/{operation}
INDEX_OPERATIONS = (
    "conjugate",
    "embed",
    "embed-frac",
    "density",
    "density-frac",
    "recursion",
    "beta",
    "schrodinger-criterion",
    "membership",
    "heat-params",
    "regularized-exponents",
    "chain",
    "holder-corollary",
    "first-order-range",
    "separation-window",
    "hs-gap",
    "hs-threshold",
    "fourier-integrability",
    "bubble-integrability",
)


class IndexRequest(BaseModel):
    """
    Аргументы операции. Рациональные числа передаются строками
    ("3/2", "0.3", "inf"); p - список через запятую или массив строк.
    """
    N: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=1)
    s: Optional[str] = None
    s_tilde: Optional[str] = None
    p: Optional[Union[str, List[str]]] = None
    a: Optional[str] = None
    delta: Optional[str] = None
    max_steps: int = Field(default=200, ge=1)

    model_config = ConfigDict(extra="forbid")

    @field_validator("s", "s_tilde", "a", "delta", mode="before")
    @classmethod
    def accept_numbers(cls, v):
        """Числа из JSON принимаются как строки; float переводится по десятичной записи"""
        return v if v is None or isinstance(v, str) else str(v)

    @field_validator("p", mode="before")
    @classmethod
    def accept_number_lists(cls, v):
        if isinstance(v, (int, float)):
            return str(v)
        if isinstance(v, list):
            return [str(item) for item in v]
        return v


class TraceEntry(BaseModel):
    criterion: str
    holds: bool


class IndexResult(BaseModel):
    """text - строка для консоли, value - точные значения строками"""
    operation: str
    text: str
    value: Dict[str, Any] = Field(default_factory=dict)
    trace: List[TraceEntry] = Field(default_factory=list)
