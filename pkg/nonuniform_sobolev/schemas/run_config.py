"""
Конфигурации запусков CLI и тела запросов HTTP.

Каждая команда читает одноименную секцию INI-файла; флаги командной строки
перекрывают значения из файла. Поля, описывающие функцию, собираются в FieldSpec.
"""
from typing import Annotated, List, Literal, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator

from ..config import settings
from .fields import FieldSpec


def _as_text(v):
    """Числа из JSON принимаются как строки рациональных чисел"""
    return str(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v


RationalText = Annotated[str, BeforeValidator(_as_text)]


class GlobalConfig(BaseModel):
    seed: int = Field(default_factory=lambda: settings.RUN_SEED)
    threads: int = Field(default_factory=lambda: settings.RUN_THREADS, ge=1)
    format: Literal["csv", "json"] = Field(default_factory=lambda: settings.OUTPUT_FORMAT)
    output: Optional[str] = None
    timestamps: bool = Field(default_factory=lambda: settings.REPORT_TIMESTAMPS)

    model_config = ConfigDict(extra="forbid")


class HeatConfig(BaseModel):
    field: FieldSpec
    s: RationalText
    p: RationalText
    times: List[float] = Field(min_length=1)
    T_list: List[float] = Field(default_factory=list)
    q_list: List[RationalText] = Field(default_factory=list)
    include_weighted: bool = True

    model_config = ConfigDict(extra="forbid")


class SchrodingerConfig(BaseModel):
    field: FieldSpec
    a: RationalText = "2"
    times: List[float] = Field(min_length=1)
    probes: List[float] = Field(default_factory=lambda: [0.0])
    epsilons: List[float] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @field_validator("probes")
    @classmethod
    def non_empty_probes(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one probe point is required")
        return v


NormKind = Literal["lp", "gagliardo", "directional", "nonuniform", "hs-fourier", "weighted-fourier"]


class NormParams(BaseModel):
    """
    lp: p; gagliardo/directional/hs-fourier: s, p; nonuniform: s, p⃗;
    weighted-fourier: beta, p (двойственный показатель p′).
    """
    field: FieldSpec
    s: Optional[RationalText] = None
    p: RationalText = "2"
    beta: Optional[RationalText] = None
    scheme: Literal["Tensor", "MonteCarlo"] = "Tensor"
    fractional_method: Literal["auto", "fourier", "real"] = "auto"
    mc_samples: Optional[int] = Field(default=None, ge=1)
    h_min: Optional[float] = Field(default=None, gt=0)

    model_config = ConfigDict(extra="forbid")


class NormConfig(NormParams):
    kind: NormKind


class VerifyConfig(BaseModel):
    suite: Literal["acceptance", "all"] = "acceptance"
    checks: Optional[List[str]] = None

    model_config = ConfigDict(extra="forbid")


class SampleConfig(BaseModel):
    field: FieldSpec

    model_config = ConfigDict(extra="forbid")
