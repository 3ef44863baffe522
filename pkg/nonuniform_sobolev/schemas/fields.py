"""Схемы описания полей для CLI и HTTP"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

FamilyName = Literal["gaussian", "rational-decay", "bubble", "bump", "fourier-bump", "sech", "file"]


class GridModel(BaseModel):
    """Сетка [−L, L)^N из n узлов по оси; N берется из поля"""
    L: float = Field(gt=0)
    n: int = Field(ge=8)


class FieldSpec(BaseModel):
    """
    Поле по имени семейства и параметрам или путь к бинарному контейнеру.

    sech и fourier-bump задаются только на сетке (grid или сетка по умолчанию).
    """
    family: FamilyName = "gaussian"
    N: int = Field(default=1, ge=1)
    amplitude: float = 1.0
    center: List[float] = Field(default_factory=list)
    sigma: float = Field(default=1.0, gt=0)
    delta: float = Field(default=1.0, gt=0)
    lam: float = Field(default=1.0, gt=0)
    p: float = Field(default=2.0, gt=1)
    radius: float = Field(default=1.0, gt=0)
    scale: float = Field(default=1.0, gt=0)
    shape: Literal["quintic", "smooth"] = "quintic"
    path: Optional[str] = None
    grid: Optional[GridModel] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_family_inputs(self):
        if self.family == "file" and not self.path:
            raise ValueError("family 'file' requires path")
        if self.center and len(self.center) != self.N:
            raise ValueError(f"center has {len(self.center)} coordinates, expected N={self.N}")
        return self
