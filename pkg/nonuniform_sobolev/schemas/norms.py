from __future__ import annotations

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..config import settings


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """inf/nan не представимы в JSON и сериализуются как null"""
    if value is None or not math.isfinite(value):
        return None
    return value


class Classification(str, Enum):
    CONVERGED = "Converged"
    DIVERGING = "Diverging"
    INCONCLUSIVE = "Inconclusive"

    @classmethod
    def worst(cls, values: List["Classification"]) -> "Classification":
        if cls.DIVERGING in values:
            return cls.DIVERGING
        if cls.INCONCLUSIVE in values:
            return cls.INCONCLUSIVE
        return cls.CONVERGED


class ConvergenceThresholds(BaseModel):
    """Калибровка классификатора несобственных интегралов"""
    decay_factor: float = Field(default=2.0, gt=1.0)
    tail_tolerance: Optional[float] = Field(default=1e-2, gt=0.0)
    name: str = "default"

    model_config = ConfigDict(frozen=True)

    @classmethod
    def default(cls) -> "ConvergenceThresholds":
        return cls(
            decay_factor=settings.CONVERGENCE_DECAY_FACTOR,
            tail_tolerance=settings.CONVERGENCE_TAIL_TOLERANCE,
            name="default",
        )

    @classmethod
    def power_law(cls) -> "ConvergenceThresholds":
        """Для полунорм: степенные хвосты с малым показателем"""
        return cls(decay_factor=settings.SEMINORM_DECAY_FACTOR, tail_tolerance=None, name="power_law")


class LevelValue(BaseModel):
    R: float
    value: float

    model_config = ConfigDict(frozen=True)


class SeminormEstimate(BaseModel):
    value: float
    stderr: float = 0.0
    classification: Classification
    levels: List[LevelValue] = Field(default_factory=list)
    method: str = ""
    thresholds: Optional[ConvergenceThresholds] = None
    notes: str = ""

    @property
    def level_values(self) -> List[float]:
        return [level.value for level in self.levels]

    def to_json_dict(self) -> Dict[str, Any]:
        """{value, stderr, classification, levels:[{R, value}]} + метаданные"""
        payload: Dict[str, Any] = {
            "value": finite_or_none(self.value),
            "stderr": finite_or_none(self.stderr),
            "classification": self.classification.value,
            "levels": [{"R": finite_or_none(lv.R), "value": finite_or_none(lv.value)} for lv in self.levels],
            "method": self.method,
        }
        if self.thresholds is not None:
            payload["thresholds"] = self.thresholds.model_dump()
        if self.notes:
            payload["notes"] = self.notes
        return payload


class NormComponent(BaseModel):
    """Слагаемое нормы: ‖∂^α f‖_{L^p} или [∂^α f]_{ν,p}"""
    label: str
    kind: str
    exponent: str
    estimate: SeminormEstimate


class NormReport(BaseModel):
    value: float
    classification: Classification
    components: List[NormComponent] = Field(default_factory=list)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "value": finite_or_none(self.value),
            "classification": self.classification.value,
            "components": [
                {"label": c.label, "kind": c.kind, "exponent": c.exponent, "estimate": c.estimate.to_json_dict()}
                for c in self.components
            ],
        }
