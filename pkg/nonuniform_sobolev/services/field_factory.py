"""
Построение поля по FieldSpec.
"""
import logging
from typing import Optional

import numpy as np

from ..schemas.fields import FieldSpec
from ..utils.serialization import read_field
from .fields import (
    Field,
    FourierBump,
    Gaussian,
    GridSpec,
    PLaplaceBubble,
    RationalDecay,
    SampledField,
    SmoothBump,
    default_grid,
)

logger = logging.getLogger(__name__)


def grid_from_spec(spec: FieldSpec) -> Optional[GridSpec]:
    if spec.grid is None:
        return None
    return GridSpec(spec.N, spec.grid.L, spec.grid.n)


def build_field(spec: FieldSpec) -> Field:
    """Аналитическое семейство, сеточные данные или поле из файла"""
    center = tuple(spec.center)
    if spec.family == "file":
        field = read_field(spec.path)
        logger.debug(f"Loaded sampled field from {spec.path}: N={field.N}, n={field.grid.n}")
        return field
    if spec.family == "gaussian":
        return Gaussian.create(N=spec.N, sigma=spec.sigma, center=center, amplitude=spec.amplitude)
    if spec.family == "bump":
        return SmoothBump.create(N=spec.N, radius=spec.radius, center=center, amplitude=spec.amplitude)
    if spec.family == "rational-decay":
        return RationalDecay(N=spec.N, amplitude=spec.amplitude, center=center, delta=spec.delta)
    if spec.family == "bubble":
        return PLaplaceBubble(N=spec.N, amplitude=spec.amplitude, center=center, lam=spec.lam, p=spec.p)

    grid = grid_from_spec(spec) or default_grid(spec.N)
    if spec.family == "fourier-bump":
        bump = FourierBump(scale=spec.scale, shape=spec.shape).sample(grid)
        return SampledField(grid, spec.amplitude * bump.values)
    # sech(|x − c|)
    shift = np.asarray(center or (0.0,) * spec.N, dtype=float)
    return SampledField.from_function(
        grid,
        lambda x: spec.amplitude / np.cosh(np.sqrt(np.sum((x - shift) ** 2, axis=-1))),
    )
