"""
Функции на ℝ^N: аналитические семейства и поля на равномерной сетке.

Аналитические радиальные семейства задаются как f(x) = A·g(ρ),
ρ = |x − c|²/scale². Производные любого порядка до MAX_ANALYTIC_ORDER
получаются цепным правилом ∂^α f = A·Σ_m g^{(m)}(ρ)·scale^{−2m}·P_{α,m}(x − c),
где многочлены P_{α,m} строятся точной целочисленной рекурсией, а
g^{(m)} берутся из jets.

Соглашение Фурье: f̂(ω) = ∫ f(x) e^{−ix·ω} dx, дискретизация DFT × h^N
с центрированием спектра на двойственной сетке (π/L)·{−n/2, …, n/2−1}.
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DomainError, PreconditionError, UnsupportedDerivativeError
from .jets import Jet

logger = logging.getLogger(__name__)

MAX_ANALYTIC_ORDER = 4
SUPPORTED_DIMENSIONS = (1, 2, 3)

Point = Union[Sequence[float], np.ndarray]
Polynomial = Dict[Tuple[int, ...], int]


# ============================================================================
# Сетка и мультииндексы
# ============================================================================

@dataclass(frozen=True)
class GridSpec:
    """Равномерная сетка x_j = −L + j·h на кубе [−L, L)^N, h = 2L/n"""
    N: int
    L: float
    n: int

    def __post_init__(self):
        if self.N not in SUPPORTED_DIMENSIONS:
            raise PreconditionError(f"Grid dimension N={self.N} not supported", inequality="N ∈ {1,2,3}")
        if not self.L > 0:
            raise PreconditionError(f"Half-width L={self.L} must be positive", inequality="L > 0")
        if self.n < 8 or self.n & (self.n - 1):
            raise PreconditionError(f"Points per axis n={self.n} must be a power of two ≥ 8", inequality="n = 2^m ≥ 8")
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.N

    @property
    def cell_volume(self) -> float:
        return self.h ** self.N

    @property
    def dual_spacing(self) -> float:
        return math.pi / self.L

    @property
    def dual_weight(self) -> float:
        """Вес ячейки двойственной сетки (π/L)^N"""
        return self.dual_spacing ** self.N

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    def points(self) -> np.ndarray:
        """Узлы сетки формы (n, …, n, N)"""
        mesh = np.meshgrid(*([self.axis()] * self.N), indexing="ij")
        return np.stack(mesh, axis=-1)

    def radii(self, center: Optional[Point] = None) -> np.ndarray:
        pts = self.points()
        if center is not None:
            pts = pts - np.asarray(center, dtype=float)
        return np.sqrt(np.sum(pts ** 2, axis=-1))

    def frequency_mesh(self) -> np.ndarray:
        """Частоты в порядке FFT, форма (n, …, n, N)"""
        axis = 2.0 * math.pi * np.fft.fftfreq(self.n, d=self.h)
        mesh = np.meshgrid(*([axis] * self.N), indexing="ij")
        return np.stack(mesh, axis=-1)

    def abs_frequency(self) -> np.ndarray:
        """|ω| в порядке FFT"""
        return np.sqrt(np.sum(self.frequency_mesh() ** 2, axis=-1))

    def dual_axis(self) -> np.ndarray:
        """Центрированная двойственная ось (π/L)·{−n/2, …, n/2−1}"""
        return self.dual_spacing * np.arange(-self.n // 2, self.n // 2)

    def dual_points(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.dual_axis()] * self.N), indexing="ij")
        return np.stack(mesh, axis=-1)

    def corner_radius(self) -> float:
        return self.L * math.sqrt(self.N)

    def boundary_mask(self) -> np.ndarray:
        """Узлы на гранях куба (первый и последний слой по каждой оси)"""
        mask = np.zeros(self.shape, dtype=bool)
        for axis in range(self.N):
            index = [slice(None)] * self.N
            for edge in (0, -1):
                index[axis] = edge
                mask[tuple(index)] = True
        return mask


@dataclass(frozen=True)
class MultiIndex:
    """Мультииндекс α = (α_1, …, α_N)"""
    components: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(int(a) for a in self.components))
        if any(a < 0 for a in self.components):
            raise PreconditionError(f"Multi-index {self.components} has negative entries", inequality="α_i ≥ 0")

    @classmethod
    def of(cls, value: Union["MultiIndex", Iterable[int]]) -> "MultiIndex":
        return value if isinstance(value, MultiIndex) else cls(tuple(value))

    @classmethod
    def zero(cls, N: int) -> "MultiIndex":
        return cls((0,) * N)

    @classmethod
    def unit(cls, N: int, j: int) -> "MultiIndex":
        return cls(tuple(1 if i == j else 0 for i in range(N)))

    @classmethod
    def of_order(cls, N: int, order: int) -> List["MultiIndex"]:
        """Все α с |α| = order в лексикографическом порядке"""
        return [cls(c) for c in product(range(order + 1), repeat=N) if sum(c) == order]

    @property
    def order(self) -> int:
        return sum(self.components)

    @property
    def N(self) -> int:
        return len(self.components)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if other.N != self.N:
            raise PreconditionError("Multi-indices of different dimension", inequality="dim α = dim β")
        return MultiIndex(tuple(a + b for a, b in zip(self.components, other.components)))

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.components) + ")"


@lru_cache(maxsize=256)
def chain_polynomials(alpha: Tuple[int, ...]) -> Dict[int, Polynomial]:
    """
    Многочлены P_{α,m}(y) цепного правила для ∂^α g(|y|²).

    ∂_i[g^{(m)}·P] = g^{(m+1)}·2y_i·P + g^{(m)}·∂_i P. Многочлен хранится
    как словарь {степени: целый коэффициент}.
    """
    N = len(alpha)
    current: Dict[int, Polynomial] = {0: {(0,) * N: 1}}
    for i, count in enumerate(alpha):
        for _ in range(count):
            nxt: Dict[int, Polynomial] = defaultdict(lambda: defaultdict(int))
            for m, poly in current.items():
                for exps, coeff in poly.items():
                    raised = list(exps)
                    raised[i] += 1
                    nxt[m + 1][tuple(raised)] += 2 * coeff
                    if exps[i] > 0:
                        lowered = list(exps)
                        lowered[i] -= 1
                        nxt[m][tuple(lowered)] += coeff * exps[i]
            current = {
                m: {e: c for e, c in poly.items() if c != 0}
                for m, poly in nxt.items()
            }
            current = {m: poly for m, poly in current.items() if poly}
    return current


def _points_array(x: Point, N: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0 or pts.shape[-1] != N:
        if N == 1:
            pts = pts[..., np.newaxis]
        else:
            raise DomainError(f"Point array last axis must have length N={N}, got shape {pts.shape}")
    return pts


# ============================================================================
# Базовые типы полей
# ============================================================================

class Field:
    """Функция на ℝ^N"""
    N: int

    @property
    def is_analytic(self) -> bool:
        return False

    def evaluate(self, x: Point) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x: Point) -> np.ndarray:
        return self.evaluate(x)


class AnalyticField(Field):
    """Поле, заданное формулой; вычисляется в любой точке ℝ^N"""

    @property
    def is_analytic(self) -> bool:
        return True

    def derivative(self, alpha: MultiIndex) -> "AnalyticField":
        raise UnsupportedDerivativeError(f"{type(self).__name__} has no closed-form derivatives")

    def dilate(self, lam: float) -> "AnalyticField":
        """x ↦ f(x/λ)"""
        raise UnsupportedDerivativeError(f"{type(self).__name__} does not support exact dilation")

    def describe(self) -> Dict[str, object]:
        return {"family": type(self).__name__}

    def __add__(self, other: "AnalyticField") -> "AnalyticField":
        if isinstance(other, (int, float)):
            other = ConstantField(float(other), self.N)
        return SumField((self, other))

    __radd__ = __add__

    def __mul__(self, other: Union[float, "AnalyticField"]) -> "AnalyticField":
        if isinstance(other, AnalyticField):
            return ProductField(self, other)
        return ScaledField(self, float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "AnalyticField":
        return ScaledField(self, -1.0)


def _check_order(alpha: MultiIndex) -> None:
    if alpha.order > MAX_ANALYTIC_ORDER:
        raise UnsupportedDerivativeError(
            f"Analytic derivative of order {alpha.order} exceeds {MAX_ANALYTIC_ORDER}",
            details={"alpha": str(alpha), "max_order": MAX_ANALYTIC_ORDER},
        )


@dataclass(frozen=True)
class RadialField(AnalyticField):
    """A·g(|x − c|²/scale²) с профилем g, заданным над jets"""
    N: int = 1
    amplitude: float = 1.0
    center: Tuple[float, ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        # сетки ограничены N ≤ 3, формулы нет
        if int(self.N) != self.N or self.N < 1:
            raise PreconditionError(f"Dimension N={self.N} must be a positive integer", inequality="N ≥ 1")
        center = tuple(float(c) for c in self.center) if self.center else (0.0,) * self.N
        if len(center) != self.N:
            raise PreconditionError(f"Center {center} has wrong dimension", inequality="dim c = N")
        object.__setattr__(self, "center", center)
        if not self.scale > 0:
            raise PreconditionError(f"Scale {self.scale} must be positive", inequality="scale > 0")

    def profile(self, rho: Jet) -> Jet:
        raise NotImplementedError

    def _rho(self, pts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        y = pts - np.asarray(self.center)
        return y, np.sum(y ** 2, axis=-1) / self.scale ** 2

    def evaluate(self, x: Point) -> np.ndarray:
        _, rho = self._rho(_points_array(x, self.N))
        return self.amplitude * self.profile(Jet.variable(rho, 0)).coeffs[0]

    def evaluate_derivative(self, alpha: MultiIndex, x: Point) -> np.ndarray:
        _check_order(alpha)
        y, rho = self._rho(_points_array(x, self.N))
        if alpha.order == 0:
            return self.amplitude * self.profile(Jet.variable(rho, 0)).coeffs[0]
        g = self.profile(Jet.variable(rho, alpha.order)).derivatives()
        total = np.zeros_like(rho)
        for m, poly in chain_polynomials(alpha.components).items():
            poly_value = np.zeros_like(rho)
            for exps, coeff in poly.items():
                term = np.full_like(rho, float(coeff))
                for i, e in enumerate(exps):
                    if e:
                        term = term * y[..., i] ** e
                poly_value += term
            total += g[m] * self.scale ** (-2 * m) * poly_value
        return self.amplitude * total

    def derivative(self, alpha: MultiIndex) -> AnalyticField:
        alpha = MultiIndex.of(alpha)
        _check_order(alpha)
        if alpha.order == 0:
            return self
        return RadialDerivative(self, alpha)

    def dilate(self, lam: float) -> "RadialField":
        return replace(
            self,
            center=tuple(lam * c for c in self.center),
            scale=self.scale * lam,
        )

    def with_amplitude(self, amplitude: float) -> "RadialField":
        return replace(self, amplitude=amplitude)

    def translate(self, shift: Point) -> "RadialField":
        shift = np.broadcast_to(np.asarray(shift, dtype=float), (self.N,))
        return replace(self, center=tuple(c + s for c, s in zip(self.center, shift)))

    def describe(self) -> Dict[str, object]:
        return {
            "family": type(self).__name__,
            "N": self.N,
            "amplitude": self.amplitude,
            "center": list(self.center),
            "scale": self.scale,
        }


@dataclass(frozen=True)
class RadialDerivative(AnalyticField):
    """∂^α радиального поля"""
    base: RadialField
    alpha: MultiIndex

    @property
    def N(self) -> int:
        return self.base.N

    def evaluate(self, x: Point) -> np.ndarray:
        return self.base.evaluate_derivative(self.alpha, x)

    def derivative(self, alpha: MultiIndex) -> AnalyticField:
        return self.base.derivative(self.alpha + MultiIndex.of(alpha))

    def dilate(self, lam: float) -> AnalyticField:
        # ∂^α[f(·/λ)] = λ^{−|α|}(∂^α f)(·/λ)
        return ScaledField(RadialDerivative(self.base.dilate(lam), self.alpha), lam ** self.alpha.order)

    def describe(self) -> Dict[str, object]:
        return {"family": "derivative", "alpha": str(self.alpha), "base": self.base.describe()}


# ============================================================================
# Аналитические семейства
# ============================================================================

@dataclass(frozen=True)
class Gaussian(RadialField):
    """A·e^{−|x−c|²/σ²}; σ хранится как scale"""

    @classmethod
    def create(cls, N: int = 1, sigma: float = 1.0, center: Sequence[float] = (), amplitude: float = 1.0) -> "Gaussian":
        if not sigma > 0:
            raise PreconditionError(f"σ = {sigma} must be positive", inequality="σ > 0")
        return cls(N=N, amplitude=amplitude, center=tuple(center), scale=sigma)

    def profile(self, rho: Jet) -> Jet:
        return (-rho).exp()


@dataclass(frozen=True)
class RationalDecay(RadialField):
    """A·(1 + |x−c|²/scale²)^{−δ/2}"""
    delta: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.delta > 0:
            raise PreconditionError(f"δ = {self.delta} must be positive", inequality="δ > 0")

    def profile(self, rho: Jet) -> Jet:
        return (1.0 + rho) ** (-self.delta / 2.0)

    def describe(self) -> Dict[str, object]:
        return {**super().describe(), "delta": self.delta}


@dataclass(frozen=True)
class PLaplaceBubble(RadialField):
    """
    Решение Δ_p u + u^{p*−1} = 0:
    U(x) = [λ^{1/(p−1)} N^{1/p} ((N−p)/(p−1))^{(p−1)/p} / (λ^{p/(p−1)} + |x−x0|^{p/(p−1)})]^{(N−p)/p}
    """
    lam: float = 1.0
    p: float = 2.0

    def __post_init__(self):
        super().__post_init__()
        if not self.lam > 0:
            raise PreconditionError(f"λ = {self.lam} must be positive", inequality="λ > 0")
        if not 1 < self.p < self.N:
            raise PreconditionError(f"p = {self.p} outside (1, N={self.N})", inequality="1 < p < N")

    @property
    def conjugate_p(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def critical_exponent(self) -> float:
        """p* = Np/(N−p)"""
        return self.N * self.p / (self.N - self.p)

    @property
    def _constant(self) -> float:
        N, p = self.N, self.p
        base = self.lam ** (1.0 / (p - 1.0)) * N ** (1.0 / p) * ((N - p) / (p - 1.0)) ** ((p - 1.0) / p)
        return base ** ((N - p) / p)

    def profile(self, rho: Jet) -> Jet:
        q = self.conjugate_p
        e = (self.N - self.p) / self.p
        return self._constant * (self.lam ** q + rho ** (q / 2.0)) ** (-e)

    def describe(self) -> Dict[str, object]:
        return {**super().describe(), "lam": self.lam, "p": self.p}


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C^∞ переход S(t): 0 при t ≤ 0, 1 при t ≥ 1"""
    t = np.asarray(t, dtype=float)
    inner = (t > 1e-3) & (t < 1 - 1e-3)
    safe = np.where(inner, t, 0.5)
    a = np.exp(-1.0 / safe)
    b = np.exp(-1.0 / (1.0 - safe))
    return np.where(t >= 1 - 1e-3, 1.0, np.where(inner, a / (a + b), 0.0))


def quintic_step(t: np.ndarray) -> np.ndarray:
    """Полиномиальный C² переход: 0 при t ≤ 0, 1 при t ≥ 1"""
    u = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return u ** 3 * (10.0 - 15.0 * u + 6.0 * u ** 2)


@dataclass(frozen=True)
class SmoothBump(RadialField):
    """C_c^∞ срезка: 1 при |x−c| < R/2, 0 при |x−c| > R; R хранится как scale"""

    @classmethod
    def create(cls, N: int = 1, radius: float = 1.0, center: Sequence[float] = (), amplitude: float = 1.0) -> "SmoothBump":
        if not radius > 0:
            raise PreconditionError(f"R = {radius} must be positive", inequality="R > 0")
        return cls(N=N, amplitude=amplitude, center=tuple(center), scale=radius)

    @property
    def radius(self) -> float:
        return self.scale

    def profile(self, rho: Jet) -> Jet:
        # τ = 1 при ρ = 1/4, τ = 0 при ρ = 1
        tau0 = (1.0 - rho.coeffs[0]) * (4.0 / 3.0)
        inner = (tau0 > 1e-3) & (tau0 < 1 - 1e-3)
        safe = rho.coeffs.copy()
        safe[0] = np.where(inner, rho.coeffs[0], 0.625)
        tau = (1.0 - Jet(safe)) * (4.0 / 3.0)
        a = (-(1.0 / tau)).exp()
        b = (-(1.0 / (1.0 - tau))).exp()
        out = (a / (a + b)).coeffs
        out = np.where(inner, out, 0.0)
        out[0] = np.where(tau0 >= 1 - 1e-3, 1.0, out[0])
        return Jet(out)


@dataclass(frozen=True)
class FourierBump:
    """
    Срезка в частотах: φ̂(ω) = B(|ω|/scale), B = 1 при r ≤ 1, 0 при r ≥ 2.
    shape: "quintic" (полиномиальный переход) или "smooth" (C^∞).
    """
    scale: float = 1.0
    shape: str = "quintic"

    def __post_init__(self):
        if self.shape not in ("quintic", "smooth"):
            raise PreconditionError(f"Unknown cutoff shape {self.shape!r}", inequality="shape ∈ {quintic, smooth}")
        if not self.scale > 0:
            raise PreconditionError(f"Cutoff scale {self.scale} must be positive", inequality="ε > 0")

    def multiplier(self, abs_omega: np.ndarray) -> np.ndarray:
        r = np.asarray(abs_omega, dtype=float) / self.scale
        step = quintic_step if self.shape == "quintic" else smooth_step
        return 1.0 - step(r - 1.0)

    def sample(self, grid: GridSpec) -> "SampledField":
        """φ в пространстве: обратное преобразование φ̂ на сетке"""
        transform = self.multiplier(grid.abs_frequency()).astype(complex)
        values = np.fft.fftshift(np.fft.ifftn(transform)) / grid.cell_volume
        return SampledField(grid, values)


# ============================================================================
# Комбинаторы
# ============================================================================

@dataclass(frozen=True)
class ConstantField(AnalyticField):
    value: float = 0.0
    N: int = 1

    def evaluate(self, x: Point) -> np.ndarray:
        pts = _points_array(x, self.N)
        return np.full(pts.shape[:-1], self.value, dtype=float)

    def derivative(self, alpha: MultiIndex) -> AnalyticField:
        alpha = MultiIndex.of(alpha)
        return self if alpha.order == 0 else ConstantField(0.0, self.N)

    def dilate(self, lam: float) -> AnalyticField:
        return self

    def describe(self) -> Dict[str, object]:
        return {"family": "constant", "value": self.value, "N": self.N}


@dataclass(frozen=True)
class ScaledField(AnalyticField):
    base: AnalyticField
    factor: float

    @property
    def N(self) -> int:
        return self.base.N

    def evaluate(self, x: Point) -> np.ndarray:
        return self.factor * self.base.evaluate(x)

    def derivative(self, alpha: MultiIndex) -> AnalyticField:
        return ScaledField(self.base.derivative(alpha), self.factor)

    def dilate(self, lam: float) -> AnalyticField:
        return ScaledField(self.base.dilate(lam), self.factor)

    def describe(self) -> Dict[str, object]:
        return {"family": "scaled", "factor": self.factor, "base": self.base.describe()}


@dataclass(frozen=True)
class SumField(AnalyticField):
    terms: Tuple[AnalyticField, ...]

    def __post_init__(self):
        if len({t.N for t in self.terms}) != 1:
            raise PreconditionError("Summands live in different dimensions", inequality="equal N")

    @property
    def N(self) -> int:
        return self.terms[0].N

    def evaluate(self, x: Point) -> np.ndarray:
        return sum(t.evaluate(x) for t in self.terms)

    def derivative(self, alpha: MultiIndex) -> AnalyticField:
        return SumField(tuple(t.derivative(alpha) for t in self.terms))

    def dilate(self, lam: float) -> AnalyticField:
        return SumField(tuple(t.dilate(lam) for t in self.terms))

    def describe(self) -> Dict[str, object]:
        return {"family": "sum", "terms": [t.describe() for t in self.terms]}


@dataclass(frozen=True)
class ProductField(AnalyticField):
    """Произведение двух аналитических полей; производные по правилу Лейбница"""
    left: AnalyticField
    right: AnalyticField

    @property
    def N(self) -> int:
        return self.left.N

    def evaluate(self, x: Point) -> np.ndarray:
        return self.left.evaluate(x) * self.right.evaluate(x)

    def derivative(self, alpha: MultiIndex) -> AnalyticField:
        alpha = MultiIndex.of(alpha)
        _check_order(alpha)
        if alpha.order == 0:
            return self
        terms = []
        for beta in product(*(range(a + 1) for a in alpha.components)):
            coeff = 1
            for a, b in zip(alpha.components, beta):
                coeff *= math.comb(a, b)
            rest = MultiIndex(tuple(a - b for a, b in zip(alpha.components, beta)))
            term = ProductField(self.left.derivative(MultiIndex(beta)), self.right.derivative(rest))
            terms.append(term if coeff == 1 else ScaledField(term, float(coeff)))
        return SumField(tuple(terms))

    def dilate(self, lam: float) -> AnalyticField:
        return ProductField(self.left.dilate(lam), self.right.dilate(lam))

    def describe(self) -> Dict[str, object]:
        return {"family": "product", "left": self.left.describe(), "right": self.right.describe()}


# ============================================================================
# Поля на сетке
# ============================================================================

@dataclass(frozen=True, eq=False)
class SampledField(Field):
    """Комплексные значения в узлах сетки, порядок осей row-major"""
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise PreconditionError(
                f"Values of shape {values.shape} do not match grid {self.grid.shape}",
                inequality="shape = (n,)*N",
            )
        if not np.all(np.isfinite(values)):
            raise PreconditionError("Sampled values must be finite", inequality="|f| < ∞")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def N(self) -> int:
        return self.grid.N

    @classmethod
    def from_function(cls, grid: GridSpec, func: Callable[[np.ndarray], np.ndarray]) -> "SampledField":
        """func получает точки формы (…, N)"""
        return cls(grid, func(grid.points()))

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def evaluate(self, x: Point) -> np.ndarray:
        """Мультилинейная интерполяция; узлы воспроизводятся точно"""
        pts = _points_array(x, self.N)
        grid = self.grid
        t = (pts + grid.L) / grid.h
        nearest = np.rint(t)
        t = np.where(np.abs(t - nearest) < 1e-9, nearest, t)
        if np.any(t < 0) or np.any(t > grid.n - 1):
            raise DomainError(
                "Point outside the sampled domain",
                details={"L": grid.L, "last_node": grid.L - grid.h},
            )
        base = np.minimum(np.floor(t).astype(int), grid.n - 2)
        frac = t - base
        result = np.zeros(pts.shape[:-1], dtype=complex)
        for corner in product((0, 1), repeat=self.N):
            weight = np.ones(pts.shape[:-1])
            index = []
            for axis, c in enumerate(corner):
                weight = weight * (frac[..., axis] if c else 1.0 - frac[..., axis])
                index.append(base[..., axis] + c)
            result += weight * self.values[tuple(index)]
        return result

    def shift_cells(self, cells: Sequence[int]) -> "SampledField":
        """Периодический сдвиг на целое число ячеек"""
        return SampledField(self.grid, np.roll(self.values, tuple(cells), axis=tuple(range(self.N))))

    def _check_grid(self, other: "SampledField") -> None:
        if other.grid != self.grid:
            raise PreconditionError("Fields live on different grids", inequality="grid(f) = grid(g)")

    def __add__(self, other):
        if isinstance(other, SampledField):
            self._check_grid(other)
            return SampledField(self.grid, self.values + other.values)
        return SampledField(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SampledField):
            self._check_grid(other)
            return SampledField(self.grid, self.values - other.values)
        return SampledField(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, SampledField):
            self._check_grid(other)
            return SampledField(self.grid, self.values * other.values)
        return SampledField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return SampledField(self.grid, -self.values)

    def describe(self) -> Dict[str, object]:
        return {"family": "sampled", "N": self.grid.N, "L": self.grid.L, "n": self.grid.n}


@dataclass(frozen=True, eq=False)
class Spectrum:
    """f̂ на центрированной двойственной сетке"""
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def abs_omega(self) -> np.ndarray:
        return np.sqrt(np.sum(self.grid.dual_points() ** 2, axis=-1))

    def __mul__(self, other) -> "Spectrum":
        return Spectrum(self.grid, self.values * other)


def default_grid(N: int) -> GridSpec:
    """Сетка по умолчанию для аналитических полей"""
    return {1: GridSpec(1, 16.0, 1024), 2: GridSpec(2, 16.0, 128), 3: GridSpec(3, 12.0, 64)}[N]


def sample(f: Field, grid: Optional[GridSpec] = None) -> SampledField:
    if isinstance(f, SampledField):
        if grid is not None and grid != f.grid:
            raise PreconditionError("Field already sampled on a different grid", inequality="grid(f) = grid")
        return f
    grid = grid or default_grid(f.N)
    if grid.N != f.N:
        raise PreconditionError(f"Grid dimension {grid.N} ≠ field dimension {f.N}", inequality="grid.N = f.N")
    return SampledField(grid, f.evaluate(grid.points()))


def evaluate(f: Field, x: Point) -> complex:
    """Значение поля в одной точке"""
    value = np.asarray(f.evaluate(np.asarray(x, dtype=float).reshape(1, f.N)))
    return complex(value.reshape(-1)[0])


# ============================================================================
# Спектральные операции
# ============================================================================

def _phase(grid: GridSpec) -> np.ndarray:
    """(−1)^{k_1+…+k_N} в порядке FFT: e^{iLω_k} = (−1)^k"""
    k = np.rint(np.fft.fftfreq(grid.n) * grid.n).astype(int)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    total = np.ones(grid.shape)
    for axis in range(grid.N):
        shape = [1] * grid.N
        shape[axis] = grid.n
        total = total * sign.reshape(shape)
    return total


def fourier(f: Field, grid: Optional[GridSpec] = None) -> Spectrum:
    """f̂(ω) ≈ h^N Σ_j f(x_j) e^{−i x_j·ω} на центрированной двойственной сетке"""
    sampled = sample(f, grid)
    g = sampled.grid
    transform = np.fft.fftn(sampled.values) * g.cell_volume * _phase(g)
    return Spectrum(g, np.fft.fftshift(transform))


def inverse_fourier(spectrum: Spectrum) -> SampledField:
    g = spectrum.grid
    transform = np.fft.ifftshift(spectrum.values) * _phase(g)
    return SampledField(g, np.fft.ifftn(transform) / g.cell_volume)


def evaluate_spectral(spectrum: Spectrum, points: Point) -> np.ndarray:
    """
    Тригонометрическая интерполяция (2π)^{−N}(π/L)^N Σ_ω f̂(ω) e^{ix·ω}.
    В узлах сетки совпадает с inverse_fourier.
    """
    g = spectrum.grid
    full = _points_array(points, g.N)
    pts = full.reshape(-1, g.N)
    omega = g.dual_points().reshape(-1, g.N)
    coeffs = spectrum.values.reshape(-1)
    weight = g.dual_weight / (2.0 * math.pi) ** g.N
    result = np.exp(1j * pts @ omega.T) @ coeffs * weight
    return result.reshape(full.shape[:-1])


def apply_multiplier(f: Field, multiplier: Callable[[GridSpec], np.ndarray], grid: Optional[GridSpec] = None) -> SampledField:
    """Умножение спектра на символ m(ω), заданный в порядке FFT"""
    sampled = sample(f, grid)
    transform = np.fft.fftn(sampled.values) * multiplier(sampled.grid)
    return SampledField(sampled.grid, np.fft.ifftn(transform))


def _derivative_symbol(alpha: MultiIndex) -> Callable[[GridSpec], np.ndarray]:
    def symbol(grid: GridSpec) -> np.ndarray:
        axis = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=grid.h)
        total = np.ones(grid.shape, dtype=complex)
        for j, a in enumerate(alpha.components):
            if a == 0:
                continue
            factor = (1j * axis) ** a
            if a % 2 == 1:
                # частота Найквиста не имеет вещественной нечетной производной
                factor[grid.n // 2] = 0.0
            shape = [1] * grid.N
            shape[j] = grid.n
            total = total * factor.reshape(shape)
        return total
    return symbol


def partial_derivative(f: Field, alpha: Union[MultiIndex, Iterable[int]], grid: Optional[GridSpec] = None) -> Field:
    """∂^α f: замкнутая формула для аналитических полей, спектрально на сетке"""
    alpha = MultiIndex.of(alpha)
    if alpha.N != f.N:
        raise PreconditionError(f"Multi-index {alpha} does not match N={f.N}", inequality="dim α = N")
    if isinstance(f, AnalyticField) and grid is None:
        return f.derivative(alpha)
    if alpha.order == 0:
        return sample(f, grid)
    return apply_multiplier(f, _derivative_symbol(alpha), grid)


# ============================================================================
# Сглаживание, срезка, остаток p-Лапласиана
# ============================================================================

def mollify(f: Field, lam: float, grid: Optional[GridSpec] = None) -> SampledField:
    """g_λ = f * φ_λ, φ_λ - SmoothBump радиуса λ с дискретной нормировкой h^N Σ φ = 1"""
    sampled = sample(f, grid)
    g = sampled.grid
    if lam < g.h:
        raise DomainError(f"Mollifier radius {lam} below grid spacing {g.h}", details={"lambda": lam, "h": g.h})
    kernel = SmoothBump.create(N=g.N, radius=lam).evaluate(g.points())
    kernel = kernel / (g.cell_volume * kernel.sum())
    # x = 0 находится в узле n/2; переносим его в начало для циклической свертки
    transform = np.fft.fftn(np.fft.ifftshift(kernel)) * g.cell_volume
    return SampledField(g, np.fft.ifftn(np.fft.fftn(sampled.values) * transform))


def cutoff(N: int, n: float) -> SmoothBump:
    """ψ(x/n): 1 при |x| < n, 0 при |x| > 2n"""
    return SmoothBump.create(N=N, radius=2.0 * n)


def truncate(f: Field, n: float) -> Field:
    """ψ(x/n)·f"""
    if not n > 0:
        raise PreconditionError(f"Truncation radius {n} must be positive", inequality="n > 0")
    psi = cutoff(f.N, n)
    if isinstance(f, SampledField):
        return SampledField(f.grid, f.values * psi.evaluate(f.grid.points()))
    return ProductField(psi, f)


_SECOND_DIFF = (-1.0, 16.0, -30.0, 16.0, -1.0)
_FIRST_DIFF = (1.0, -8.0, 0.0, 8.0, -1.0)


def plaplace_residual(
    u: PLaplaceBubble,
    x: Point,
    fd_step: float,
    domain_half_width: Optional[float] = None,
) -> float:
    """
    |Δ_p u(x) + u(x)^{p*−1}| по центральным разностям 4-го порядка.
    При p = 2 используется классический 5-точечный лапласиан,
    иначе вложенные разности div(|∇u|^{p−2}∇u).
    """
    x = np.asarray(x, dtype=float).reshape(u.N)
    h = float(fd_step)
    classical = abs(u.p - 2.0) < 1e-15
    reach = (2.0 if classical else 4.0) * h
    if domain_half_width is not None and np.any(np.abs(x) + reach > domain_half_width):
        raise DomainError(
            "Stencil reaches the domain boundary",
            details={"x": x.tolist(), "reach": reach, "L": domain_half_width},
        )
    offsets = (-2, -1, 0, 1, 2)
    eye = np.eye(u.N)

    if classical:
        laplacian = 0.0
        for i in range(u.N):
            pts = np.stack([x + k * h * eye[i] for k in offsets])
            values = np.real(u.evaluate(pts))
            laplacian += float(np.dot(_SECOND_DIFF, values)) / (12.0 * h * h)
        operator = laplacian
    else:
        def gradient(y: np.ndarray) -> np.ndarray:
            grad = np.zeros(u.N)
            for j in range(u.N):
                pts = np.stack([y + k * h * eye[j] for k in offsets])
                grad[j] = float(np.dot(_FIRST_DIFF, np.real(u.evaluate(pts)))) / (12.0 * h)
            return grad

        def flux(y: np.ndarray, i: int) -> float:
            grad = gradient(y)
            return float(np.linalg.norm(grad) ** (u.p - 2.0) * grad[i])

        operator = 0.0
        for i in range(u.N):
            values = [flux(x + k * h * eye[i], i) for k in offsets]
            operator += float(np.dot(_FIRST_DIFF, values)) / (12.0 * h)

    value = float(np.real(u.evaluate(x.reshape(1, u.N)))[0])
    return abs(operator + value ** (u.critical_exponent - 1.0))
