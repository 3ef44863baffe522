"""
Нормы и полунормы неоднородных пространств Соболева.

- lp_norm: сеточная сумма, точный радиальный хвост для RationalDecay
- gagliardo_full / gagliardo_directional: интеграл по сдвигам a с
  уровнями |a| ≤ R_k, околодиагональной поправкой и дальним хвостом
- hs_seminorm_fourier: та же полунорма при p = 2 через спектр
- lp_norm_real_line / nonuniform_norm_real_line: одномерные аналитические
  поля по всей прямой, без сетки
- classify_convergence: Converged / Diverging / Inconclusive по уровням
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.special import gamma

from ..config import settings
from ..exceptions import ConfigError, PreconditionError, UnsupportedDerivativeError
from ..schemas.norms import (
    Classification,
    ConvergenceThresholds,
    LevelValue,
    NormComponent,
    NormReport,
    SeminormEstimate,
)
from .fields import (
    AnalyticField,
    Field,
    GridSpec,
    MultiIndex,
    ProductField,
    RadialDerivative,
    RadialField,
    RationalDecay,
    SampledField,
    ScaledField,
    SmoothBump,
    SumField,
    default_grid,
    fourier,
    partial_derivative,
    sample,
)
from .index_calculus import Exponent, ExponentVector, SmoothnessIndex

logger = logging.getLogger(__name__)

DEFAULT_R_LEVELS: Tuple[float, ...] = tuple(2.0 ** k for k in range(13))
FRACTIONAL_METHODS = ("auto", "fourier", "real")
MIN_MC_SAMPLES = 10_000
LATTICE_DENSE_LIMIT = 128
SMALL_CORRECTION_EXPONENT = 0.1

RealLike = Union[int, float, Fraction, str, Exponent, SmoothnessIndex]


class Scheme(str, Enum):
    TENSOR = "Tensor"
    MONTE_CARLO = "MonteCarlo"


@dataclass(frozen=True)
class QuadratureSpec:
    """Параметры квадратуры по сдвигам и классификации хвостов"""
    grid: Optional[GridSpec] = None
    scheme: Scheme = Scheme.TENSOR
    mc_samples: int = field(default_factory=lambda: settings.MC_SAMPLES)
    seed: int = field(default_factory=lambda: settings.RUN_SEED)
    R_levels: Tuple[float, ...] = DEFAULT_R_LEVELS
    h_min: Optional[float] = None
    richardson_levels: int = 2
    nodes_per_doubling: int = 8
    thresholds: Optional[ConvergenceThresholds] = None
    fractional_method: str = "auto"
    threads: int = field(default_factory=lambda: settings.RUN_THREADS)
    block_size: int = field(default_factory=lambda: settings.MC_BLOCK_SIZE)

    def __post_init__(self):
        levels = tuple(float(r) for r in self.R_levels)
        object.__setattr__(self, "R_levels", levels)
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] <= 0:
            raise ConfigError("R_levels must be positive and strictly increasing with ≥ 2 entries", field="R_levels")
        if self.scheme is Scheme.MONTE_CARLO and self.mc_samples < MIN_MC_SAMPLES:
            raise ConfigError(f"mc_samples must be ≥ {MIN_MC_SAMPLES} for MonteCarlo", field="mc_samples")
        if self.fractional_method not in FRACTIONAL_METHODS:
            raise ConfigError(f"fractional_method must be one of {FRACTIONAL_METHODS}", field="fractional_method")
        if self.h_min is not None and not self.h_min > 0:
            raise ConfigError("h_min must be positive", field="h_min")
        if self.nodes_per_doubling < 2 or self.threads < 1 or self.block_size < 1:
            raise ConfigError("nodes_per_doubling ≥ 2, threads ≥ 1 and block_size ≥ 1 required", field="quadrature")

    def grid_for(self, N: int) -> GridSpec:
        if self.grid is not None and self.grid.N == N:
            return self.grid
        return default_grid(N)

    def inner_cutoff(self, grid: GridSpec) -> float:
        return self.h_min if self.h_min is not None else grid.h

    @property
    def seminorm_thresholds(self) -> ConvergenceThresholds:
        return self.thresholds or ConvergenceThresholds.power_law()


def _real(value: RealLike) -> float:
    if isinstance(value, SmoothnessIndex):
        return float(value.s)
    if isinstance(value, Exponent):
        return math.inf if value.value is None else float(value.value)
    if isinstance(value, str):
        return float(Fraction(value)) if value.strip().lower() not in ("inf", "infinity", "∞") else math.inf
    return float(value)


def _exponent(p: RealLike) -> float:
    value = _real(p)
    if not value >= 1:
        raise PreconditionError(f"Exponent p = {value} must be ≥ 1", inequality="p ≥ 1")
    return value


def sphere_area(N: int) -> float:
    """|S^{N−1}| = 2π^{N/2}/Γ(N/2)"""
    return 2.0 * math.pi ** (N / 2.0) / float(gamma(N / 2.0))


def _to_value(I: float, p: float) -> float:
    if not math.isfinite(I):
        return math.inf
    return max(I, 0.0) ** (1.0 / p)


def _stderr_to_value(stderr_I: float, I: float, p: float) -> float:
    """δ(I^{1/p}) ≈ δI/(p·I^{1−1/p})"""
    if not math.isfinite(I):
        return 0.0
    if I <= 0:
        return stderr_I ** (1.0 / p) if stderr_I > 0 else 0.0
    return stderr_I / (p * I ** (1.0 - 1.0 / p))


# ============================================================================
# Классификация
# ============================================================================

def classify_convergence(
    level_values: Sequence[float],
    R_levels: Sequence[float],
    thresholds: Optional[ConvergenceThresholds] = None,
) -> Classification:
    """
    Приращения ΔI_k = I_{k+1} − I_k нормируются на число удвоений радиуса.
    Converged: последние приращения убывают с коэффициентом ≥ decay_factor
    на удвоение и ΔI_last/I_last < tail_tolerance. Diverging: последнее
    приращение не меньше предыдущего. Иначе Inconclusive.
    """
    values = [float(v) for v in level_values]
    radii = [float(r) for r in R_levels]
    if len(values) < 3:
        raise PreconditionError(f"Need at least 3 levels, got {len(values)}", inequality="levels ≥ 3")
    if len(radii) != len(values):
        raise PreconditionError("level_values and R_levels differ in length", inequality="len(I) = len(R)")
    th = thresholds or ConvergenceThresholds.default()
    if not all(math.isfinite(v) for v in values):
        return Classification.DIVERGING

    last = values[-1]
    raw_last = values[-1] - values[-2]
    if abs(raw_last) <= 1e-14 * abs(last):
        return Classification.CONVERGED

    per_doubling = [
        (values[i + 1] - values[i]) / math.log2(radii[i + 1] / radii[i])
        for i in range(len(values) - 1)
    ]
    d_prev, d_last = per_doubling[-2], per_doubling[-1]
    if d_last >= d_prev:
        return Classification.DIVERGING

    span = 0.5 * math.log2(radii[-1] / radii[-3])
    factor = (d_prev / d_last) ** (1.0 / span) if d_last > 0 else math.inf
    tail_ok = th.tail_tolerance is None or raw_last / abs(last) < th.tail_tolerance
    if factor >= th.decay_factor and tail_ok:
        return Classification.CONVERGED
    return Classification.INCONCLUSIVE


# ============================================================================
# L^p
# ============================================================================

def _field_center(f: Field) -> Optional[Tuple[float, ...]]:
    return f.center if isinstance(f, RadialField) else None


def _radial_tail(f: RationalDecay, p: float, r0: float, R: float) -> float:
    """|S^{N−1}|·|A|^p ∫_{r0}^{R} r^{N−1}(1 + r²/scale²)^{−δp/2} dr"""
    if R <= r0:
        return 0.0
    exponent = -f.delta * p / 2.0
    value, _ = integrate.quad(
        lambda r: r ** (f.N - 1) * (1.0 + (r / f.scale) ** 2) ** exponent,
        r0, R, limit=200, epsabs=0.0, epsrel=1e-11,
    )
    return sphere_area(f.N) * abs(f.amplitude) ** p * value


def _coarse_sum(values: np.ndarray, grid: GridSpec, p: float) -> float:
    """Та же сумма на сетке с шагом 2h"""
    sub = values[tuple(slice(None, None, 2) for _ in range(grid.N))]
    return (2.0 * grid.h) ** grid.N * math.fsum(np.abs(sub).ravel() ** p)


def lp_norm(f: Field, p: RealLike, quad: Optional[QuadratureSpec] = None) -> SeminormEstimate:
    """‖f‖_{L^p} по узлам сетки; p = ∞ дает максимум модуля"""
    quad = quad or QuadratureSpec()
    p_val = _exponent(p)
    sampled = sample(f, None if isinstance(f, SampledField) else quad.grid_for(f.N))
    g = sampled.grid
    mag = np.abs(sampled.values)

    if math.isinf(p_val):
        value = float(mag.max())
        return SeminormEstimate(
            value=value,
            classification=Classification.CONVERGED,
            levels=[LevelValue(R=g.corner_radius(), value=value)],
            method="grid-max",
        )

    r = g.radii(_field_center(f)).ravel()
    weights = (mag ** p_val).ravel() * g.cell_volume
    order = np.argsort(r, kind="stable")
    r_sorted = r[order]
    cumulative = np.cumsum(weights[order])

    def ball_sum(R: float) -> float:
        count = int(np.searchsorted(r_sorted, R, side="right"))
        return float(cumulative[count - 1]) if count else 0.0

    stderr_I = abs(math.fsum(weights) - _coarse_sum(sampled.values, g, p_val))

    if isinstance(f, RationalDecay):
        r0 = g.L
        core = ball_sum(r0)
        level_I = [ball_sum(min(R, r0)) + _radial_tail(f, p_val, r0, R) for R in quad.R_levels]
        if f.delta * p_val > f.N:
            I = core + _radial_tail(f, p_val, r0, math.inf)
            classification = Classification.CONVERGED
        else:
            I = math.inf
            classification = Classification.DIVERGING
        method = "grid+radial-tail"
    else:
        level_I = [ball_sum(R) for R in quad.R_levels]
        I = math.fsum(weights)
        classification = classify_convergence(level_I, quad.R_levels) if len(level_I) >= 3 else Classification.CONVERGED
        method = "grid"

    return SeminormEstimate(
        value=_to_value(I, p_val),
        stderr=_stderr_to_value(stderr_I, I, p_val),
        classification=classification,
        levels=[LevelValue(R=R, value=_to_value(v, p_val)) for R, v in zip(quad.R_levels, level_I)],
        method=method,
        thresholds=ConvergenceThresholds.default() if method == "grid" else None,
    )


# ============================================================================
# Дальний хвост и околодиагональная поправка
# ============================================================================

@dataclass
class _TailModel:
    """Поведение D(a) при |a| → ∞: D∞ = 2‖f − c∞‖_p^p, если f − c∞ ∈ L^p"""
    in_lp: bool
    d_infinity: float


def _tail_model(f: Field, p: float, quad: QuadratureSpec) -> _TailModel:
    if isinstance(f, RationalDecay):
        if f.delta * p > f.N:
            estimate = lp_norm(f, p, quad)
            return _TailModel(True, 2.0 * estimate.value ** p)
        return _TailModel(False, math.inf)
    sampled = sample(f, None if isinstance(f, SampledField) else quad.grid_for(f.N))
    values = sampled.values
    shell = sampled.grid.boundary_mask()
    c_inf = complex(values[shell].mean())
    deviation = np.abs(values - c_inf)
    peak = float(deviation.max())
    if float(deviation[shell].max()) > 1e-8 * peak:
        return _TailModel(False, math.inf)
    d_inf = 2.0 * sampled.grid.cell_volume * math.fsum(deviation.ravel() ** p)
    return _TailModel(True, d_inf)


def _gradient_power_sums(f: Field, p: float, quad: QuadratureSpec) -> List[float]:
    """‖∂_j f‖_p^p для j = 1..N"""
    sums = []
    for j in range(f.N):
        alpha = MultiIndex.unit(f.N, j)
        try:
            derivative = partial_derivative(f, alpha)
        except UnsupportedDerivativeError:
            derivative = partial_derivative(f, alpha, grid=quad.grid_for(f.N))
        sums.append(lp_norm(derivative, p, quad).value ** p)
    return sums


def _near_diagonal(f: Field, s: float, p: float, h_min: float, quad: QuadratureSpec, directional: bool) -> float:
    """Оценка ∬_{|a|<h_min} через |f(x+a) − f(x)| ≤ |a|·|∇f|"""
    exponent = p * (1.0 - s)
    grads = _gradient_power_sums(f, p, quad)
    if directional:
        return math.fsum(grads) * h_min ** exponent * 2.0 / exponent
    return sphere_area(f.N) * h_min ** exponent / exponent * math.fsum(grads) / f.N


def _geometric_tail(levels: Sequence[float], R_levels: Sequence[float]) -> float:
    """Геометрическое продолжение последних приращений за R_max"""
    d_prev = (levels[-2] - levels[-3]) / math.log2(R_levels[-2] / R_levels[-3])
    d_last = (levels[-1] - levels[-2]) / math.log2(R_levels[-1] / R_levels[-2])
    if d_last <= 0 or d_prev <= 0:
        return 0.0
    ratio = d_last / d_prev
    if ratio >= 1:
        return math.inf
    return d_last * ratio / (1.0 - ratio)


def _finalize(
    levels_I: np.ndarray,
    p: float,
    s: float,
    f: Field,
    quad: QuadratureSpec,
    correction: float,
    stderr_I: float,
    far_factor: float,
    method: str,
) -> SeminormEstimate:
    """Сборка оценки: поправка, классификация, хвост, перевод в I^{1/p}"""
    R_levels = quad.R_levels
    notes = []
    if p * (1.0 - s) < SMALL_CORRECTION_EXPONENT:
        stderr_I += correction
        notes.append("near-diagonal correction reported as error bar")
        correction = 0.0
    base = [float(v) + correction for v in levels_I]
    thresholds = quad.seminorm_thresholds
    classification = classify_convergence(base, R_levels, thresholds)

    if classification is Classification.CONVERGED:
        tail = _tail_model(f, p, quad)
        if tail.in_lp:
            far = far_factor * tail.d_infinity * R_levels[-1] ** (-s * p) / (s * p)
        else:
            far = _geometric_tail(base, R_levels)
            notes.append("far tail extrapolated geometrically")
        I = base[-1] + far
    elif classification is Classification.DIVERGING:
        I = math.inf
    else:
        I = base[-1]
        notes.append(f"partial value up to R={R_levels[-1]:g}")

    return SeminormEstimate(
        value=_to_value(I, p),
        stderr=_stderr_to_value(stderr_I, I if math.isfinite(I) else base[-1], p),
        classification=classification,
        levels=[LevelValue(R=R, value=_to_value(v, p)) for R, v in zip(R_levels, base)],
        method=method,
        thresholds=thresholds,
        notes="; ".join(notes),
    )


# ============================================================================
# Интегралы по сдвигам: аналитические поля
# ============================================================================

def _panel_edges(h_min: float, R_levels: Sequence[float]) -> np.ndarray:
    """Края панелей: h_min, все R_k > h_min, не шире одного удвоения"""
    anchors = [h_min] + [R for R in R_levels if R > h_min * (1 + 1e-12)]
    edges = [anchors[0]]
    for a, b in zip(anchors, anchors[1:]):
        pieces = max(1, math.ceil(math.log2(b / a) - 1e-12))
        edges.extend(a * (b / a) ** (np.arange(1, pieces + 1) / pieces))
        edges[-1] = b
    return np.asarray(edges, dtype=float)


def _log_gauss_nodes(edges: np.ndarray, nodes: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Узлы Гаусса–Лежандра по u = log a на каждой панели"""
    x, w = np.polynomial.legendre.leggauss(nodes)
    ua, ub = np.log(edges[:-1]), np.log(edges[1:])
    half = (ub - ua) / 2.0
    u = (ua + ub)[:, None] / 2.0 + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    panel = np.repeat(np.arange(len(edges) - 1), nodes)
    return np.exp(u).ravel(), weights.ravel(), panel


def _levels_from_panels(panel_sums: np.ndarray, edges: np.ndarray, R_levels: Sequence[float]) -> np.ndarray:
    cumulative = np.concatenate([[0.0], np.cumsum(panel_sums)])
    levels = []
    for R in R_levels:
        count = int(np.searchsorted(edges, R * (1 + 1e-12), side="right")) - 1
        levels.append(cumulative[max(count, 0)])
    return np.asarray(levels)


def _profile_from_offsets(
    D: Callable[[np.ndarray], Tuple[np.ndarray, float]],
    s: float,
    p: float,
    h_min: float,
    quad: QuadratureSpec,
    multiplicity: float,
) -> Tuple[np.ndarray, float]:
    """
    multiplicity·∫_{h_min}^{R} a^{−1−sp} D(a) da для всех R_k.
    Погрешность: разница с вдвое меньшим числом узлов плюс ошибка квадратур D.
    """
    edges = _panel_edges(h_min, quad.R_levels)

    def integrate_with(nodes: int) -> Tuple[np.ndarray, float]:
        a, w, panel = _log_gauss_nodes(edges, nodes)
        d_values, abserr = D(a)
        contributions = multiplicity * w * a ** (-s * p) * d_values
        panel_sums = np.array([
            math.fsum(contributions[panel == k]) for k in range(len(edges) - 1)
        ])
        return _levels_from_panels(panel_sums, edges, quad.R_levels), multiplicity * abserr

    levels, abserr = integrate_with(quad.nodes_per_doubling)
    stderr = abserr
    if quad.richardson_levels >= 2:
        coarse, _ = integrate_with(max(2, quad.nodes_per_doubling // 2))
        stderr += abs(levels[-1] - coarse[-1])
    return levels, stderr


def _shift_breakpoints(c: float, a: float, w: float) -> List[Tuple[float, float]]:
    lo, hi = c - a, c
    if a > 2.0 * w:
        return [(-np.inf, lo - w), (lo - w, lo + w), (lo + w, hi - w), (hi - w, hi + w), (hi + w, np.inf)]
    return [(-np.inf, lo - w), (lo - w, hi + w), (hi + w, np.inf)]


def _features_1d(f: Field) -> List[float]:
    """Точки, около которых одномерное поле меняет поведение"""
    if isinstance(f, SmoothBump):
        c, R = f.center[0], f.scale
        return [c - R, c - R / 2.0, c + R / 2.0, c + R]
    if isinstance(f, RadialField):
        return [f.center[0] - 4.0 * f.scale, f.center[0] + 4.0 * f.scale]
    if isinstance(f, (RadialDerivative, ScaledField)):
        return _features_1d(f.base)
    if isinstance(f, SumField):
        return sorted({x for t in f.terms for x in _features_1d(t)})
    if isinstance(f, ProductField):
        return sorted(set(_features_1d(f.left)) | set(_features_1d(f.right)))
    return [-4.0, 4.0]


def _split_line(points: Sequence[float]) -> List[Tuple[float, float]]:
    edges = sorted(set(float(x) for x in points))
    return [(-np.inf, edges[0])] + list(zip(edges, edges[1:])) + [(edges[-1], np.inf)]


def _scalar_evaluator(f: AnalyticField) -> Callable[[float], complex]:
    def value(x: float) -> complex:
        return complex(np.asarray(f.evaluate(np.array([[x]])))[0])
    return value


def _shift_integral_1d(f: AnalyticField, p: float) -> Callable[[np.ndarray], Tuple[np.ndarray, float]]:
    """D(a) = ∫_ℝ |f(x+a) − f(x)|^p dx адаптивной квадратурой по x"""
    radial = isinstance(f, RadialField)
    c = f.center[0] if radial else 0.0
    width = 4.0 * f.scale if radial else 0.0
    features = [] if radial else _features_1d(f)
    value = _scalar_evaluator(f)

    def pieces(a: float) -> List[Tuple[float, float]]:
        if radial:
            return _shift_breakpoints(c, a, width)
        return _split_line(features + [x - a for x in features])

    def D(offsets: np.ndarray) -> Tuple[np.ndarray, float]:
        results = np.zeros(len(offsets))
        abserr = 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for i, a in enumerate(offsets):
                total = []
                for lo, hi in pieces(float(a)):
                    piece, err = integrate.quad(
                        lambda x: abs(value(x + a) - value(x)) ** p,
                        lo, hi, limit=200, epsabs=0.0, epsrel=1e-10,
                    )
                    total.append(piece)
                    abserr += err
                results[i] = math.fsum(total)
        return results, abserr

    return D


def _shift_grid_sum(f: AnalyticField, grid: GridSpec, p: float):
    """
    D(a) = h^N[Σ_{x∈G}|f(x+a) − f(x)|^p + Σ_{y∈G, y−a∉Q}|f(y) − f(y−a)|^p]
    на кубе Q = [−L, L)^N
    """
    points = grid.points()
    base = f.evaluate(points)

    def D(shift: np.ndarray) -> float:
        shift = np.asarray(shift, dtype=float)
        forward = np.abs(f.evaluate(points + shift) - base) ** p
        back = points - shift
        outside = np.any((back < -grid.L) | (back >= grid.L), axis=-1)
        backward = np.abs(base - f.evaluate(back)) ** p
        return grid.cell_volume * (math.fsum(forward.ravel()) + math.fsum(backward[outside].ravel()))

    return D


# ============================================================================
# Интегралы по сдвигам: поля на сетке
# ============================================================================

def _lattice_shift_sum(values: np.ndarray, m: Sequence[int], p: float, cell_volume: float) -> float:
    """h^N Σ|f(x+m h) − f(x)|^p с нулевым продолжением за пределы сетки"""
    n = values.shape[0]
    shape = tuple(n + abs(int(mj)) for mj in m)
    first = np.zeros(shape, dtype=complex)
    second = np.zeros(shape, dtype=complex)
    first[tuple(slice(max(0, mj), max(0, mj) + n) for mj in m)] = values
    second[tuple(slice(max(0, -mj), max(0, -mj) + n) for mj in m)] = values
    return cell_volume * math.fsum(np.abs(second - first).ravel() ** p)


def _lattice_profile(
    sampled: SampledField,
    direction: int,
    s: float,
    p: float,
    quad: QuadratureSpec,
) -> Tuple[np.ndarray, float]:
    """
    2∫_h^R a^{−1−sp} D(a e_j) da по целым сдвигам m·h (трапеции по log a);
    при m ≥ n сдвинутые копии не пересекаются и D = 2h^NΣ|f|^p.
    """
    g = sampled.grid
    n, h, N = g.n, g.h, g.N
    d_inf = 2.0 * g.cell_volume * math.fsum(np.abs(sampled.values).ravel() ** p)
    dense = np.arange(1, min(n, LATTICE_DENSE_LIMIT) + 1)
    sparse = np.unique(np.rint(np.geomspace(LATTICE_DENSE_LIMIT, n, 96)).astype(int)) if n > LATTICE_DENSE_LIMIT else []
    anchors = [int(round(R / h)) for R in quad.R_levels if h <= R <= n * h]
    nodes = np.unique(np.concatenate([dense, np.asarray(sparse, dtype=int), np.asarray(anchors, dtype=int)]))
    nodes = nodes[(nodes >= 1) & (nodes <= n)]

    d_values = np.empty(len(nodes))
    for i, m in enumerate(nodes):
        shift = [0] * N
        shift[direction] = int(m)
        d_values[i] = _lattice_shift_sum(sampled.values, shift, p, g.cell_volume) if m < n else d_inf

    a = nodes * h
    u = np.log(a)
    integrand = 2.0 * a ** (-s * p) * d_values
    segments = 0.5 * (integrand[1:] + integrand[:-1]) * np.diff(u)
    cumulative = np.concatenate([[0.0], np.cumsum(segments)])

    coarse_idx = np.arange(0, len(nodes), 2)
    coarse_segments = 0.5 * (integrand[coarse_idx][1:] + integrand[coarse_idx][:-1]) * np.diff(u[coarse_idx])
    stderr = abs(math.fsum(coarse_segments) - cumulative[coarse_idx[-1]])

    levels = []
    a_max = n * h
    for R in quad.R_levels:
        if R < h:
            levels.append(0.0)
        elif R <= a_max:
            index = int(np.searchsorted(a, R * (1 + 1e-12), side="right")) - 1
            levels.append(float(cumulative[index]))
        else:
            extra = 2.0 * d_inf * (a_max ** (-s * p) - R ** (-s * p)) / (s * p)
            levels.append(float(cumulative[-1]) + extra)
    return np.asarray(levels), stderr


# ============================================================================
# Монте-Карло по сдвигам
# ============================================================================

def _radius_sampler(kappa: float, h_min: float, R: float):
    """Обратная функция распределения плотности ∝ r^{−κ} на [h_min, R]"""
    e = 1.0 - kappa
    if abs(e) < 1e-12:
        Z = math.log(R / h_min)
        draw = lambda u: h_min * (R / h_min) ** u
    else:
        Z = (R ** e - h_min ** e) / e
        draw = lambda u: (h_min ** e + u * (R ** e - h_min ** e)) ** (1.0 / e)
    density = lambda r: r ** (-kappa) / Z
    return draw, density


def _monte_carlo_full(f: Field, s: float, p: float, quad: QuadratureSpec, grid: GridSpec, h_min: float) -> Tuple[np.ndarray, float]:
    """
    |S^{N−1}|·E[r^{−1−sp}·D(rθ)/q(r)] с r ∝ r^{−κ}, κ = 1 + sp − p, и θ равномерно на сфере.
    Каждый блок использует собственный поток SeedSequence(seed, spawn_key=(b,)).
    """
    N = f.N
    R_levels = np.asarray(quad.R_levels)
    R_max = float(R_levels[-1])
    draw, density = _radius_sampler(1.0 + s * p - p, h_min, R_max)
    area = sphere_area(N)

    if isinstance(f, SampledField):
        values, cell = f.values, grid.cell_volume

        def D_of(shift: np.ndarray, cache: Dict[Tuple[int, ...], float]) -> float:
            # сдвиг округляется до ближайшего узла решетки, но не до нуля
            m = tuple(int(v) for v in np.rint(shift / grid.h))
            if not any(m):
                axis = int(np.argmax(np.abs(shift)))
                m = tuple(int(np.sign(shift[axis])) if j == axis else 0 for j in range(len(m)))
            if m not in cache:
                if max(abs(v) for v in m) >= grid.n:
                    cache[m] = 2.0 * cell * math.fsum(np.abs(values).ravel() ** p)
                else:
                    cache[m] = _lattice_shift_sum(values, m, p, cell)
            return cache[m]
    else:
        grid_sum = _shift_grid_sum(f, grid, p)

        def D_of(shift: np.ndarray, cache: Dict[Tuple[int, ...], float]) -> float:
            return grid_sum(shift)

    total = quad.mc_samples
    blocks = [(b, min(quad.block_size, total - b * quad.block_size)) for b in range(math.ceil(total / quad.block_size))]

    def run_block(block: Tuple[int, int]) -> Tuple[np.ndarray, float, float]:
        index, size = block
        rng = np.random.default_rng(np.random.SeedSequence(quad.seed, spawn_key=(index,)))
        radii = draw(rng.random(size))
        directions = rng.standard_normal((size, N))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        cache: Dict[Tuple[int, ...], float] = {}
        weights = np.empty(size)
        for i in range(size):
            shift = radii[i] * directions[i]
            weights[i] = area * radii[i] ** (-1.0 - s * p) * D_of(shift, cache) / density(radii[i])
        level_sums = np.array([math.fsum(weights[radii <= R * (1 + 1e-12)]) for R in R_levels])
        return level_sums, math.fsum(weights), math.fsum(weights ** 2)

    with ThreadPoolExecutor(max_workers=quad.threads) as pool:
        results = list(pool.map(run_block, blocks))

    levels = np.array([math.fsum(r[0][k] for r in results) for k in range(len(R_levels))]) / total
    mean = math.fsum(r[1] for r in results) / total
    second = math.fsum(r[2] for r in results) / total
    stderr = math.sqrt(max(second - mean ** 2, 0.0) / total)
    return levels, stderr


# ============================================================================
# Полунормы Гальярдо
# ============================================================================

def _fraction_s(s: RealLike) -> float:
    value = _real(s)
    if not 0 < value < 1:
        raise PreconditionError(f"Fractional order s = {value} outside (0,1)", inequality="0 < s < 1")
    return value


def _finite_p(p: RealLike) -> float:
    value = _exponent(p)
    if math.isinf(value):
        raise PreconditionError("Gagliardo seminorm needs finite p", inequality="p < ∞")
    return value


def _tensor_1d(f: Field, s: float, p: float, quad: QuadratureSpec, method: str) -> SeminormEstimate:
    """Общий путь N = 1 для полной и направленной полунорм"""
    if isinstance(f, SampledField):
        grid = f.grid
        levels, stderr = _lattice_profile(f, 0, s, p, quad)
        h_min = grid.h
    else:
        grid = quad.grid_for(1)
        h_min = quad.inner_cutoff(grid)
        levels, stderr = _profile_from_offsets(_shift_integral_1d(f, p), s, p, h_min, quad, multiplicity=2.0)
    correction = _near_diagonal(f, s, p, h_min, quad, directional=False)
    return _finalize(levels, p, s, f, quad, correction, stderr, far_factor=sphere_area(1), method=method)


def gagliardo_full(f: Field, s: RealLike, p: RealLike, quad: Optional[QuadratureSpec] = None) -> SeminormEstimate:
    """(∬ |f(x)−f(y)|^p/|x−y|^{N+sp} dx dy)^{1/p} с уровнями по |x−y| ≤ R_k"""
    quad = quad or QuadratureSpec()
    s_val, p_val = _fraction_s(s), _finite_p(p)
    if quad.scheme is Scheme.TENSOR:
        if f.N != 1:
            raise PreconditionError(
                f"Tensor scheme supports N=1 only, got N={f.N}; use MonteCarlo",
                inequality="N = 1 for Tensor",
            )
        return _tensor_1d(f, s_val, p_val, quad, method="tensor")

    grid = f.grid if isinstance(f, SampledField) else quad.grid_for(f.N)
    h_min = quad.inner_cutoff(grid)
    levels, stderr = _monte_carlo_full(f, s_val, p_val, quad, grid, h_min)
    correction = _near_diagonal(f, s_val, p_val, h_min, quad, directional=False)
    logger.debug(f"Monte Carlo seminorm: N={f.N}, samples={quad.mc_samples}, seed={quad.seed}")
    return _finalize(levels, p_val, s_val, f, quad, correction, stderr, far_factor=sphere_area(f.N), method="monte-carlo")


def gagliardo_directional(f: Field, s: RealLike, p: RealLike, quad: Optional[QuadratureSpec] = None) -> SeminormEstimate:
    """(Σ_j ∬ |f(x) − f(x+a e_j)|^p/|a|^{1+sp} dx da)^{1/p}"""
    quad = quad or QuadratureSpec()
    s_val, p_val = _fraction_s(s), _finite_p(p)
    if f.N == 1:
        return _tensor_1d(f, s_val, p_val, quad, method="directional")

    if isinstance(f, SampledField):
        grid = f.grid
        h_min = grid.h
        parts = [_lattice_profile(f, j, s_val, p_val, quad) for j in range(f.N)]
    else:
        grid = quad.grid_for(f.N)
        h_min = quad.inner_cutoff(grid)
        grid_sum = _shift_grid_sum(f, grid, p_val)
        parts = []
        for j in range(f.N):
            def D(offsets: np.ndarray, axis: int = j) -> Tuple[np.ndarray, float]:
                unit = np.eye(f.N)[axis]
                return np.array([grid_sum(a * unit) for a in offsets]), 0.0
            parts.append(_profile_from_offsets(D, s_val, p_val, h_min, quad, multiplicity=2.0))
    levels = np.sum([lv for lv, _ in parts], axis=0)
    stderr = math.fsum(err for _, err in parts)
    correction = _near_diagonal(f, s_val, p_val, h_min, quad, directional=True)
    return _finalize(levels, p_val, s_val, f, quad, correction, stderr, far_factor=2.0 * f.N, method="directional")


@lru_cache(maxsize=64)
def fractional_constant(N: int, s: float) -> float:
    """
    K(N,s) = 2∫_{ℝ^N}(1 − cos ζ_1)/|ζ|^{N+2s} dζ = c(N,s)·K(1,s),
    c(N,s) = π^{(N−1)/2}Γ((1+2s)/2)/Γ((N+2s)/2).
    """
    if not 0 < s < 1:
        raise PreconditionError(f"s = {s} outside (0,1)", inequality="0 < s < 1")
    near, _ = integrate.quad(
        lambda z: 2.0 * math.sin(z / 2.0) ** 2 / z ** 2 if z > 0 else 0.5,
        0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * s, 0.0),
    )
    oscillating, _ = integrate.quad(lambda z: z ** (-1.0 - 2.0 * s), 1.0, np.inf, weight="cos", wvar=1.0)
    one_dim = 4.0 * (near + 1.0 / (2.0 * s) - oscillating)
    reduction = math.pi ** ((N - 1) / 2.0) * float(gamma((1.0 + 2.0 * s) / 2.0)) / float(gamma((N + 2.0 * s) / 2.0))
    return one_dim * reduction


def hs_seminorm_fourier(f: Field, s: RealLike, grid: Optional[GridSpec] = None) -> float:
    """(K(N,s)·(2π)^{−N}·(π/L)^N Σ|ω|^{2s}|f̂|²)^{1/2}"""
    s_val = _fraction_s(s)
    spectrum = fourier(f, grid if grid is not None or isinstance(f, SampledField) else default_grid(f.N))
    g = spectrum.grid
    weighted = spectrum.abs_omega() ** (2.0 * s_val) * np.abs(spectrum.values) ** 2
    total = fractional_constant(g.N, s_val) * (2.0 * math.pi) ** (-g.N) * g.dual_weight * math.fsum(weighted.ravel())
    return math.sqrt(total)


def gagliardo_seminorm(f: Field, s: RealLike, p: RealLike, quad: Optional[QuadratureSpec] = None) -> SeminormEstimate:
    """Выбор метода: спектр при p = 2 для сеточных полей (или fourier), иначе интеграл по сдвигам"""
    quad = quad or QuadratureSpec()
    s_val, p_val = _fraction_s(s), _finite_p(p)
    use_fourier = p_val == 2.0 and (
        quad.fractional_method == "fourier"
        or (quad.fractional_method == "auto" and isinstance(f, SampledField))
    )
    if use_fourier:
        grid = None if isinstance(f, SampledField) else quad.grid_for(f.N)
        value = hs_seminorm_fourier(f, s_val, grid)
        return SeminormEstimate(value=value, classification=Classification.CONVERGED, method="fourier")
    if quad.scheme is Scheme.TENSOR and f.N > 1:
        quad = replace(quad, scheme=Scheme.MONTE_CARLO, mc_samples=max(quad.mc_samples, MIN_MC_SAMPLES))
    return gagliardo_full(f, s_val, p_val, quad)


# ============================================================================
# Неоднородная норма и весовая норма Фурье
# ============================================================================

def _norm_indices(s_or_k: RealLike, pvec) -> Tuple[SmoothnessIndex, ExponentVector]:
    idx = SmoothnessIndex.of(s_or_k if not isinstance(s_or_k, float) else Fraction(s_or_k).limit_denominator(10 ** 6))
    exponents = ExponentVector.of(pvec) if not isinstance(pvec, ExponentVector) else pvec
    if len(exponents) != idx.ceil + 1:
        raise PreconditionError(
            f"Exponent vector must have length ⌈s⌉+1={idx.ceil + 1}, got {len(exponents)}",
            inequality="len(p⃗) = ⌈s⌉+1",
        )
    return idx, exponents


def nonuniform_norm(
    f: Field,
    s_or_k: RealLike,
    pvec: Union[ExponentVector, Sequence[RealLike]],
    quad: Optional[QuadratureSpec] = None,
) -> NormReport:
    """
    Σ_{|α| ≤ ⌊s⌋} ‖∂^α f‖_{L^{p_{|α|}}} + Σ_{|α| = ⌊s⌋} [∂^α f]_{ν_s, p_⌈s⌉}
    (второе слагаемое только при нецелом s)
    """
    quad = quad or QuadratureSpec()
    idx, exponents = _norm_indices(s_or_k, pvec)

    components: List[NormComponent] = []
    for order in range(idx.floor + 1):
        p_l = exponents[order]
        for alpha in MultiIndex.of_order(f.N, order):
            estimate = lp_norm(partial_derivative(f, alpha), p_l, quad)
            components.append(NormComponent(label=f"D^{alpha}", kind="lp", exponent=str(p_l), estimate=estimate))

    if not idx.is_integer:
        p_top = exponents[idx.ceil]
        for alpha in MultiIndex.of_order(f.N, idx.floor):
            estimate = gagliardo_seminorm(partial_derivative(f, alpha), idx.nu, p_top, quad)
            components.append(NormComponent(
                label=f"[D^{alpha}]_{idx.nu}", kind="gagliardo", exponent=str(p_top), estimate=estimate,
            ))

    values = [c.estimate.value for c in components]
    value = math.inf if any(math.isinf(v) for v in values) else math.fsum(values)
    classification = Classification.worst([c.estimate.classification for c in components])
    return NormReport(value=value, classification=classification, components=components)


def lp_norm_real_line(f: AnalyticField, p: RealLike) -> float:
    """
    ‖f‖_{L^p(ℝ)} адаптивной квадратурой по всей прямой, без сетки и без
    отдельной модели хвоста. Только N = 1; p = ∞ дает максимум по узлам
    с шагом 1e−3 на отрезке, покрывающем особые точки поля.
    """
    if f.N != 1 or not isinstance(f, AnalyticField):
        raise PreconditionError("Real-line quadrature needs an analytic field with N = 1", inequality="N = 1")
    p_val = _exponent(p)
    features = _features_1d(f)
    if math.isinf(p_val):
        reach = 2.0 * max(abs(x) for x in features) + 1.0
        xs = np.arange(-reach, reach, 1e-3)
        return float(np.max(np.abs(f.evaluate(xs[:, None]))))

    value = _scalar_evaluator(f)
    total = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in _split_line(features):
            piece, _ = integrate.quad(lambda x: abs(value(x)) ** p_val, lo, hi, limit=200, epsabs=0.0, epsrel=1e-10)
            total.append(piece)
    I = math.fsum(total)
    return _to_value(I, p_val)


def nonuniform_norm_real_line(
    f: AnalyticField,
    s_or_k: RealLike,
    pvec: Union[ExponentVector, Sequence[RealLike]],
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """
    Норма W_s^{p⃗} одномерного аналитического поля целиком по прямой:
    L^p-слагаемые через lp_norm_real_line, полунорма интегралом по сдвигам.
    """
    quad = replace(quad or QuadratureSpec(), scheme=Scheme.TENSOR)
    idx, exponents = _norm_indices(s_or_k, pvec)
    parts = [lp_norm_real_line(partial_derivative(f, (order,)), exponents[order]) for order in range(idx.floor + 1)]
    if not idx.is_integer:
        top = partial_derivative(f, (idx.floor,))
        parts.append(gagliardo_full(top, idx.nu, exponents[idx.ceil], quad).value)
    return math.inf if any(math.isinf(v) for v in parts) else math.fsum(parts)


def weighted_fourier_norm(
    f: Field,
    beta: RealLike,
    p_dual: RealLike,
    quad: Optional[QuadratureSpec] = None,
) -> SeminormEstimate:
    """(Σ_ω (π/L)^N·||ω|^β f̂(ω)|^{p'})^{1/p'} с уровнями по частотным шарам"""
    quad = quad or QuadratureSpec()
    beta_val = _real(beta)
    p_val = _exponent(p_dual)
    if not 2 <= p_val < math.inf:
        raise PreconditionError(f"p_dual = {p_val} outside [2, ∞)", inequality="2 ≤ p′ < ∞")
    spectrum = fourier(f, None if isinstance(f, SampledField) else quad.grid_for(f.N))
    g = spectrum.grid
    omega = spectrum.abs_omega()
    with np.errstate(divide="ignore"):
        weight = np.where(omega > 0, omega ** beta_val, 1.0 if beta_val == 0 else 0.0)
    terms = (g.dual_weight * np.abs(weight * spectrum.values) ** p_val).ravel()
    total = math.fsum(terms)

    radii = []
    radius = g.dual_spacing
    top = float(omega.max())
    while radius < top:
        radii.append(radius)
        radius *= 2.0
    radii.append(top)
    flat_omega = omega.ravel()
    level_I = [math.fsum(terms[flat_omega <= K * (1 + 1e-12)]) for K in radii]
    classification = classify_convergence(level_I, radii) if len(level_I) >= 3 else Classification.CONVERGED
    return SeminormEstimate(
        value=_to_value(total, p_val),
        classification=classification,
        levels=[LevelValue(R=K, value=_to_value(v, p_val)) for K, v in zip(radii, level_I)],
        method="fourier-weighted",
        thresholds=ConvergenceThresholds.default(),
    )
