"""
Проверки свойств: связывают точные предсказания index_calculus с
численными измерениями norms и evolution.

"Вложение выполнено" проверяется как ограниченность и устойчивость
отношения норм на конечном семействе функций, константы не утверждаются.
"""
from __future__ import annotations

import asyncio
import importlib
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from ..config import settings
from ..exceptions import ConfigError, PreconditionError
from ..schemas.norms import Classification
from ..schemas.verify import CheckOutcome, CheckStatus, SuiteConfig, SuiteReport, SuiteSummary
from ..utils.experiment_logging import ExperimentLogger
from .fields import (
    AnalyticField,
    Field,
    GridSpec,
    MultiIndex,
    RationalDecay,
    SampledField,
    default_grid,
    mollify,
    partial_derivative,
    sample,
    truncate,
)
from .index_calculus import Membership, example_membership, separation_window, sobolev_conjugate
from .norms import (
    QuadratureSpec,
    Scheme,
    gagliardo_directional,
    gagliardo_full,
    gagliardo_seminorm,
    lp_norm,
    nonuniform_norm,
    nonuniform_norm_real_line,
)

logger = logging.getLogger(__name__)

CheckFn = Callable[["CheckContext"], CheckOutcome]

_REGISTRY: Dict[str, CheckFn] = {}
_BUILTIN_MODULES = (".acceptance",)


@dataclass(frozen=True)
class CheckContext:
    """Общие параметры прогона, передаваемые каждой проверке"""
    seed: int
    threads: int = 1

    def quad(self, **overrides) -> QuadratureSpec:
        return QuadratureSpec(seed=self.seed, threads=self.threads, **overrides)


# ============================================================================
# Реестр
# ============================================================================

def register_check(name: str) -> Callable[[CheckFn], CheckFn]:
    """Декоратор регистрации проверки под каноническим именем"""
    def decorator(fn: CheckFn) -> CheckFn:
        if name in _REGISTRY and _REGISTRY[name] is not fn:
            raise ValueError(f"Check {name!r} is already registered")
        _REGISTRY[name] = fn
        return fn
    return decorator


def _load_builtin_checks() -> None:
    for module in _BUILTIN_MODULES:
        importlib.import_module(module, __package__)


def list_checks(prefix: Optional[str] = None) -> List[str]:
    _load_builtin_checks()
    names = sorted(_REGISTRY)
    return [n for n in names if prefix is None or n.startswith(prefix)]


def _select(config: SuiteConfig) -> List[str]:
    available = list_checks()
    if config.checks is not None:
        unknown = [n for n in config.checks if n not in _REGISTRY]
        if unknown:
            raise ConfigError(f"Unknown checks: {', '.join(unknown)}", field="verify.checks")
        return sorted(set(config.checks))
    if config.suite == "acceptance":
        return [n for n in available if n.startswith("acceptance.")]
    return available


def _execute(name: str, ctx: CheckContext) -> CheckOutcome:
    """Исключение проверки превращается в Fail, набор не прерывается"""
    try:
        outcome = _REGISTRY[name](ctx)
    except Exception as e:
        logger.exception(f"Check {name} raised")
        return CheckOutcome.judged(name, False, {"raised": 1.0}, 0.0, notes=f"{type(e).__name__}: {e}")
    return outcome.model_copy(update={"name": name})


async def run_suite_async(config: SuiteConfig) -> SuiteReport:
    """Проверки выполняются в потоках, не более config.threads одновременно"""
    names = _select(config)
    ctx = CheckContext(seed=config.seed, threads=config.threads)
    run = ExperimentLogger("verify", f"suite={config.suite}")
    run.start({"checks": len(names), "seed": config.seed, "threads": config.threads})

    semaphore = asyncio.Semaphore(config.threads)

    async def run_one(name: str) -> CheckOutcome:
        async with semaphore:
            return await asyncio.to_thread(_execute, name, ctx)

    outcomes = list(await asyncio.gather(*(run_one(n) for n in names)))
    outcomes.sort(key=lambda o: o.name)

    summary = SuiteSummary()
    for outcome in outcomes:
        run.check_result(outcome.name, outcome.status.value.lower(), outcome.notes)
        if outcome.status is CheckStatus.PASS:
            summary.passed += 1
        elif outcome.status is CheckStatus.FAIL:
            summary.failed += 1
        else:
            summary.skipped += 1
    run.finish(success=summary.failed == 0)
    return SuiteReport(
        outcomes=outcomes,
        summary=summary,
        config_echo=config.model_dump(),
    )


def run_suite(config: Optional[SuiteConfig] = None) -> SuiteReport:
    return asyncio.run(run_suite_async(config or SuiteConfig()))


# ============================================================================
# Вспомогательные функции
# ============================================================================

# ‖∂_j f‖_1 на default_grid(2) (h = 1/4) завышен на ~1%: излом |∂_j f| в нуле
GRADIENT_L1_GRIDS: Dict[int, GridSpec] = {
    2: GridSpec(2, 16.0, 512),
    3: GridSpec(3, 12.0, 128),
}


def _grid(N: int, grid: Optional[GridSpec]) -> GridSpec:
    if grid is None:
        return default_grid(N)
    if grid.N != N:
        raise PreconditionError(f"Grid dimension {grid.N} ≠ N={N}", inequality="grid.N = N")
    return grid


def _norm(f: Field, p: Union[float, Fraction], grid: GridSpec) -> float:
    return lp_norm(f, p, QuadratureSpec(grid=grid)).value


def _gradient_magnitude(f: Field, grid: GridSpec) -> SampledField:
    """|∇f| в узлах сетки"""
    if isinstance(f, AnalyticField):
        pts = grid.points()
        parts = [np.abs(partial_derivative(f, MultiIndex.unit(f.N, j)).evaluate(pts)) ** 2 for j in range(f.N)]
    else:
        parts = [np.abs(partial_derivative(f, MultiIndex.unit(f.N, j)).values) ** 2 for j in range(f.N)]
    return SampledField(grid, np.sqrt(np.sum(parts, axis=0)))


def _spread(values: Sequence[float]) -> float:
    return max(values) / min(values) - 1.0


# ============================================================================
# Неравенства
# ============================================================================

def check_constant_one_inequality(
    fields: Sequence[AnalyticField],
    N: int,
    grid: Optional[GridSpec] = None,
    constant: Optional[float] = None,
    tol: float = settings.CHECK_TOLERANCE,
    name: str = "constant_one_inequality",
) -> CheckOutcome:
    """‖f‖_{N/(N−1)} ≤ c·Σ_j ‖∂_j f‖_1·(1 + tol), по умолчанию c = 1/N"""
    if N < 2:
        raise PreconditionError(f"Inequality needs N ≥ 2, got {N}", inequality="N ≥ 2")
    g = _grid(N, grid) if grid is not None else GRADIENT_L1_GRIDS.get(N, default_grid(N))
    c = 1.0 / N if constant is None else float(constant)
    q = N / (N - 1.0)
    ratios = []
    for f in fields:
        lhs = _norm(f, q, g)
        rhs = c * math.fsum(_norm(partial_derivative(f, MultiIndex.unit(N, j)), 1, g) for j in range(N))
        ratios.append(lhs / rhs)
    violations = sum(r > 1.0 + tol for r in ratios)
    return CheckOutcome.judged(
        name,
        violations == 0,
        {"max_ratio": max(ratios), "violations": violations, "family_size": len(ratios), "constant": c},
        tol,
    )


def sobolev_ratios(
    f: AnalyticField,
    N: int,
    p1: Union[float, Fraction],
    exponent: Optional[float] = None,
    lambdas: Sequence[float] = (0.5, 1.0, 2.0),
    grid: Optional[GridSpec] = None,
) -> List[float]:
    """ρ(λ) = ‖f(·/λ)‖_q/‖∇f(·/λ)‖_{p1}, по умолчанию q = q*"""
    g = _grid(N, grid)
    q = float(sobolev_conjugate(N, Fraction(p1)).value) if exponent is None else float(exponent)
    ratios = []
    for lam in lambdas:
        scaled = f.dilate(lam)
        ratios.append(_norm(scaled, q, g) / _norm(_gradient_magnitude(scaled, g), float(p1), g))
    return ratios


def check_sobolev_ratio_dilation(
    f: AnalyticField,
    N: int,
    p1: Union[float, Fraction],
    exponent: Optional[float] = None,
    lambdas: Sequence[float] = (0.5, 1.0, 2.0),
    tol: float = 0.01,
    grid: Optional[GridSpec] = None,
    name: str = "sobolev_ratio_dilation",
) -> CheckOutcome:
    """max/min ρ(λ) < 1 + tol; на сопряженном показателе отношение инвариантно"""
    ratios = sobolev_ratios(f, N, p1, exponent, lambdas, grid)
    spread = _spread(ratios)
    return CheckOutcome.judged(
        name,
        spread < tol,
        {"spread": spread, "ratio_min": min(ratios), "ratio_max": max(ratios)},
        tol,
    )


def _gn_ratio(f: AnalyticField, N: int, p1: float, g: GridSpec) -> float:
    grad = _norm(_gradient_magnitude(f, g), p1, g)
    if p1 < N:
        gamma = (N - 1.0) * p1 / (N - p1)
        q = N * p1 / (N - p1)
        norm_q = _norm(f, q, g)
        return norm_q ** gamma / (grad * norm_q ** (gamma - 1.0))
    theta = N / p1
    return _norm(f, math.inf, g) / (_norm(f, p1, g) ** (1.0 - theta) * grad ** theta)


def check_gn_inequality(
    f: AnalyticField,
    N: int,
    p1: Union[float, Fraction],
    lambdas: Sequence[float] = (0.5, 1.0, 2.0),
    amplitudes: Sequence[float] = (0.5, 1.0, 3.0),
    stability: float = 0.10,
    homogeneity_tol: float = 1e-10,
    grid: Optional[GridSpec] = None,
    name: str = "gn_inequality",
) -> CheckOutcome:
    """
    Отношение левой и правой частей неравенства Гальярдо–Ниренберга
    (p1 < N) или его sup-формы ‖u‖_∞ ≲ ‖u‖_p^{1−N/p}‖∇u‖_p^{N/p} (p1 > N)
    по растяжениям и амплитудам.
    """
    p1 = float(p1)
    if p1 == N:
        raise PreconditionError(f"p1 = N = {N} has no Gagliardo–Nirenberg form here", inequality="p1 ≠ N")
    g = _grid(N, grid)
    table = [[_gn_ratio(f.dilate(lam) * c, N, p1, g) for c in amplitudes] for lam in lambdas]
    drift = max(abs(v / row[0] - 1.0) for row in table for v in row)
    spread = _spread([row[0] for row in table])
    finite = all(math.isfinite(v) for row in table for v in row)
    return CheckOutcome.judged(
        name,
        finite and spread <= stability and drift <= homogeneity_tol,
        {"spread": spread, "amplitude_drift": drift, "max_ratio": max(max(row) for row in table)},
        stability,
    )


# ============================================================================
# Вложения и принадлежность
# ============================================================================

def check_fractional_embedding(
    fields: Sequence[AnalyticField],
    N: int,
    s: Fraction,
    p0: Fraction,
    p1: Fraction,
    s_tilde: Optional[Fraction] = None,
    stability: float = 0.10,
    quad: Optional[QuadratureSpec] = None,
    name: str = "fractional_embedding",
) -> CheckOutcome:
    """
    Без s̃: ‖f‖_{W_s^{(p1,p1)}}/‖f‖_{W_s^{(p0,p1)}} при p0 ≤ p1.
    С s̃ < s: ‖f‖_{W_{s̃}^{p⃗}}/‖f‖_{W_s^{p⃗}}.
    Супремум по всему семейству не должен превышать супремум по первой
    половине более чем на stability.
    """
    quad = quad or QuadratureSpec(fractional_method="fourier")
    if s_tilde is None:
        if p0 > p1:
            raise PreconditionError(f"p0 = {p0} > p1 = {p1}", inequality="p0 ≤ p1")
        numerator_args = (s, (p1, p1))
    else:
        if not 0 < s_tilde < s:
            raise PreconditionError(f"s̃ = {s_tilde} outside (0, s = {s})", inequality="0 < s̃ < s")
        numerator_args = (s_tilde, (p0, p1))
    ratios = []
    for f in fields:
        denominator = nonuniform_norm(f, s, (p0, p1), quad).value
        ratios.append(nonuniform_norm(f, *numerator_args, quad).value / denominator)
    half = max(ratios[: max(1, (len(ratios) + 1) // 2)])
    top = max(ratios)
    finite = all(math.isfinite(r) for r in ratios)
    return CheckOutcome.judged(
        name,
        finite and top <= half * (1.0 + stability),
        {"sup_ratio": top, "sup_first_half": half, "family_size": len(ratios)},
        stability,
    )


def check_membership_gap(
    N: int,
    s: Fraction,
    p0: Fraction,
    p1: Fraction,
    delta: Fraction,
    quad: Optional[QuadratureSpec] = None,
    name: str = "membership_gap",
) -> CheckOutcome:
    """(1+|x|²)^{−δ/2}: норма W_s^{(p0,p1)} конечна, ‖f‖_{L^{p1}} расходится"""
    if example_membership(N, s, p0, p1, delta) is not Membership.MEMBER or not p0 > p1:
        return CheckOutcome.skipped(name, "parameters do not describe a member with p0 > p1")
    quad = quad or QuadratureSpec(fractional_method="real")
    f = RationalDecay(N=N, delta=float(delta))
    report = nonuniform_norm(f, s, (p0, p1), quad)
    tail = lp_norm(f, p1, quad)
    passed = report.classification is Classification.CONVERGED and tail.classification is Classification.DIVERGING
    return CheckOutcome.judged(
        name,
        passed,
        {"norm": report.value, "lp1_last_level": tail.levels[-1].value if tail.levels else tail.value},
        0.0,
        notes=f"norm {report.classification.value}, L^p1 {tail.classification.value}",
    )


def check_separation(
    N: int,
    s: Fraction,
    s_tilde: Fraction,
    p0: Fraction,
    p1: Fraction,
    quad: Optional[QuadratureSpec] = None,
    name: str = "separation_window",
) -> CheckOutcome:
    """δ в середине окна: [f]_{s,p1} сходится, [f]_{s̃,p1} расходится"""
    window = separation_window(N, s, s_tilde, p0, p1)
    if window is None:
        return CheckOutcome.skipped(name, "separation window is empty")
    delta = (window.lower + window.upper) / 2
    quad = quad or QuadratureSpec(fractional_method="real")
    f = RationalDecay(N=N, delta=float(delta))
    fine = gagliardo_seminorm(f, s, p1, quad).classification
    coarse = gagliardo_seminorm(f, s_tilde, p1, quad).classification
    passed = fine is Classification.CONVERGED and coarse is Classification.DIVERGING
    return CheckOutcome.judged(
        name,
        passed,
        {"delta": float(delta), "converged_s": float(fine is Classification.CONVERGED),
         "diverging_s_tilde": float(coarse is Classification.DIVERGING)},
        0.0,
        notes=f"[f]_s {fine.value}, [f]_s̃ {coarse.value}",
    )


@dataclass(frozen=True)
class MembershipCell:
    N: int
    delta: Fraction
    s: Fraction
    p0: Fraction
    p1: Fraction

    @property
    def margin(self) -> Fraction:
        return self.p1 * (self.delta + self.s) - self.N


def membership_concordance(
    cells: Sequence[MembershipCell],
    quad: Optional[QuadratureSpec] = None,
    band: float = settings.MEMBERSHIP_BAND,
    name: str = "membership_concordance",
) -> CheckOutcome:
    """
    Точный критерий p1(δ+s) > N против классификации численной полунормы.
    Ячейки в полосе |p1(δ+s) − N| < band пропускаются.
    """
    quad = quad or QuadratureSpec(fractional_method="real")
    agreements, disagreements, skipped = 0, 0, 0
    notes = []
    for cell in cells:
        predicted = example_membership(cell.N, cell.s, cell.p0, cell.p1, cell.delta)
        if predicted is Membership.PRECONDITION_FAIL or abs(float(cell.margin)) < band:
            skipped += 1
            continue
        estimate = gagliardo_seminorm(RationalDecay(N=cell.N, delta=float(cell.delta)), cell.s, cell.p1, quad)
        expected = Classification.CONVERGED if predicted is Membership.MEMBER else Classification.DIVERGING
        if estimate.classification is expected:
            agreements += 1
        else:
            disagreements += 1
            notes.append(f"δ={cell.delta}, s={cell.s}: {predicted.value} vs {estimate.classification.value}")
    measured = {"cells": len(cells), "agreements": agreements, "disagreements": disagreements, "skipped": skipped}
    if agreements + disagreements == 0:
        return CheckOutcome.skipped(name, "every cell lies in the boundary band or fails preconditions", measured)
    return CheckOutcome.judged(name, disagreements == 0, measured, band, notes="; ".join(notes))


def check_directional_equivalence(
    f: AnalyticField,
    s: Fraction,
    p: Fraction,
    grids: Sequence[GridSpec],
    stability: float = 0.05,
    quad: Optional[QuadratureSpec] = None,
    name: str = "directional_equivalence",
) -> CheckOutcome:
    """Отношение полной и направленной полунорм устойчиво при измельчении сетки"""
    quad = quad or QuadratureSpec()
    ratios = []
    for grid in grids:
        sampled = sample(f, grid)
        scheme = Scheme.TENSOR if f.N == 1 else Scheme.MONTE_CARLO
        full = gagliardo_full(sampled, s, p, replace(quad, grid=grid, scheme=scheme)).value
        directional = gagliardo_directional(sampled, s, p, replace(quad, grid=grid)).value
        ratios.append(full / directional)
    spread = _spread(ratios)
    return CheckOutcome.judged(
        name,
        spread <= stability,
        {"spread": spread, "ratio_coarse": ratios[0], "ratio_fine": ratios[-1]},
        stability,
    )


# ============================================================================
# Плотность
# ============================================================================

class DensityMode(str, Enum):
    MOLLIFY = "Mollify"
    TRUNCATE = "Truncate"


DEFAULT_SCHEDULES = {
    DensityMode.MOLLIFY: (1.0, 0.5, 0.25, 0.125, 0.0625),
    DensityMode.TRUNCATE: (0.5, 1.0, 2.0, 3.0, 4.0),
}


TAIL_NEGLIGIBLE = 1e-8


def _on_real_line(f: Field, mode: DensityMode) -> bool:
    return mode is DensityMode.TRUNCATE and isinstance(f, AnalyticField) and f.N == 1


def _require_contained(f: Field, quad: QuadratureSpec) -> None:
    """
    Вне сетки разность ψ(x/n)f − f совпадает с −f; без квадратуры по
    прямой это допустимо, только если f на границе сетки пренебрежимо мало.
    """
    if isinstance(f, SampledField):
        return
    values = np.abs(sample(f, quad.grid_for(f.N)).values)
    edge = float(values[quad.grid_for(f.N).boundary_mask()].max())
    if edge > TAIL_NEGLIGIBLE * float(values.max()):
        raise PreconditionError(
            f"Truncation distance for N={f.N} needs a field negligible on the grid boundary (max edge value {edge:.3g})",
            inequality="max_∂Q |f| ≤ 1e−8·max |f|",
            details={"edge": edge},
        )


def density_distances(
    f: Field,
    mode: DensityMode,
    s_or_k,
    pvec,
    schedule: Optional[Sequence[float]] = None,
    quad: Optional[QuadratureSpec] = None,
) -> List[float]:
    """
    ‖approx − f‖_{W} вдоль расписания λ → 0 или n → ∞.

    Truncate для одномерных аналитических полей считается по всей прямой
    (хвост за сеткой входит в расстояние), для остальных требуется поле,
    сосредоточенное внутри сетки.
    """
    mode = DensityMode(mode)
    quad = quad or QuadratureSpec()
    schedule = schedule or DEFAULT_SCHEDULES[mode]
    if mode is DensityMode.TRUNCATE and not _on_real_line(f, mode):
        _require_contained(f, quad)
    distances = []
    for level in schedule:
        if mode is DensityMode.MOLLIFY:
            base = sample(f, quad.grid_for(f.N) if not isinstance(f, SampledField) else None)
            distances.append(nonuniform_norm(mollify(base, level) - base, s_or_k, pvec, quad).value)
        elif _on_real_line(f, mode):
            distances.append(nonuniform_norm_real_line(truncate(f, level) + (-f), s_or_k, pvec, quad))
        else:
            distances.append(nonuniform_norm(truncate(f, level) + (-f), s_or_k, pvec, quad).value)
        logger.debug(f"Density distance: mode={mode.value} level={level} distance={distances[-1]:.6g}")
    return distances


def density_convergence_check(
    f: Field,
    mode: DensityMode,
    s_or_k,
    pvec,
    schedule: Optional[Sequence[float]] = None,
    quad: Optional[QuadratureSpec] = None,
    slack: float = 0.05,
    final_fraction: float = 1e-2,
    asserted: bool = True,
    name: str = "density_convergence",
) -> CheckOutcome:
    """
    Расстояние убывает (с допуском slack) и на последнем уровне
    меньше final_fraction·‖f‖. При asserted=False результат только
    записывается, статус Skip.
    """
    quad = quad or QuadratureSpec()
    mode = DensityMode(mode)
    if _on_real_line(f, mode):
        reference = nonuniform_norm_real_line(f, s_or_k, pvec, quad)
    else:
        reference = nonuniform_norm(f, s_or_k, pvec, quad).value
    distances = density_distances(f, mode, s_or_k, pvec, schedule, quad)
    monotone = all(b <= a * (1.0 + slack) for a, b in zip(distances, distances[1:]))
    relative = distances[-1] / reference if reference > 0 else math.inf
    measured = {
        "first_distance": distances[0],
        "final_distance": distances[-1],
        "final_relative": relative,
        "monotone": float(monotone),
    }
    if not asserted:
        return CheckOutcome.skipped(name, "exploration run, reported only", measured)
    return CheckOutcome.judged(name, monotone and relative < final_fraction, measured, final_fraction)
