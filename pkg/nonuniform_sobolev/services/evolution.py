"""
Спектральные пропагаторы на периодической сетке и эксперименты над ними.

Тепловой: e^{−t|ω|²}. Дробный Шрёдингер: e^{it|ω|^a}, символ |ω|^a
в нуле равен 0. Регуляризованный (a = 2): e^{it|ω|²}(1 − φ₀(ω/ε)).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import settings
from ..exceptions import ConfigError, PreconditionError
from ..schemas.experiments import ExperimentReport, IdentityCheck
from ..utils.experiment_logging import ExperimentLogger
from .fields import (
    Field,
    FourierBump,
    GridSpec,
    MultiIndex,
    SampledField,
    Spectrum,
    apply_multiplier,
    evaluate_spectral,
    fourier,
    partial_derivative,
    sample,
)
from .index_calculus import ExponentVector, SmoothnessIndex, heat_estimate_params
from .norms import QuadratureSpec, gagliardo_seminorm, lp_norm, nonuniform_norm

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-3
L2_SLACK = 1e-12
IDENTITY_GRID = GridSpec(1, 40.0, 8192)


def _sampled(f: Field, grid: Optional[GridSpec]) -> SampledField:
    return sample(f, None if isinstance(f, SampledField) else grid)


# ============================================================================
# Пропагаторы
# ============================================================================

def heat_propagate(f: Field, t: float, grid: Optional[GridSpec] = None) -> SampledField:
    """u(t) = F^{−1}[e^{−t|ω|²} f̂]; t = 0 возвращает f"""
    if t < 0:
        raise PreconditionError(f"Heat time t = {t} must be non-negative", inequality="t ≥ 0")
    u0 = _sampled(f, grid)
    if t == 0:
        return u0
    return apply_multiplier(u0, lambda g: np.exp(-t * g.abs_frequency() ** 2))


def heat_closed_form(t: float, x: np.ndarray) -> np.ndarray:
    """Решение с данными e^{−|x|²}: (1+4t)^{−N/2} e^{−|x|²/(1+4t)}; x формы (…, N)"""
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    spread = 1.0 + 4.0 * t
    return spread ** (-N / 2.0) * np.exp(-np.sum(x ** 2, axis=-1) / spread)


def _check_order(a: float) -> float:
    a = float(a)
    if not a > 1:
        raise PreconditionError(f"Dispersion order a = {a} must exceed 1", inequality="a > 1")
    return a


def schrodinger_propagate(f: Field, t: float, a: Union[float, Fraction] = 2, grid: Optional[GridSpec] = None) -> SampledField:
    """e^{it(−Δ)^{a/2}} f как умножение спектра на e^{it|ω|^a}"""
    a = _check_order(a)
    u0 = _sampled(f, grid)
    if t == 0:
        return u0
    return apply_multiplier(u0, lambda g: np.exp(1j * t * g.abs_frequency() ** a))


def schrodinger_gaussian_closed_form(t: float, x: Union[float, np.ndarray] = 0.0) -> complex:
    """Решение с данными e^{−x²} при a = 2, N = 1: ½(1/4 − it)^{−1/2} e^{−x²/(1 − 4it)}"""
    z = 0.25 - 1j * t
    return 0.5 / np.sqrt(z) * np.exp(-np.asarray(x, dtype=float) ** 2 / (1.0 - 4.0j * t))


def lowhigh_split(f: Field, grid: Optional[GridSpec] = None, cutoff: Optional[FourierBump] = None) -> Tuple[SampledField, SampledField]:
    """f̂₁ = φ̂·f̂, f̂₂ = (1 − φ̂)·f̂"""
    bump = cutoff or FourierBump()
    u0 = _sampled(f, grid)
    low = apply_multiplier(u0, lambda g: bump.multiplier(g.abs_frequency()))
    high = apply_multiplier(u0, lambda g: 1.0 - bump.multiplier(g.abs_frequency()))
    return low, high


def check_cutoff(eps: float, grid: GridSpec) -> None:
    # при ε < π/L срезка убирает только нулевую моду и от ε не зависит
    if eps < grid.dual_spacing:
        raise PreconditionError(
            f"Cutoff ε = {eps} below the first nonzero frequency π/L = {grid.dual_spacing:.6g}",
            inequality="ε ≥ π/L",
            details={"eps": eps, "dual_spacing": grid.dual_spacing},
        )


def regularized_propagate(
    f: Field,
    t: float,
    eps: float,
    grid: Optional[GridSpec] = None,
    shape: str = "quintic",
) -> SampledField:
    """
    Спектр умножается на e^{it|ω|²}(1 − φ₀(|ω|/ε)).

    Raises:
        PreconditionError: ε меньше первой ненулевой частоты π/L
    """
    if not eps > 0:
        raise PreconditionError(f"Cutoff ε = {eps} must be positive", inequality="ε > 0")
    u0 = _sampled(f, grid)
    check_cutoff(eps, u0.grid)
    bump = FourierBump(scale=eps, shape=shape)
    cut = int(np.count_nonzero(u0.grid.abs_frequency() < 2.0 * eps))
    logger.debug(f"Regularized propagation: eps={eps} shape={shape}, {cut} modes touched by the cutoff")
    return apply_multiplier(
        u0,
        lambda g: np.exp(1j * t * g.abs_frequency() ** 2) * (1.0 - bump.multiplier(g.abs_frequency())),
    )


def wraparound_mass(f: Field, grid: Optional[GridSpec] = None) -> float:
    """max |f| в узлах вне шара |x| < L/2"""
    u0 = _sampled(f, grid)
    outside = u0.grid.radii() >= u0.grid.L / 2.0
    return float(np.abs(u0.values[outside]).max()) if outside.any() else 0.0


def geometric_times(start: float, end: float, count: int) -> List[float]:
    """count точек геометрической прогрессии от start до end включительно"""
    if count < 2 or not start > 0 or not end > 0 or start == end:
        raise ConfigError(f"geom:{start}:{end}:{count} needs positive distinct ends and count ≥ 2", field="times")
    ratio = (end / start) ** (1.0 / (count - 1))
    times = [start * ratio ** i for i in range(count)]
    times[-1] = end
    return times


def weighted_time_integral(times: Sequence[float], values: Sequence[float], weight_power: float) -> float:
    """
    Трапеции для ∫ t^w·v(t) dt по узлам times (включая 0, если он есть).
    При w < 0 узел t = 0 отбрасывается.
    """
    pairs = [(float(t), float(v)) for t, v in zip(times, values) if not (t == 0 and weight_power < 0)]
    if len(pairs) < 2:
        return 0.0
    integrand = [(t ** weight_power if t > 0 else (1.0 if weight_power == 0 else 0.0)) * v for t, v in pairs]
    segments = [
        0.5 * (integrand[i] + integrand[i + 1]) * (pairs[i + 1][0] - pairs[i][0])
        for i in range(len(pairs) - 1)
    ]
    return math.fsum(segments)


# ============================================================================
# Эксперимент: энергетические оценки уравнения теплопроводности
# ============================================================================

@dataclass
class HeatRunConfig:
    grid: GridSpec
    initial: Field
    s: SmoothnessIndex
    pvec: ExponentVector
    times: Sequence[float]
    T_list: Sequence[float] = ()
    q_list: Sequence[Fraction] = ()
    include_weighted: bool = True
    quad: Optional[QuadratureSpec] = None
    echo: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.s = SmoothnessIndex.of(self.s)
        self.pvec = ExponentVector.of(self.pvec)
        times = [float(t) for t in self.times]
        if not times or any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("times must be positive and strictly increasing", field="heat.times")
        if any(float(T) <= 0 for T in self.T_list):
            raise ConfigError("T_list entries must be positive", field="heat.T_list")
        if self.initial.N != self.grid.N:
            raise ConfigError(f"Initial data dimension {self.initial.N} ≠ grid N={self.grid.N}", field="heat.N")
        self.times = times
        self.T_list = [float(T) for T in self.T_list]
        self.quad = self.quad or QuadratureSpec(grid=self.grid)


def _derivative_columns(u: SampledField, idx: SmoothnessIndex, pvec: ExponentVector, quad: QuadratureSpec) -> Dict[str, float]:
    columns: Dict[str, float] = {}
    for order in range(idx.floor + 1):
        for alpha in MultiIndex.of_order(u.N, order):
            columns[f"lp[D^{alpha}]"] = lp_norm(partial_derivative(u, alpha), pvec[order], quad).value
    if not idx.is_integer:
        for alpha in MultiIndex.of_order(u.N, idx.floor):
            estimate = gagliardo_seminorm(partial_derivative(u, alpha), idx.nu, pvec[idx.ceil], quad)
            columns[f"gag[D^{alpha}]"] = estimate.value
    return columns


def heat_energy_experiment(cfg: HeatRunConfig) -> ExperimentReport:
    """
    Строки по t: L^p-нормы производных, полунормы Гальярдо, норма W_s^{p⃗},
    флаги монотонности; интегралы по времени весовых норм для каждого T.
    """
    params = heat_estimate_params(cfg.grid.N, cfg.s.s, cfg.pvec)
    q_upper = params.q_upper
    for q in cfg.q_list:
        if not 0 < Fraction(q) < q_upper:
            raise ConfigError(f"q = {q} outside (0, {q_upper})", field="heat.q_list")

    run = ExperimentLogger("heat_energy", f"N={cfg.grid.N} s={cfg.s.s} p={cfg.pvec}")
    run.start({"times": len(cfg.times), "T_list": cfg.T_list, "varrho": str(params.varrho)})

    u0 = _sampled(cfg.initial, cfg.grid)
    wrap = wraparound_mass(u0)
    if wrap > settings.WRAPAROUND_BUDGET:
        run.warning(f"Wrap-around mass {wrap:.3e} exceeds budget {settings.WRAPAROUND_BUDGET:.0e}")

    schedule = sorted(set(cfg.times) | set(cfg.T_list))
    all_times = [0.0] + schedule
    s1, s2 = cfg.s.s + 1, cfg.s.s + 2
    r1 = ExponentVector.of(list(params.r_vec.entries) + [2])
    r2 = ExponentVector.of(list(r1.entries) + [2])

    rows: List[Dict[str, Any]] = []
    baseline: Dict[str, float] = {}
    previous_l2 = math.inf
    try:
        for i, t in enumerate(all_times):
            u = heat_propagate(u0, t)
            row: Dict[str, Any] = {"t": t}
            derivative_values = _derivative_columns(u, cfg.s, cfg.pvec, cfg.quad)
            row.update(derivative_values)
            row["norm_Ws"] = math.fsum(derivative_values.values())
            l2 = lp_norm(u, 2, cfg.quad).value
            row["l2"] = l2
            if cfg.include_weighted:
                row["norm_Ws1"] = nonuniform_norm(u, s1, r1, cfg.quad).value
                row["norm_Ws2"] = nonuniform_norm(u, s2, r2, cfg.quad).value
            if i == 0:
                baseline = {k: v for k, v in derivative_values.items() if k.startswith("lp[")}
            for key, v0 in baseline.items():
                row[f"monotone{key[2:]}"] = derivative_values[key] <= v0 * (1.0 + MONOTONE_SLACK)
            row["l2_nonincreasing"] = l2 <= previous_l2 * (1.0 + L2_SLACK)
            previous_l2 = l2
            rows.append(row)
            run.row_progress(i, len(all_times), t=t, norm_Ws=row["norm_Ws"])
    except Exception as e:
        run.finish(success=False, error=e)
        raise

    integrals = []
    if cfg.include_weighted:
        varrho = float(params.varrho)
        for T in cfg.T_list:
            window = [r for r in rows if r["t"] <= T]
            ts = [r["t"] for r in window]
            entry: Dict[str, Any] = {
                "T": T,
                "weighted_s1": weighted_time_integral(ts, [r["norm_Ws1"] ** 2 for r in window], varrho),
                "weighted_s2": weighted_time_integral(ts, [r["norm_Ws2"] ** 2 for r in window], 1.0 + varrho),
            }
            for q in cfg.q_list:
                entry[f"q={q}"] = weighted_time_integral(ts, [r["norm_Ws2"] ** float(q) for r in window], 0.0)
            integrals.append(entry)

    monotone_keys = [k for k in rows[0] if k.startswith("monotone")]
    summary = {
        "monotone_all": all(r[k] for r in rows for k in monotone_keys),
        "l2_nonincreasing": all(r["l2_nonincreasing"] for r in rows),
        "weighted_applicable": params.weighted_applicable,
        "p_s": str(params.p_s),
        "sigma": str(params.sigma),
        "varrho": str(params.varrho),
        "q_upper": str(q_upper),
        "wraparound_mass": wrap,
        "wraparound_ok": wrap <= settings.WRAPAROUND_BUDGET,
        "integrals": integrals,
    }
    run.finish(success=True)
    columns = list(rows[0].keys())
    return ExperimentReport(name="heat", config_echo=cfg.echo, columns=columns, rows=rows, summary=summary)


def lp12_identity_check(f: Field, p: Union[float, Fraction], grid: Optional[GridSpec] = None) -> IdentityCheck:
    """
    lhs = ∫ f″|f|^{p−2}f, rhs = −(p−1)∫|f′|²|f|^{p−2}; подынтегральное
    выражение справа равно 0 там, где f′ = 0 или f = 0.
    """
    if f.N != 1:
        raise PreconditionError(f"Identity check is one-dimensional, got N={f.N}", inequality="N = 1")
    p = float(p)
    if not 1 < p < math.inf:
        raise PreconditionError(f"p = {p} outside (1, ∞)", inequality="1 < p < ∞")
    g = f.grid if isinstance(f, SampledField) else (grid or IDENTITY_GRID)
    if isinstance(f, SampledField):
        values = f.values.real
        first = partial_derivative(f, (1,)).values.real
        second = partial_derivative(f, (2,)).values.real
    else:
        pts = g.points()
        values = np.real(f.evaluate(pts))
        first = np.real(f.derivative(MultiIndex((1,))).evaluate(pts))
        second = np.real(f.derivative(MultiIndex((2,))).evaluate(pts))

    magnitude = np.abs(values)
    active = (magnitude > 0) & (first != 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs_density = np.where(magnitude > 0, second * np.sign(values) * magnitude ** (p - 1.0), 0.0)
        rhs_density = np.where(active, first ** 2 * magnitude ** (p - 2.0), 0.0)
    lhs = g.h * math.fsum(lhs_density)
    rhs = -(p - 1.0) * g.h * math.fsum(rhs_density)
    scale = max(abs(lhs), abs(rhs))
    residual = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return IdentityCheck(lhs=lhs, rhs=rhs, residual=residual)


# ============================================================================
# Эксперимент: сходимость e^{it(−Δ)^{a/2}} f → f при t → 0
# ============================================================================

@dataclass
class SchrodingerRunConfig:
    grid: GridSpec
    initial: Field
    a: Fraction
    times: Sequence[float]
    probes: np.ndarray
    epsilon_list: Sequence[float] = ()
    echo: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not Fraction(self.a) > 1:
            raise ConfigError(f"a = {self.a} must exceed 1", field="schrodinger.a")
        times = [float(t) for t in self.times]
        if not times or any(t <= 0 for t in times) or any(b >= a for a, b in zip(times, times[1:])):
            raise ConfigError("times must be positive and strictly decreasing", field="schrodinger.times")
        if any(not float(e) > 0 for e in self.epsilon_list):
            raise ConfigError("epsilon_list entries must be positive", field="schrodinger.epsilon_list")
        if self.epsilon_list and Fraction(self.a) != 2:
            raise ConfigError("Regularized operator is defined for a = 2 only", field="schrodinger.epsilon_list")
        if any(float(e) < self.grid.dual_spacing for e in self.epsilon_list):
            raise ConfigError(
                f"epsilon_list entries must be at least π/L = {self.grid.dual_spacing:.6g}",
                field="schrodinger.epsilon_list",
            )
        self.times = times
        self.probes = np.asarray(self.probes, dtype=float).reshape(-1, self.grid.N)


def _probe_error(spectrum: Spectrum, multiplier: np.ndarray, probes: np.ndarray, reference: np.ndarray) -> float:
    values = evaluate_spectral(spectrum * multiplier, probes)
    return float(np.max(np.abs(values - reference)))


def convergence_experiment(cfg: SchrodingerRunConfig) -> ExperimentReport:
    """Строки по t: max_x |u(t,x) − f(x)| по пробным точкам для f, f₁ и f₂"""
    a = float(cfg.a)
    run = ExperimentLogger("schrodinger_convergence", f"N={cfg.grid.N} a={cfg.a}")
    run.start({"times": len(cfg.times), "probes": len(cfg.probes), "epsilons": list(cfg.epsilon_list)})

    u0 = _sampled(cfg.initial, cfg.grid)
    low, high = lowhigh_split(u0)
    spectra = {"f": fourier(u0), "f1": fourier(low), "f2": fourier(high)}
    references = {name: evaluate_spectral(sp, cfg.probes) for name, sp in spectra.items()}
    omega = spectra["f"].abs_omega()
    mass0 = lp_norm(u0, 2).value

    rows: List[Dict[str, Any]] = []
    max_mass_drift = 0.0
    for i, t in enumerate([0.0] + cfg.times):
        phase = np.exp(1j * t * omega ** a)
        row: Dict[str, Any] = {"t": t}
        for name, sp in spectra.items():
            row[f"err_{name}"] = _probe_error(sp, phase, cfg.probes, references[name])
        for eps in cfg.epsilon_list:
            bump = FourierBump(scale=float(eps))
            regularized = phase * (1.0 - bump.multiplier(omega))
            values = evaluate_spectral(spectra["f"] * regularized, cfg.probes)
            free = evaluate_spectral(spectra["f"] * phase, cfg.probes)
            row[f"reg_eps={eps}"] = float(np.max(np.abs(values - free)))
        mass = lp_norm(schrodinger_propagate(u0, t, a), 2).value
        max_mass_drift = max(max_mass_drift, abs(mass - mass0) / mass0 if mass0 > 0 else 0.0)
        rows.append(row)
        run.row_progress(i, len(cfg.times) + 1, t=t, err_f=row["err_f"])

    errors = [r["err_f"] for r in rows[1:]]
    summary = {
        "final_error": errors[-1],
        "monotone_trend": all(later <= earlier * (1.0 + 1e-12) + 1e-15 for earlier, later in zip(errors, errors[1:])),
        "max_mass_drift": max_mass_drift,
        "t0_error": rows[0]["err_f"],
    }
    run.finish(success=True)
    return ExperimentReport(
        name="schrodinger",
        config_echo=cfg.echo,
        columns=list(rows[0].keys()),
        rows=rows,
        summary=summary,
    )
