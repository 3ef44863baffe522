"""
Зарегистрированные проверки набора verify.

acceptance.* - приемочный набор, property.* - дополнительные свойства
(запускаются с suite="all").
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import PreconditionError
from ..schemas.verify import CheckOutcome, CheckStatus
from .evolution import (
    HeatRunConfig,
    SchrodingerRunConfig,
    convergence_experiment,
    geometric_times,
    heat_closed_form,
    heat_energy_experiment,
    heat_propagate,
    lp12_identity_check,
    regularized_propagate,
    schrodinger_propagate,
)
from .fields import (
    FourierBump,
    Gaussian,
    GridSpec,
    PLaplaceBubble,
    RationalDecay,
    SampledField,
    SmoothBump,
    default_grid,
    partial_derivative,
    plaplace_residual,
    sample,
)
from .index_calculus import (
    EmbeddingCase,
    Exponent,
    HolderTarget,
    Membership,
    RationalInterval,
    SchrodingerVerdictKind,
    beta_s,
    bootstrap_recursion,
    corollary_chain,
    example_membership,
    fractional_embedding_verdict,
    integer_embedding_verdict,
    schrodinger_criterion,
    sobolev_conjugate,
    special_density_criterion,
)
from .norms import QuadratureSpec, Scheme, gagliardo_full, hs_seminorm_fourier
from .verify import (
    CheckContext,
    DensityMode,
    MembershipCell,
    check_constant_one_inequality,
    check_directional_equivalence,
    check_fractional_embedding,
    check_gn_inequality,
    check_membership_gap,
    check_separation,
    density_convergence_check,
    membership_concordance,
    register_check,
    sobolev_ratios,
)

F = Fraction


def _combine(name: str, parts: Sequence[Tuple[str, CheckOutcome]]) -> CheckOutcome:
    """Fail, если провалена хотя бы одна часть; measured с префиксами частей"""
    measured: Dict[str, float] = {}
    for prefix, outcome in parts:
        for key, value in outcome.measured.items():
            measured[f"{prefix}.{key}"] = math.nan if value is None else value
    failed = [prefix for prefix, o in parts if o.status is CheckStatus.FAIL]
    return CheckOutcome.judged(
        name,
        not failed,
        measured,
        max(o.tolerance for _, o in parts),
        notes=f"failed parts: {', '.join(failed)}" if failed else "",
    )


# ============================================================================
# Точная арифметика
# ============================================================================

def _raises(fn: Callable[[], object]) -> object:
    try:
        return fn()
    except PreconditionError:
        return "error"


def _index_cases() -> List[Tuple[str, Callable[[], object], object]]:
    return [
        ("conjugate(4,2,1)", lambda: sobolev_conjugate(4, 2, 1), Exponent(F(4))),
        ("conjugate(3,3/2,1)", lambda: sobolev_conjugate(3, F(3, 2), 1), Exponent(F(3))),
        ("conjugate(3,2,2)", lambda: _raises(lambda: sobolev_conjugate(3, 2, 2)), "error"),
        ("embed(3,1,(2,2))", lambda: integer_embedding_verdict(3, 1, (2, 2)).lq_range, RationalInterval(F(2), F(6))),
        ("embed(2,1,(4,2))", lambda: integer_embedding_verdict(2, 1, (4, 2)).lq_range, RationalInterval(F(4), None, True, False)),
        (
            "embed(3,2,(1,1,2))",
            lambda: (lambda v: (v.case, v.holder, v.k0))(integer_embedding_verdict(3, 2, (1, 1, 2))),
            (EmbeddingCase.SUPERCRITICAL, HolderTarget(0, F(1, 2)), 2),
        ),
        ("chain(4,1,(10,2))", lambda: [e.value for e in corollary_chain(4, 1, (10, 2)).q.entries], [F(4), F(2)]),
        ("chain(6,2,(20,5,2))", lambda: [e.value for e in corollary_chain(6, 2, (20, 5, 2)).q.entries], [F(6), F(3), F(2)]),
        ("chain(2,1,(3,2))", lambda: _raises(lambda: corollary_chain(2, 1, (3, 2))), "error"),
        ("embed-frac(2,1/2,2,2)", lambda: fractional_embedding_verdict(2, F(1, 2), 2, 2).lq_range, RationalInterval(F(2), F(4))),
        ("embed-frac(1,3/4,1,2)", lambda: fractional_embedding_verdict(1, F(3, 4), 1, 2).holder, HolderTarget(0, F(1, 4))),
        ("embed-frac(2,1/2,5,2)", lambda: fractional_embedding_verdict(2, F(1, 2), 5, 2).case, EmbeddingCase.UNKNOWN),
        ("beta(3/2,3/2)", lambda: beta_s(F(3, 2), F(3, 2)), F(5, 4)),
        ("beta(2,3/2)", lambda: beta_s(2, F(3, 2)), F(2)),
        ("schrodinger(1,1/4,(4,2),2)", lambda: schrodinger_criterion(1, F(1, 4), (4, 2), 2).kind, SchrodingerVerdictKind.CONVERGES_STANDARD),
        ("schrodinger(1,1,(4,2),2)", lambda: schrodinger_criterion(1, 1, (4, 2), 2).kind, SchrodingerVerdictKind.CONVERGES_PRINCIPAL_VALUE),
        ("schrodinger(1,1/2,(4,3/2),2)", lambda: schrodinger_criterion(1, F(1, 2), (4, F(3, 2)), 2).kind, SchrodingerVerdictKind.UNKNOWN),
        ("membership(2,1/2,4,2,4/5)", lambda: example_membership(2, F(1, 2), 4, 2, F(4, 5)), Membership.MEMBER),
        ("membership(1,1/2,2,2,1)", lambda: example_membership(1, F(1, 2), 2, 2, 1), Membership.PRECONDITION_FAIL),
        ("density(2,1,(6,1))", lambda: special_density_criterion(2, 1, (6, 1)).special_hypothesis, False),
    ]


@register_check("acceptance.index_table")
def check_index_table(ctx: CheckContext) -> CheckOutcome:
    mismatches = [label for label, fn, expected in _index_cases() if fn() != expected]
    return CheckOutcome.judged(
        "acceptance.index_table",
        not mismatches,
        {"cases": len(_index_cases()), "mismatches": len(mismatches)},
        0.0,
        notes=", ".join(mismatches),
    )


BOOTSTRAP_CASES = (
    (3, F(10), F(3, 2)),
    (4, F(100), F(2)),
    (3, F(6), F(3, 2)),
    (2, F(10), F(3, 2)),
    (2, F(100), F(5, 4)),
    (4, F(20), F(3)),
    (5, F(12), F(2)),
    (5, F(50), F(4)),
    (6, F(8), F(2)),
    (3, F(50), F(2)),
)


@register_check("acceptance.bootstrap")
def check_bootstrap(ctx: CheckContext) -> CheckOutcome:
    failures = []
    for N, p0, p1 in BOOTSTRAP_CASES:
        trace = bootstrap_recursion(N, p0, p1)
        qs = [p0] + [q for _, q in trace.steps]
        decreasing = all(b < a for a, b in zip(qs, qs[1:]))
        consistent = all(q == r * N / (N - 1) for r, q in trace.steps)
        fixed = 1 / p1 == 1 / trace.fixed_point + F(1, N)
        matches = trace.fixed_point == sobolev_conjugate(N, p1, 1).value
        if not (decreasing and consistent and fixed and matches):
            failures.append(f"({N},{p0},{p1})")
    return CheckOutcome.judged(
        "acceptance.bootstrap",
        not failures,
        {"cases": len(BOOTSTRAP_CASES), "failures": len(failures)},
        0.0,
        notes=", ".join(failures),
    )


# ============================================================================
# Эволюция
# ============================================================================

@register_check("acceptance.heat_oracle")
def check_heat_oracle(ctx: CheckContext) -> CheckOutcome:
    grid = GridSpec(1, 16.0, 1024)
    f = Gaussian.create(N=1)
    errors = []
    for t in (0.1, 0.5, 1.0):
        exact = heat_closed_form(t, grid.points())
        u = heat_propagate(f, t, grid).values.real
        errors.append(float(np.max(np.abs(u - exact)) / np.max(np.abs(exact))))
    worst = max(errors)
    return CheckOutcome.judged("acceptance.heat_oracle", worst < 1e-6, {"max_relative_error": worst}, 1e-6)


@register_check("acceptance.heat_monotonicity")
def check_heat_monotonicity(ctx: CheckContext) -> CheckOutcome:
    times = geometric_times(1e-3, 1.0, 24)
    parts = []
    for N in (1, 2):
        grid = default_grid(N)
        cfg = HeatRunConfig(
            grid=grid,
            initial=Gaussian.create(N=N),
            s=F(3, 2),
            pvec=(4, 2, 2),
            times=times,
            include_weighted=False,
            quad=ctx.quad(grid=grid),
        )
        report = heat_energy_experiment(cfg)
        lp_columns = [c for c in report.columns if c.startswith("lp[")]
        growth = max(row[c] / report.rows[0][c] for row in report.rows for c in lp_columns if report.rows[0][c] > 0)
        passed = bool(report.summary["monotone_all"]) and bool(report.summary["l2_nonincreasing"])
        parts.append((f"N{N}", CheckOutcome.judged(f"N{N}", passed, {"max_growth": growth, "rows": len(report.rows)}, 1e-3)))
    return _combine("acceptance.heat_monotonicity", parts)


@register_check("acceptance.lp12_identity")
def check_lp12_identity(ctx: CheckContext) -> CheckOutcome:
    f = Gaussian.create(N=1)
    residuals = {str(p): lp12_identity_check(f, p).residual for p in (F(3, 2), F(2), F(3))}
    exact_gap = abs(lp12_identity_check(f, 2).lhs + math.sqrt(math.pi / 2.0))
    measured = {f"residual_p={p}": r for p, r in residuals.items()}
    measured["p=2_exact_gap"] = exact_gap
    passed = max(residuals.values()) < 1e-6 and exact_gap < 1e-6
    return CheckOutcome.judged("acceptance.lp12_identity", passed, measured, 1e-6)


@register_check("acceptance.cross_oracle")
def check_cross_oracle(ctx: CheckContext) -> CheckOutcome:
    grid = GridSpec(1, 16.0, 2048)
    f = Gaussian.create(N=1)
    quad = ctx.quad(grid=grid, scheme=Scheme.TENSOR)
    measured = {}
    for s in (F(1, 4), F(1, 2), F(3, 4)):
        full = gagliardo_full(f, s, 2, quad).value
        spectral = hs_seminorm_fourier(f, s, grid)
        measured[f"rel_diff_s={s}"] = abs(full - spectral) / spectral
    return CheckOutcome.judged("acceptance.cross_oracle", max(measured.values()) < 0.02, measured, 0.02)


@register_check("acceptance.schrodinger")
def check_schrodinger(ctx: CheckContext) -> CheckOutcome:
    grid = default_grid(1)
    band_limited = FourierBump(scale=0.5).sample(grid)
    cfg = SchrodingerRunConfig(
        grid=grid,
        initial=band_limited,
        a=F(2),
        times=geometric_times(0.25, 1e-4, 12),
        probes=np.array([-3.0, -1.5, 0.0, 0.5, 2.0, 4.0]),
    )
    report = convergence_experiment(cfg)
    t = 0.25
    u = schrodinger_propagate(Gaussian.create(N=1), t, 2, grid)
    modulus = abs(u.evaluate(np.zeros((1, 1)))[0])
    expected = 0.5 * (1.0 / 16.0 + t * t) ** -0.25
    measured = {
        "max_mass_drift": report.summary["max_mass_drift"],
        "final_error": report.summary["final_error"],
        "monotone": float(report.summary["monotone_trend"]),
        "gaussian_modulus_gap": abs(modulus - expected),
    }
    passed = (
        measured["max_mass_drift"] < 1e-12
        and measured["final_error"] < 1e-3
        and report.summary["monotone_trend"]
        and measured["gaussian_modulus_gap"] < 1e-5
    )
    return CheckOutcome.judged("acceptance.schrodinger", passed, measured, 1e-3)


REGULARIZED_GRID = GridSpec(1, 320.0, 4096)
REGULARIZED_EPSILONS = (0.08, 0.04, 0.02, 0.01)


def _cutoff_bound(u0: SampledField, eps: float) -> float:
    """max_x |reg − free| ≤ n^{−N}·Σ φ₀(|ω|/ε)·|DFT(u0)|"""
    weights = FourierBump(scale=eps).multiplier(u0.grid.abs_frequency())
    return float(np.sum(weights * np.abs(np.fft.fftn(u0.values))) / u0.values.size)


def _regularized_sweep(u0: SampledField, t: float) -> Dict[str, List[float]]:
    free = schrodinger_propagate(u0, t, 2).values
    values = [regularized_propagate(u0, t, eps).values for eps in REGULARIZED_EPSILONS]
    smooth = [regularized_propagate(u0, t, eps, shape="smooth").values for eps in REGULARIZED_EPSILONS]
    return {
        "cauchy": [float(np.max(np.abs(a - b))) for a, b in zip(values, values[1:])],
        "removed": [float(np.max(np.abs(v - free))) for v in values],
        "bound": [_cutoff_bound(u0, eps) for eps in REGULARIZED_EPSILONS],
        "shape": [float(np.max(np.abs(s - v))) for s, v in zip(smooth, values)],
    }


@register_check("acceptance.regularized")
def check_regularized(ctx: CheckContext) -> CheckOutcome:
    """
    Две серии ε на сетке с π/L < min ε, так что срезка режет несколько мод.

    flat: ∂⁶ гауссианы, спектр обращается в ноль порядка 6 в нуле; разности
    соседних ε и двух форм φ₀ меньше 1e−6, но не нулевые.
    gaussian: спектр в нуле равен √π; отклонение от свободной эволюции
    убывает вместе с ε и не превосходит оценки по модам под срезкой.
    """
    t = 0.25
    base = sample(Gaussian.create(N=1), REGULARIZED_GRID)

    flat = _regularized_sweep(partial_derivative(base, (6,)), t)
    flat_ok = (
        max(flat["cauchy"]) < 1e-6
        and max(flat["shape"]) < 1e-6
        and flat["removed"][0] > 1e-12
    )
    flat_outcome = CheckOutcome.judged(
        "flat",
        flat_ok,
        {
            "max_cauchy_difference": max(flat["cauchy"]),
            "max_shape_difference": max(flat["shape"]),
            "removed_at_largest_eps": flat["removed"][0],
        },
        1e-6,
    )

    gauss = _regularized_sweep(base, t)
    removed, bound, shape = gauss["removed"], gauss["bound"], gauss["shape"]
    gauss_ok = (
        all(later < earlier for earlier, later in zip(removed, removed[1:]))
        and all(r <= b * (1.0 + 1e-9) + 1e-14 for r, b in zip(removed, bound))
        and removed[-1] < removed[0] / 4.0
        and shape[0] > 1e-9
        and shape[-1] < shape[0] / 4.0
    )
    measured = {f"removed_eps={eps}": r for eps, r in zip(REGULARIZED_EPSILONS, removed)}
    measured.update({f"shape_eps={eps}": s for eps, s in zip(REGULARIZED_EPSILONS, shape)})
    gauss_outcome = CheckOutcome.judged("gaussian", gauss_ok, measured, 1e-6)

    return _combine("acceptance.regularized", [("flat", flat_outcome), ("gaussian", gauss_outcome)])


# ============================================================================
# Неравенства и принадлежность
# ============================================================================

def constant_one_family(N: int, seed: int, size: int = 10) -> List:
    """Сдвиги и растяжения гауссиан и срезок, детерминированные по seed"""
    rng = np.random.default_rng(seed)
    family = []
    for i in range(size):
        center = tuple(rng.uniform(-1.5, 1.5, N))
        if i % 2 == 0:
            family.append(Gaussian.create(N=N, sigma=float(rng.uniform(0.6, 1.6)), center=center))
        else:
            family.append(SmoothBump.create(N=N, radius=float(rng.uniform(1.5, 3.0)), center=center))
    return family


@register_check("acceptance.constant_one_inequality")
def check_constant_one(ctx: CheckContext) -> CheckOutcome:
    N = 2
    grid = GridSpec(2, 8.0, 256)
    family = constant_one_family(N, ctx.seed)
    main = check_constant_one_inequality(family, N, grid)
    control = check_constant_one_inequality(family, N, grid, constant=1.0 / (4 * N))
    measured = {
        "max_ratio": main.measured["max_ratio"],
        "control_max_ratio": control.measured["max_ratio"],
        "control_violations": control.measured["violations"],
    }
    passed = main.status is CheckStatus.PASS and control.status is CheckStatus.FAIL
    return CheckOutcome.judged("acceptance.constant_one_inequality", passed, measured, main.tolerance)


@register_check("acceptance.sobolev_dilation")
def check_sobolev_dilation(ctx: CheckContext) -> CheckOutcome:
    grid2 = GridSpec(2, 8.0, 256)
    grid3 = GridSpec(3, 8.0, 128)
    g2 = Gaussian.create(N=2)
    planar = sobolev_ratios(g2, 2, F(3, 2), grid=grid2)
    spatial = sobolev_ratios(Gaussian.create(N=3), 3, 2, grid=grid3)
    wrong = 2.0 * float(sobolev_conjugate(2, F(3, 2)).value)
    control = sobolev_ratios(g2, 2, F(3, 2), exponent=wrong, grid=grid2)

    def spread(r: List[float]) -> float:
        return max(r) / min(r) - 1.0

    measured = {"spread_N2": spread(planar), "spread_N3": spread(spatial), "control_spread": spread(control)}
    passed = measured["spread_N2"] < 0.01 and measured["spread_N3"] < 0.01 and measured["control_spread"] > 0.10
    return CheckOutcome.judged("acceptance.sobolev_dilation", passed, measured, 0.01)


MEMBERSHIP_CELLS = tuple(
    MembershipCell(N=1, delta=F(d), s=F(s), p0=F(16), p1=F(2))
    for d, s in (
        ("3/10", "2/5"), ("1/5", "1/2"), ("2/5", "3/10"), ("1/4", "3/5"),
        ("1/10", "3/10"), ("3/20", "1/5"), ("1/5", "3/20"), ("3/10", "1/10"),
    )
)


@register_check("acceptance.membership_concordance")
def check_membership(ctx: CheckContext) -> CheckOutcome:
    quad = ctx.quad(fractional_method="real")
    return membership_concordance(MEMBERSHIP_CELLS, quad, name="acceptance.membership_concordance")


@register_check("acceptance.bubble_residual")
def check_bubble_residual(ctx: CheckContext) -> CheckOutcome:
    u = PLaplaceBubble(N=4, lam=1.0, p=2.0)
    rng = np.random.default_rng(ctx.seed)
    points = [np.zeros(4)] + [rng.uniform(-0.75, 0.75, 4) for _ in range(9)]
    worst = max(plaplace_residual(u, x, 1e-2) for x in points)
    perturbed = plaplace_residual(u.with_amplitude(1.1 * u.amplitude), np.zeros(4), 1e-2)
    return CheckOutcome.judged(
        "acceptance.bubble_residual",
        worst < 1e-4 and perturbed > 0.1,
        {"max_residual": worst, "perturbed_residual": perturbed},
        1e-4,
    )


# ============================================================================
# Дополнительные свойства
# ============================================================================

@register_check("property.gn_inequality")
def property_gn_inequality(ctx: CheckContext) -> CheckOutcome:
    planar = check_gn_inequality(Gaussian.create(N=2), 2, F(3, 2), grid=GridSpec(2, 8.0, 256))
    sup_form = check_gn_inequality(Gaussian.create(N=1), 1, 2)
    return _combine("property.gn_inequality", [("N2", planar), ("sup_N1", sup_form)])


@register_check("property.fractional_embedding")
def property_fractional_embedding(ctx: CheckContext) -> CheckOutcome:
    gaussians = [Gaussian.create(N=1).dilate(lam) for lam in (1.0, 0.5, 0.25, 0.125)]
    bumps = [SmoothBump.create(N=1, radius=r) for r in (2.0, 1.0, 0.5, 4.0)]
    quad = ctx.quad(fractional_method="fourier")
    return check_fractional_embedding(
        gaussians + bumps, 1, F(1, 2), F(1), F(2), quad=quad, name="property.fractional_embedding",
    )


@register_check("property.membership_gap")
def property_membership_gap(ctx: CheckContext) -> CheckOutcome:
    return check_membership_gap(1, F(1, 2), F(4), F(2), F(2, 5), ctx.quad(fractional_method="real"), name="property.membership_gap")


@register_check("property.separation_window")
def property_separation(ctx: CheckContext) -> CheckOutcome:
    return check_separation(1, F(3, 5), F(1, 10), F(8), F(2), ctx.quad(fractional_method="real"), name="property.separation_window")


@register_check("property.density_truncate")
def property_density_truncate(ctx: CheckContext) -> CheckOutcome:
    return density_convergence_check(
        Gaussian.create(N=1), DensityMode.TRUNCATE, 1, (3, 2), quad=ctx.quad(), name="property.density_truncate",
    )


@register_check("property.density_mollify")
def property_density_mollify(ctx: CheckContext) -> CheckOutcome:
    return density_convergence_check(
        Gaussian.create(N=1), DensityMode.MOLLIFY, F(1, 2), (2, 2), quad=ctx.quad(), name="property.density_mollify",
    )


@register_check("property.density_rational_decay")
def property_density_rational_decay(ctx: CheckContext) -> CheckOutcome:
    # s/N = 1/2 ≥ 1/p₁ − 1/p₀ = 1/4
    return density_convergence_check(
        RationalDecay(N=1, delta=3.0),
        DensityMode.TRUNCATE,
        F(1, 2),
        (4, 2),
        schedule=(1.0, 2.0, 4.0, 8.0, 16.0),
        quad=ctx.quad(),
        name="property.density_rational_decay",
    )


@register_check("property.density_rational_decay_violating")
def property_density_rational_decay_violating(ctx: CheckContext) -> CheckOutcome:
    # s/N = 1/10 < 1/p₁ − 1/p₀ = 3/8: только отчет
    return density_convergence_check(
        RationalDecay(N=1, delta=0.6),
        DensityMode.TRUNCATE,
        F(1, 10),
        (8, 2),
        schedule=(1.0, 2.0, 4.0, 8.0, 16.0),
        quad=ctx.quad(),
        asserted=False,
        name="property.density_rational_decay_violating",
    )


@register_check("property.directional_equivalence")
def property_directional_equivalence(ctx: CheckContext) -> CheckOutcome:
    return check_directional_equivalence(
        Gaussian.create(N=2),
        F(1, 2),
        F(2),
        (GridSpec(2, 8.0, 64), GridSpec(2, 8.0, 128)),
        quad=ctx.quad(),
        name="property.directional_equivalence",
    )


@register_check("property.lp12_identity_sech")
def property_lp12_identity_sech(ctx: CheckContext) -> CheckOutcome:
    grid = GridSpec(1, 40.0, 8192)
    sech = SampledField.from_function(grid, lambda x: 1.0 / np.cosh(x[..., 0]))
    residuals = {f"residual_p={p}": lp12_identity_check(sech, p).residual for p in (F(3, 2), F(2), F(3))}
    return CheckOutcome.judged("property.lp12_identity_sech", max(residuals.values()) < 1e-6, residuals, 1e-6)
