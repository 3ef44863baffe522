"""
Точное исчисление показателей неоднородных пространств Соболева.

Все вычисления выполняются на Fraction: ни одного float в решающих
процедурах. Вердикты детерминированы и тотальны на своих предусловиях;
"Unknown" и "PreconditionFail" - значения, а не исключения.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from ..exceptions import PreconditionError

RationalInput = Union[int, Fraction, str]

ONE = Fraction(1)
TWO = Fraction(2)


def _fmt(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _frac(value: RationalInput) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("float inputs are not accepted, pass Fraction or 'a/b'")
    return Fraction(value)


@dataclass(frozen=True)
class Exponent:
    """Показатель Лебега p ∈ [1, ∞]; value=None означает ∞"""
    value: Optional[Fraction]

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", _frac(self.value))
            if self.value < 1:
                raise PreconditionError(f"Exponent must be ≥ 1, got {self.value}", inequality="p ≥ 1")

    @classmethod
    def of(cls, value: Union["Exponent", RationalInput, None]) -> "Exponent":
        if isinstance(value, Exponent):
            return value
        if value is None:
            return INFINITY
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
            return INFINITY
        return cls(_frac(value))

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    @property
    def reciprocal(self) -> Fraction:
        """1/p, для ∞ равно 0"""
        return Fraction(0) if self.value is None else 1 / self.value

    def conjugate(self) -> "Exponent":
        """Сопряженный показатель p′ = p/(p−1); 1 ↔ ∞"""
        if self.value is None:
            return Exponent(ONE)
        if self.value == 1:
            return INFINITY
        return Exponent(self.value / (self.value - 1))

    def finite(self, name: str = "p") -> Fraction:
        if self.value is None:
            raise PreconditionError(f"{name} must be finite", inequality=f"{name} < ∞")
        return self.value

    def __str__(self) -> str:
        if self.value is None:
            return "inf"
        if self.value.denominator == 1:
            return str(self.value.numerator)
        return f"{self.value.numerator}/{self.value.denominator}"


INFINITY = Exponent(None)


@dataclass(frozen=True)
class ExponentVector:
    """Вектор показателей p⃗ = (p_0, …, p_k)"""
    entries: Tuple[Exponent, ...]

    def __post_init__(self):
        if not self.entries:
            raise PreconditionError("Exponent vector must be non-empty", inequality="k ≥ 0")

    @classmethod
    def of(cls, values: Iterable[Union[Exponent, RationalInput, None]]) -> "ExponentVector":
        if isinstance(values, ExponentVector):
            return values
        return cls(tuple(Exponent.of(v) for v in values))

    @property
    def k(self) -> int:
        return len(self.entries) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> Exponent:
        return self.entries[index]

    def finite_values(self) -> List[Fraction]:
        """Все компоненты как Fraction; бесконечные запрещены"""
        return [e.finite(f"p_{i}") for i, e in enumerate(self.entries)]

    def truncated(self, i: int) -> "ExponentVector":
        """p⃗^{(i)} = (p_0, …, p_i)"""
        return ExponentVector(self.entries[: i + 1])

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


@dataclass(frozen=True)
class SmoothnessIndex:
    """Гладкость s > 0 с производными ⌊s⌋, ⌈s⌉ и ν_s = s − ⌊s⌋"""
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", _frac(self.s))
        if self.s <= 0:
            raise PreconditionError(f"Smoothness must be positive, got {self.s}", inequality="s > 0")

    @classmethod
    def of(cls, value: Union["SmoothnessIndex", RationalInput]) -> "SmoothnessIndex":
        return value if isinstance(value, SmoothnessIndex) else cls(_frac(value))

    @property
    def floor(self) -> int:
        return math.floor(self.s)

    @property
    def ceil(self) -> int:
        return math.ceil(self.s)

    @property
    def nu(self) -> Fraction:
        return self.s - self.floor

    @property
    def is_integer(self) -> bool:
        return self.s.denominator == 1


@dataclass(frozen=True)
class RationalInterval:
    """Интервал с явными открытыми/закрытыми концами; upper=None - +∞"""
    lower: Fraction
    upper: Optional[Fraction]
    lower_closed: bool = True
    upper_closed: bool = True

    def contains(self, q: RationalInput) -> bool:
        q = _frac(q)
        if q < self.lower or (q == self.lower and not self.lower_closed):
            return False
        if self.upper is None:
            return True
        return q < self.upper or (q == self.upper and self.upper_closed)

    def __str__(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if (self.upper is not None and self.upper_closed) else ")"
        upper = "inf" if self.upper is None else _fmt(self.upper)
        return f"{left}{_fmt(self.lower)},{upper}{right}"


@dataclass(frozen=True)
class HolderTarget:
    """Гёльдерово пространство C_b^{n,λ}; family задает открытое семейство λ"""
    order: int
    exponent: Optional[Fraction] = None
    family: Optional[RationalInterval] = None

    def __str__(self) -> str:
        lam = str(self.exponent) if self.exponent is not None else f"λ∈{self.family}"
        return f"C_b^{{{self.order},{lam}}}"


class EmbeddingCase(str, Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    UNKNOWN = "unknown"


Trace = Tuple[Tuple[str, bool], ...]


class _TraceBuilder:
    """Накапливает пары (критерий, значение) в порядке проверки"""

    def __init__(self):
        self.items: List[Tuple[str, bool]] = []

    def check(self, label: str, value: bool) -> bool:
        self.items.append((label, bool(value)))
        return bool(value)

    def freeze(self) -> Trace:
        return tuple(self.items)


@dataclass(frozen=True)
class EmbeddingVerdict:
    case: EmbeddingCase
    lq_range: Optional[RationalInterval] = None
    holder: Optional[HolderTarget] = None
    corollary_holder: Optional[HolderTarget] = None
    k0: Optional[int] = None
    trace: Trace = ()

    def summary(self) -> str:
        if self.case in (EmbeddingCase.SUBCRITICAL, EmbeddingCase.CRITICAL):
            return f"{self.case.value} q∈{self.lq_range}"
        if self.case == EmbeddingCase.SUPERCRITICAL:
            text = f"{self.case.value} {self.holder}"
            if self.k0 is not None:
                text += f" (k0={self.k0})"
            return text
        return self.case.value


@dataclass(frozen=True)
class RecursionTrace:
    steps: Tuple[Tuple[Fraction, Fraction], ...]
    fixed_point: Fraction


@dataclass(frozen=True)
class EmbeddingChain:
    q: ExponentVector
    truncations: Tuple[ExponentVector, ...]


@dataclass(frozen=True)
class DensityVerdict:
    """Гипотеза специальной плотности и безусловный вердикт"""
    special_hypothesis: bool
    dense: bool
    trace: Trace = ()

    def __bool__(self) -> bool:
        return self.special_hypothesis


@dataclass(frozen=True)
class HeatEstimateParams:
    p_s: Fraction
    sigma: Fraction
    varrho: Fraction
    r_vec: ExponentVector
    weighted_applicable: bool
    q_upper: Fraction


class SchrodingerVerdictKind(str, Enum):
    CONVERGES_STANDARD = "ConvergesStandard"
    CONVERGES_PRINCIPAL_VALUE = "ConvergesPrincipalValue"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class HsThreshold:
    s0: Fraction
    strict: bool
    citation: str

    def cleared_by(self, s: Fraction) -> bool:
        return s > self.s0 if self.strict else s >= self.s0


@dataclass(frozen=True)
class SchrodingerVerdict:
    kind: SchrodingerVerdictKind
    beta: Optional[Fraction]
    threshold: Optional[HsThreshold]
    trace: Trace = ()


class Membership(str, Enum):
    MEMBER = "Member"
    NOT_MEMBER = "NotMember"
    PRECONDITION_FAIL = "PreconditionFail"


@dataclass(frozen=True)
class BubbleIntegrability:
    in_w1p: bool
    in_w1_p0p: bool
    p0_threshold: Fraction


def _dimension(N: int) -> int:
    if int(N) != N or N < 1:
        raise PreconditionError(f"Dimension must be a positive integer, got {N}", inequality="N ≥ 1")
    return int(N)


def _check_vector(pvec, k: int) -> List[Fraction]:
    vec = ExponentVector.of(pvec)
    if len(vec) != k + 1:
        raise PreconditionError(
            f"Exponent vector must have length k+1={k + 1}, got {len(vec)}",
            inequality="len(p⃗) = k+1",
        )
    return vec.finite_values()


def sobolev_conjugate(N: int, p, k: int = 1) -> Exponent:
    """
    Показатель Соболева Np/(N − kp).

    Raises:
        PreconditionError: если p = ∞ или kp ≥ N
    """
    N = _dimension(N)
    pv = Exponent.of(p).finite()
    if k < 1:
        raise PreconditionError("k must be positive", inequality="k ≥ 1")
    if k * pv >= N:
        raise PreconditionError(f"k·p = {k * pv} ≥ N = {N}", inequality="k·p < N")
    return Exponent(N * pv / (N - k * pv))


def integer_embedding_verdict(N: int, k: int, pvec) -> EmbeddingVerdict:
    """Вердикт вложения W_k^{p⃗} для трех случаев kp_k <, =, > N"""
    N = _dimension(N)
    ps = _check_vector(pvec, k)
    p0, pk = ps[0], ps[k]
    trace = _TraceBuilder()
    kp = k * pk

    if trace.check(f"k·p_k = {kp} < N = {N}", kp < N):
        conj = N * pk / (N - kp)
        trace.check(f"p_0 = {p0} ≤ Np_k/(N−kp_k) = {conj}", p0 <= conj)
        interval = RationalInterval(min(p0, conj), max(p0, conj), True, True)
        return EmbeddingVerdict(EmbeddingCase.SUBCRITICAL, lq_range=interval, trace=trace.freeze())

    if trace.check(f"k·p_k = {kp} = N = {N}", kp == N):
        interval = RationalInterval(p0, None, True, False)
        return EmbeddingVerdict(EmbeddingCase.CRITICAL, lq_range=interval, trace=trace.freeze())

    trace.check(f"k·p_k = {kp} > N = {N}", True)
    ratio = Fraction(N) / pk
    corollary = None
    if trace.check(f"p_k = {pk} > N = {N}", pk > N):
        corollary = HolderTarget(k - 1, 1 - ratio)

    if trace.check(f"N/p_k = {ratio} ∉ ℤ", ratio.denominator != 1):
        k0 = math.floor(ratio) + 1
        trace.check(f"(k0−1)·p_k = {(k0 - 1) * pk} < N < k0·p_k = {k0 * pk}", (k0 - 1) * pk < N < k0 * pk)
        holder = HolderTarget(k - k0, k0 - ratio)
    else:
        k0 = ratio.numerator + 1
        trace.check(f"k = {k} ≥ N/p_k + 1 = {k0}", k >= k0)
        holder = HolderTarget(k - k0, None, RationalInterval(Fraction(0), ONE, False, False))
    return EmbeddingVerdict(
        EmbeddingCase.SUPERCRITICAL,
        holder=holder,
        corollary_holder=corollary,
        k0=k0,
        trace=trace.freeze(),
    )


def holder_corollary(N: int, k: int, pvec) -> Optional[HolderTarget]:
    """Цель C_b^{k−1, 1−N/p_k} при p_k > N, иначе None"""
    N = _dimension(N)
    pk = _check_vector(pvec, k)[k]
    if pk > N:
        return HolderTarget(k - 1, 1 - Fraction(N) / pk)
    return None


def corollary_chain(N: int, k: int, pvec) -> EmbeddingChain:
    """
    Максимальный вектор q⃗ с q_k = p_k и цепочка усечений q⃗^{(k)}, …, q⃗^{(1)}.

    Raises:
        PreconditionError: если p_k ≥ N/k
    """
    N = _dimension(N)
    ps = _check_vector(pvec, k)
    pk = ps[k]
    if k * pk >= N:
        raise PreconditionError(f"p_k = {pk} ≥ N/k = {Fraction(N, k)}", inequality="p_k < N/k")
    qs = [N * pk / (N - (k - i) * pk) for i in range(k)] + [pk]
    q = ExponentVector.of(qs)
    truncations = tuple(q.truncated(i) for i in range(k, 0, -1))
    return EmbeddingChain(q=q, truncations=truncations)


def first_order_range(N: int, p0, p1) -> RationalInterval:
    """Диапазон q, для которого W_1^{(p0,p1)} ↪ W_1^{(q,p1)} (точен по растяжениям)"""
    N = _dimension(N)
    a = Exponent.of(p0).finite("p_0")
    b = Exponent.of(p1).finite("p_1")
    if b >= N:
        raise PreconditionError(f"p_1 = {b} ≥ N = {N}", inequality="p_1 < N")
    conj = N * b / (N - b)
    return RationalInterval(min(a, conj), max(a, conj), True, True)


def fractional_embedding_verdict(N: int, s, p0, p1) -> EmbeddingVerdict:
    """Вердикт вложения W_s^{(p0,p1)} при 0 < s < 1"""
    N = _dimension(N)
    s = SmoothnessIndex.of(s).s
    if not 0 < s < 1:
        raise PreconditionError(f"s = {s} outside (0,1)", inequality="0 < s < 1")
    a = Exponent.of(p0).finite("p_0")
    b = Exponent.of(p1).finite("p_1")
    if b <= 1:
        raise PreconditionError(f"p_1 = {b} must exceed 1", inequality="p_1 > 1")
    trace = _TraceBuilder()
    sp = s * b

    if trace.check(f"p_0 = {a} ≤ p_1 = {b}", a <= b):
        if trace.check(f"s·p_1 = {sp} < N = {N}", sp < N):
            conj = N * b / (N - sp)
            return EmbeddingVerdict(
                EmbeddingCase.SUBCRITICAL,
                lq_range=RationalInterval(a, conj, True, True),
                trace=trace.freeze(),
            )
        if trace.check(f"s·p_1 = {sp} = N = {N}", sp == N):
            return EmbeddingVerdict(
                EmbeddingCase.CRITICAL,
                lq_range=RationalInterval(a, None, True, False),
                trace=trace.freeze(),
            )
        trace.check(f"s·p_1 = {sp} > N = {N}", True)
        return EmbeddingVerdict(
            EmbeddingCase.SUPERCRITICAL,
            holder=HolderTarget(0, s - Fraction(N) / b),
            trace=trace.freeze(),
        )

    # p0 > p1: ответ известен только внутри окна
    if trace.check(f"s·p_1 = {sp} < N = {N}", sp < N):
        conj = N * b / (N - sp)
        if trace.check(f"p_0 = {a} < Np_1/(N−sp_1) = {conj}", a < conj):
            return EmbeddingVerdict(
                EmbeddingCase.SUBCRITICAL,
                lq_range=RationalInterval(a, conj, True, True),
                trace=trace.freeze(),
            )
    return EmbeddingVerdict(EmbeddingCase.UNKNOWN, trace=trace.freeze())


def special_density_criterion(N: int, k: int, pvec) -> DensityVerdict:
    """Проверка 1/p_i ≤ 1/p_{i−1} + 1/N для 1 ≤ i ≤ k"""
    N = _dimension(N)
    ps = _check_vector(pvec, k)
    trace = _TraceBuilder()
    holds = True
    for i in range(1, k + 1):
        lhs = 1 / ps[i]
        rhs = 1 / ps[i - 1] + Fraction(1, N)
        holds = trace.check(f"1/p_{i} = {lhs} ≤ 1/p_{i - 1} + 1/N = {rhs}", lhs <= rhs) and holds
    return DensityVerdict(special_hypothesis=holds, dense=True, trace=trace.freeze())


def regularized_exponents(N: int, k: int, pvec) -> ExponentVector:
    """
    Обратная рекурсия q_k = p_k, q_n = p_n либо Nq_{n+1}/(N − q_{n+1}).

    Результат удовлетворяет гипотезе специальной плотности и 1/q_n ≥ 1/p_n.
    """
    N = _dimension(N)
    ps = _check_vector(pvec, k)
    qs: List[Fraction] = [ps[k]]
    for n in range(k - 1, -1, -1):
        nxt = qs[0]
        if 1 / ps[n] >= 1 / nxt - Fraction(1, N):
            qs.insert(0, ps[n])
        else:
            # здесь 1/q_{n+1} > 1/N, знаменатель положителен
            qs.insert(0, N * nxt / (N - nxt))
    return ExponentVector.of(qs)


def fractional_density_criterion(N: int, s, p0, p1) -> bool:
    """Точная проверка s/N ≥ 1/p_1 − 1/p_0"""
    N = _dimension(N)
    s = SmoothnessIndex.of(s).s
    if not 0 < s < 1:
        raise PreconditionError(f"s = {s} outside (0,1)", inequality="0 < s < 1")
    a = Exponent.of(p0).finite("p_0")
    b = Exponent.of(p1).finite("p_1")
    return s / N >= 1 / b - 1 / a


def bootstrap_recursion(N: int, p0, p1, max_steps: int = 200) -> RecursionTrace:
    """
    Рекурсия r_n = q_{n−1}/p_1′ + 1, q_n = r_n·N/(N−1) с q_0 = p_0.

    Неподвижная точка q̃ вычисляется точно из 1/q̃ = 1/p_1 − 1/N.
    """
    N = _dimension(N)
    if N < 2:
        raise PreconditionError("Recursion requires N ≥ 2", inequality="N ≥ 2")
    a = Exponent.of(p0).finite("p_0")
    b = Exponent.of(p1).finite("p_1")
    if not 1 < b < N:
        raise PreconditionError(f"p_1 = {b} outside (1, N)", inequality="1 < p_1 < N")
    if not 1 / b > 1 / a + Fraction(1, N):
        raise PreconditionError(
            f"1/p_1 = {1 / b} ≤ 1/p_0 + 1/N = {1 / a + Fraction(1, N)}",
            inequality="1/p_1 > 1/p_0 + 1/N",
        )
    if max_steps < 1:
        raise PreconditionError("max_steps must be positive", inequality="max_steps ≥ 1")
    conj = b / (b - 1)
    fixed_point = 1 / (1 / b - Fraction(1, N))
    threshold = Fraction(1, 2 ** 20)
    steps: List[Tuple[Fraction, Fraction]] = []
    q = a
    for _ in range(max_steps):
        r = q / conj + 1
        q = r * N / (N - 1)
        steps.append((r, q))
        if abs(q - fixed_point) < threshold:
            break
    return RecursionTrace(steps=tuple(steps), fixed_point=fixed_point)


def beta_s(s, p_ceil) -> Fraction:
    """β_s = s для целых s, иначе ⌊s⌋ + ν_s(p_⌈s⌉ − 1)"""
    idx = SmoothnessIndex.of(s)
    p = Exponent.of(p_ceil).finite("p_⌈s⌉")
    if not 1 < p <= 2:
        raise PreconditionError(f"p_⌈s⌉ = {p} outside (1,2]", inequality="1 < p_⌈s⌉ ≤ 2")
    if idx.is_integer:
        return idx.s
    return idx.floor + idx.nu * (p - 1)


def known_hs_threshold(N: int, a) -> HsThreshold:
    """Известный порог сходимости в H^s с источником"""
    N = _dimension(N)
    a = _frac(a)
    if a <= 1:
        raise PreconditionError(f"a = {a} must exceed 1", inequality="a > 1")
    if N == 1:
        citation = "Carleson; Dahlberg-Kenig (sharp)" if a == 2 else "Sjolin (a > 1)"
        return HsThreshold(Fraction(1, 4), False, citation)
    if a == 2:
        citation = "Du-Guth-Li" if N == 2 else "Du-Zhang"
        return HsThreshold(Fraction(1, 2) - Fraction(1, 2 * N + 2), True, citation)
    return HsThreshold(Fraction(1, 2), True, "Sjolin")


def schrodinger_criterion(N: int, s, pvec, a) -> SchrodingerVerdict:
    """Вердикт сходимости e^{it(−Δ)^{a/2}}f → f для f ∈ W_s^{p⃗}"""
    N = _dimension(N)
    idx = SmoothnessIndex.of(s)
    a = _frac(a)
    if a <= 1:
        raise PreconditionError(f"a = {a} must exceed 1", inequality="a > 1")
    ps = _check_vector(pvec, idx.ceil)
    p = ps[idx.ceil]
    if not 1 < p <= 2:
        raise PreconditionError(f"p_⌈s⌉ = {p} outside (1,2]", inequality="1 < p_⌈s⌉ ≤ 2")
    if p < 2 and a != 2:
        raise PreconditionError("p_⌈s⌉ < 2 requires a = 2", inequality="a = 2")

    trace = _TraceBuilder()
    half = Fraction(N, 2)
    if p == 2:
        threshold = known_hs_threshold(N, a)
        if trace.check(f"s = {idx.s} < N/2 = {half}", idx.s < half):
            op = ">" if threshold.strict else "≥"
            if trace.check(f"s {op} s0 = {threshold.s0} ({threshold.citation})", threshold.cleared_by(idx.s)):
                return SchrodingerVerdict(SchrodingerVerdictKind.CONVERGES_STANDARD, idx.s, threshold, trace.freeze())
            return SchrodingerVerdict(SchrodingerVerdictKind.UNKNOWN, idx.s, threshold, trace.freeze())
        if trace.check(f"a = {a} = 2", a == 2):
            return SchrodingerVerdict(SchrodingerVerdictKind.CONVERGES_PRINCIPAL_VALUE, idx.s, threshold, trace.freeze())
        return SchrodingerVerdict(SchrodingerVerdictKind.UNKNOWN, idx.s, threshold, trace.freeze())

    beta = beta_s(idx, p)
    lower = 1 / p - Fraction(N, 2 * (N + 1))
    ratio = beta / N
    window = lower < ratio < 1 / p
    if trace.check(f"{lower} < β_s/N = {ratio} < 1/p_⌈s⌉ = {1 / p}", window):
        return SchrodingerVerdict(SchrodingerVerdictKind.CONVERGES_STANDARD, beta, None, trace.freeze())
    if trace.check(f"β_s = {beta} ≥ N/p_⌈s⌉ = {N / p}", beta >= N / p):
        return SchrodingerVerdict(SchrodingerVerdictKind.CONVERGES_PRINCIPAL_VALUE, beta, None, trace.freeze())
    return SchrodingerVerdict(SchrodingerVerdictKind.UNKNOWN, beta, None, trace.freeze())


def fourier_local_integrability(N: int, s, pvec) -> bool:
    """Локальная интегрируемость f̂: β_s·p_⌈s⌉ < N"""
    N = _dimension(N)
    idx = SmoothnessIndex.of(s)
    ps = _check_vector(pvec, idx.ceil)
    p = ps[idx.ceil]
    return beta_s(idx, p) * p < N


def example_membership(N: int, s, p0, p1, delta) -> Membership:
    """f = (1+|x|²)^{−δ/2} ∈ W_s^{(p0,p1)} тогда и только тогда, когда p_1(δ+s) > N"""
    N = _dimension(N)
    s = SmoothnessIndex.of(s).s
    if not 0 < s <= 1:
        raise PreconditionError(f"s = {s} outside (0,1]", inequality="0 < s ≤ 1")
    a = Exponent.of(p0).finite("p_0")
    b = Exponent.of(p1).finite("p_1")
    delta = _frac(delta)
    if not b * delta < N < a * delta:
        return Membership.PRECONDITION_FAIL
    return Membership.MEMBER if b * (delta + s) > N else Membership.NOT_MEMBER


def separation_window(N: int, s, s_tilde, p0, p1) -> Optional[RationalInterval]:
    """
    Интервал δ, для которого f ∈ W_s^{p⃗} \\ W_{s̃}^{p⃗}; None, если окно пусто.
    """
    N = _dimension(N)
    s = _frac(s)
    st = _frac(s_tilde)
    if not 0 < st < s <= 1:
        raise PreconditionError(f"need 0 < s̃ = {st} < s = {s} ≤ 1", inequality="0 < s̃ < s ≤ 1")
    a = Exponent.of(p0).finite("p_0")
    b = Exponent.of(p1).finite("p_1")
    if not a > b:
        raise PreconditionError(f"p_0 = {a} ≤ p_1 = {b}", inequality="p_0 > p_1")
    if not st < Fraction(N) / b - Fraction(N) / a:
        return None
    lower = max(Fraction(N) / a, Fraction(N) / b - s)
    upper = Fraction(N) / b - st
    if lower >= upper:
        return None
    return RationalInterval(lower, upper, False, False)


def hs_gap_condition(N: int, s, p0, delta) -> bool:
    """f ∈ W_s^{(p0,2)} \\ H^s при p_0 > N/δ > 2 и 2(δ+s) > N"""
    N = _dimension(N)
    s = _frac(s)
    if not 0 < s < 1:
        raise PreconditionError(f"s = {s} outside (0,1)", inequality="0 < s < 1")
    a = Exponent.of(p0).finite("p_0")
    delta = _frac(delta)
    ratio = Fraction(N) / delta
    return a > ratio > 2 and 2 * (delta + s) > N


def bubble_integrability(N: int, p, p0) -> BubbleIntegrability:
    """Принадлежность пузыря U_{λ,x0} пространствам W^{1,p} и W_1^{(p0,p)}"""
    N = _dimension(N)
    pv = Exponent.of(p).finite()
    a = Exponent.of(p0).finite("p_0")
    if not 1 < pv < N:
        raise PreconditionError(f"p = {pv} outside (1, N)", inequality="1 < p < N")
    threshold = N * (pv - 1) / (N - pv)
    return BubbleIntegrability(in_w1p=pv * pv < N, in_w1_p0p=a > threshold, p0_threshold=threshold)


def heat_estimate_params(N: int, s, pvec) -> HeatEstimateParams:
    """Параметры p_s, σ, ϱ и r⃗ весовых оценок для уравнения теплопроводности"""
    N = _dimension(N)
    idx = SmoothnessIndex.of(s)
    vec = ExponentVector.of(pvec)
    if len(vec) != idx.ceil + 1:
        raise PreconditionError(
            f"Exponent vector must have length ⌈s⌉+1={idx.ceil + 1}, got {len(vec)}",
            inequality="len(p⃗) = ⌈s⌉+1",
        )
    ps = vec.finite_values()
    for i, p in enumerate(ps):
        if not p > 1:
            raise PreconditionError(f"p_{i} = {p} must exceed 1", inequality="1 < p_i < ∞")
    p_floor, p_ceil = ps[idx.floor], ps[idx.ceil]
    p_s = min(p_floor, p_ceil)
    sigma = Fraction(N) / (2 * p_floor) + Fraction(1, 2)
    varrho = (2 - p_s) * sigma
    if idx.is_integer:
        r_vec = vec
    else:
        r_vec = ExponentVector.of(ps[: idx.floor + 1] + [TWO])
    return HeatEstimateParams(
        p_s=p_s,
        sigma=sigma,
        varrho=varrho,
        r_vec=r_vec,
        weighted_applicable=p_floor <= 2 and p_ceil <= 2,
        q_upper=2 / (2 + varrho),
    )
