"""
Диспетчер операций исчисления показателей для CLI и HTTP.

Разбирает строковые аргументы IndexRequest в точные дроби, вызывает
операцию из index_calculus и рендерит результат.
"""
import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..exceptions import ConfigError
from ..schemas.indices import IndexRequest, IndexResult, TraceEntry
from ..utils.rationals import format_rational, format_with_decimal, parse_exponent, parse_rational, parse_rational_list
from . import index_calculus as ic

logger = logging.getLogger(__name__)

Rendered = Tuple[str, Dict[str, Any], ic.Trace]


def _need(req: IndexRequest, name: str, operation: str):
    value = getattr(req, name)
    if value is None:
        raise ConfigError(f"Operation {operation!r} requires {name}", field=f"indices.{name}")
    return value


def _pvec(req: IndexRequest, operation: str) -> List[Optional[Fraction]]:
    raw = _need(req, "p", operation)
    if isinstance(raw, list):
        return [parse_exponent(item, "indices.p") for item in raw]
    return parse_rational_list(raw, "indices.p")


def _pair(req: IndexRequest, operation: str) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    values = _pvec(req, operation)
    if len(values) != 2:
        raise ConfigError(f"Operation {operation!r} expects p = p0,p1, got {len(values)} entries", field="indices.p")
    return values[0], values[1]


def _single(req: IndexRequest, operation: str) -> Optional[Fraction]:
    values = _pvec(req, operation)
    if len(values) != 1:
        raise ConfigError(f"Operation {operation!r} expects a single exponent p", field="indices.p")
    return values[0]


def _rational(req: IndexRequest, name: str, operation: str) -> Fraction:
    return parse_rational(_need(req, name, operation), f"indices.{name}")


def _fmt(value: Optional[Fraction]) -> str:
    return format_rational(value)


def _interval(interval: Optional[ic.RationalInterval]) -> Optional[Dict[str, Any]]:
    if interval is None:
        return None
    return {
        "lower": _fmt(interval.lower),
        "upper": _fmt(interval.upper),
        "lower_closed": interval.lower_closed,
        "upper_closed": interval.upper_closed,
        "text": str(interval),
    }


def _holder(target: Optional[ic.HolderTarget]) -> Optional[Dict[str, Any]]:
    if target is None:
        return None
    return {
        "order": target.order,
        "exponent": None if target.exponent is None else _fmt(target.exponent),
        "family": _interval(target.family),
        "text": str(target),
    }


def _verdict(verdict: ic.EmbeddingVerdict) -> Rendered:
    value = {
        "case": verdict.case.value,
        "lq_range": _interval(verdict.lq_range),
        "holder": _holder(verdict.holder),
        "corollary_holder": _holder(verdict.corollary_holder),
        "k0": verdict.k0,
    }
    return verdict.summary(), value, verdict.trace


# ============================================================================
# Операции
# ============================================================================

def _conjugate(req: IndexRequest) -> Rendered:
    q = ic.sobolev_conjugate(_need(req, "N", "conjugate"), _single(req, "conjugate"), req.k or 1)
    return format_with_decimal(q.value), {"q": _fmt(q.value)}, ()


def _embed(req: IndexRequest) -> Rendered:
    return _verdict(ic.integer_embedding_verdict(_need(req, "N", "embed"), _need(req, "k", "embed"), _pvec(req, "embed")))


def _embed_frac(req: IndexRequest) -> Rendered:
    p0, p1 = _pair(req, "embed-frac")
    return _verdict(ic.fractional_embedding_verdict(_need(req, "N", "embed-frac"), _rational(req, "s", "embed-frac"), p0, p1))


def _density(req: IndexRequest) -> Rendered:
    verdict = ic.special_density_criterion(_need(req, "N", "density"), _need(req, "k", "density"), _pvec(req, "density"))
    text = f"special hypothesis {'holds' if verdict.special_hypothesis else 'fails'}; dense={str(verdict.dense).lower()}"
    return text, {"special_hypothesis": verdict.special_hypothesis, "dense": verdict.dense}, verdict.trace


def _density_frac(req: IndexRequest) -> Rendered:
    p0, p1 = _pair(req, "density-frac")
    holds = ic.fractional_density_criterion(_need(req, "N", "density-frac"), _rational(req, "s", "density-frac"), p0, p1)
    return ("dense" if holds else "criterion fails"), {"criterion": holds}, ()


def _recursion(req: IndexRequest) -> Rendered:
    p0, p1 = _pair(req, "recursion")
    trace = ic.bootstrap_recursion(_need(req, "N", "recursion"), p0, p1, req.max_steps)
    steps = [{"r": _fmt(r), "q": _fmt(q), "q_decimal": float(q)} for r, q in trace.steps]
    text = f"q̃ = {format_with_decimal(trace.fixed_point)} after {len(steps)} steps"
    return text, {"fixed_point": _fmt(trace.fixed_point), "steps": steps}, ()


def _beta(req: IndexRequest) -> Rendered:
    beta = ic.beta_s(_rational(req, "s", "beta"), _single(req, "beta"))
    return format_with_decimal(beta), {"beta": _fmt(beta)}, ()


def _schrodinger(req: IndexRequest) -> Rendered:
    op = "schrodinger-criterion"
    verdict = ic.schrodinger_criterion(_need(req, "N", op), _rational(req, "s", op), _pvec(req, op), _rational(req, "a", op))
    threshold = verdict.threshold
    value = {
        "kind": verdict.kind.value,
        "beta": None if verdict.beta is None else _fmt(verdict.beta),
        "threshold": None if threshold is None else {
            "s0": _fmt(threshold.s0), "strict": threshold.strict, "citation": threshold.citation,
        },
    }
    return verdict.kind.value, value, verdict.trace


def _membership(req: IndexRequest) -> Rendered:
    p0, p1 = _pair(req, "membership")
    result = ic.example_membership(
        _need(req, "N", "membership"), _rational(req, "s", "membership"), p0, p1, _rational(req, "delta", "membership"),
    )
    return result.value, {"membership": result.value}, ()


def _heat_params(req: IndexRequest) -> Rendered:
    params = ic.heat_estimate_params(_need(req, "N", "heat-params"), _rational(req, "s", "heat-params"), _pvec(req, "heat-params"))
    value = {
        "p_s": _fmt(params.p_s),
        "sigma": _fmt(params.sigma),
        "varrho": _fmt(params.varrho),
        "r_vec": str(params.r_vec),
        "weighted_applicable": params.weighted_applicable,
        "q_upper": _fmt(params.q_upper),
    }
    text = f"p_s={value['p_s']} σ={value['sigma']} ϱ={value['varrho']} r={value['r_vec']} q<{value['q_upper']}"
    return text, value, ()


def _regularized(req: IndexRequest) -> Rendered:
    op = "regularized-exponents"
    q = ic.regularized_exponents(_need(req, "N", op), _need(req, "k", op), _pvec(req, op))
    return str(q), {"q": [str(e) for e in q.entries]}, ()


def _chain(req: IndexRequest) -> Rendered:
    chain = ic.corollary_chain(_need(req, "N", "chain"), _need(req, "k", "chain"), _pvec(req, "chain"))
    value = {"q": [str(e) for e in chain.q.entries], "truncations": [str(t) for t in chain.truncations]}
    return str(chain.q), value, ()


def _holder_corollary(req: IndexRequest) -> Rendered:
    op = "holder-corollary"
    target = ic.holder_corollary(_need(req, "N", op), _need(req, "k", op), _pvec(req, op))
    return (str(target) if target else "none"), {"holder": _holder(target)}, ()


def _first_order(req: IndexRequest) -> Rendered:
    p0, p1 = _pair(req, "first-order-range")
    interval = ic.first_order_range(_need(req, "N", "first-order-range"), p0, p1)
    return f"q∈{interval}", {"range": _interval(interval)}, ()


def _separation(req: IndexRequest) -> Rendered:
    op = "separation-window"
    p0, p1 = _pair(req, op)
    window = ic.separation_window(_need(req, "N", op), _rational(req, "s", op), _rational(req, "s_tilde", op), p0, p1)
    return (f"δ∈{window}" if window else "empty"), {"window": _interval(window)}, ()


def _hs_gap(req: IndexRequest) -> Rendered:
    holds = ic.hs_gap_condition(
        _need(req, "N", "hs-gap"), _rational(req, "s", "hs-gap"), _single(req, "hs-gap"), _rational(req, "delta", "hs-gap"),
    )
    return str(holds).lower(), {"gap": holds}, ()


def _hs_threshold(req: IndexRequest) -> Rendered:
    threshold = ic.known_hs_threshold(_need(req, "N", "hs-threshold"), _rational(req, "a", "hs-threshold"))
    op = ">" if threshold.strict else "≥"
    text = f"s {op} {_fmt(threshold.s0)} ({threshold.citation})"
    return text, {"s0": _fmt(threshold.s0), "strict": threshold.strict, "citation": threshold.citation}, ()


def _fourier_integrability(req: IndexRequest) -> Rendered:
    op = "fourier-integrability"
    holds = ic.fourier_local_integrability(_need(req, "N", op), _rational(req, "s", op), _pvec(req, op))
    return str(holds).lower(), {"locally_integrable": holds}, ()


def _bubble(req: IndexRequest) -> Rendered:
    p, p0 = _pair(req, "bubble-integrability")
    result = ic.bubble_integrability(_need(req, "N", "bubble-integrability"), p, p0)
    value = {"in_w1p": result.in_w1p, "in_w1_p0p": result.in_w1_p0p, "p0_threshold": _fmt(result.p0_threshold)}
    return f"W^1,p: {str(result.in_w1p).lower()}; W_1^(p0,p): {str(result.in_w1_p0p).lower()}", value, ()


_OPERATIONS: Dict[str, Callable[[IndexRequest], Rendered]] = {
    "conjugate": _conjugate,
    "embed": _embed,
    "embed-frac": _embed_frac,
    "density": _density,
    "density-frac": _density_frac,
    "recursion": _recursion,
    "beta": _beta,
    "schrodinger-criterion": _schrodinger,
    "membership": _membership,
    "heat-params": _heat_params,
    "regularized-exponents": _regularized,
    "chain": _chain,
    "holder-corollary": _holder_corollary,
    "first-order-range": _first_order,
    "separation-window": _separation,
    "hs-gap": _hs_gap,
    "hs-threshold": _hs_threshold,
    "fourier-integrability": _fourier_integrability,
    "bubble-integrability": _bubble,
}


def run_index_operation(operation: str, req: IndexRequest) -> IndexResult:
    """
    Raises:
        ConfigError: неизвестная операция или отсутствующий аргумент
        PreconditionError: нарушено предусловие операции
    """
    handler = _OPERATIONS.get(operation)
    if handler is None:
        raise ConfigError(f"Unknown index operation {operation!r}", field="indices.operation")
    text, value, trace = handler(req)
    logger.debug(f"indices {operation}: {text}")
    return IndexResult(
        operation=operation,
        text=text,
        value=value,
        trace=[TraceEntry(criterion=c, holds=h) for c, h in trace],
    )
