"""Точная арифметика показателей: вложения, плотность, рекурсии, вердикты"""
from fractions import Fraction as F

import pytest

from nonuniform_sobolev.exceptions import PreconditionError
from nonuniform_sobolev.services import index_calculus as ic
from nonuniform_sobolev.services.acceptance import BOOTSTRAP_CASES
from nonuniform_sobolev.services.index_calculus import (
    INFINITY,
    EmbeddingCase,
    Exponent,
    ExponentVector,
    HolderTarget,
    Membership,
    RationalInterval,
    SchrodingerVerdictKind,
)


@pytest.mark.unit
class TestExponent:
    def test_conjugate_pairs(self):
        assert Exponent(F(3, 2)).conjugate() == Exponent(F(3))
        assert Exponent(F(2)).conjugate() == Exponent(F(2))
        assert Exponent(F(1)).conjugate() is INFINITY
        assert INFINITY.conjugate() == Exponent(F(1))

    def test_parsing_of_infinity(self):
        assert Exponent.of("inf") is INFINITY
        assert Exponent.of(None) is INFINITY
        assert INFINITY.reciprocal == 0

    def test_below_one_rejected(self):
        with pytest.raises(PreconditionError) as exc:
            Exponent(F(1, 2))
        assert exc.value.inequality == "p ≥ 1"

    def test_float_inputs_rejected(self):
        with pytest.raises(TypeError):
            ic.sobolev_conjugate(3, 1.5)

    def test_vector_truncation(self):
        vec = ExponentVector.of([6, 3, 2])
        assert vec.k == 2
        assert str(vec.truncated(1)) == "(6, 3)"


@pytest.mark.unit
class TestIntervals:
    def test_closed_interval_rendering(self):
        assert str(RationalInterval(F(2), F(6))) == "[2,6]"

    def test_half_line_rendering(self):
        assert str(RationalInterval(F(4), None, True, False)) == "[4,inf)"

    def test_open_endpoints(self):
        interval = RationalInterval(F(1, 4), F(3, 4), False, False)
        assert interval.contains(F(1, 2))
        assert not interval.contains(F(1, 4))
        assert not interval.contains(F(3, 4))


@pytest.mark.unit
class TestSobolevConjugate:
    @pytest.mark.parametrize("N, p, k, expected", [
        (4, 2, 1, F(4)),
        (3, F(3, 2), 1, F(3)),
        (6, 2, 2, F(6)),
    ])
    def test_values(self, N, p, k, expected):
        assert ic.sobolev_conjugate(N, p, k) == Exponent(expected)

    def test_supercritical_rejected(self):
        with pytest.raises(PreconditionError) as exc:
            ic.sobolev_conjugate(3, 2, 2)
        assert exc.value.inequality == "k·p < N"

    def test_infinite_p_rejected(self):
        with pytest.raises(PreconditionError):
            ic.sobolev_conjugate(3, "inf")


@pytest.mark.unit
class TestIntegerEmbedding:
    def test_subcritical(self):
        verdict = ic.integer_embedding_verdict(3, 1, (2, 2))
        assert verdict.case is EmbeddingCase.SUBCRITICAL
        assert verdict.lq_range == RationalInterval(F(2), F(6))
        assert verdict.summary() == "subcritical q∈[2,6]"

    def test_subcritical_with_large_p0(self):
        verdict = ic.integer_embedding_verdict(3, 1, (10, 2))
        assert verdict.lq_range == RationalInterval(F(6), F(10))

    def test_critical(self):
        verdict = ic.integer_embedding_verdict(2, 1, (4, 2))
        assert verdict.case is EmbeddingCase.CRITICAL
        assert verdict.lq_range == RationalInterval(F(4), None, True, False)

    def test_supercritical_fractional_ratio(self):
        verdict = ic.integer_embedding_verdict(3, 2, (1, 1, 2))
        assert verdict.case is EmbeddingCase.SUPERCRITICAL
        assert verdict.holder == HolderTarget(0, F(1, 2))
        assert verdict.k0 == 2
        assert verdict.corollary_holder is None
        assert verdict.summary() == "supercritical C_b^{0,1/2} (k0=2)"

    def test_supercritical_integer_ratio_gives_open_family(self):
        verdict = ic.integer_embedding_verdict(2, 2, (2, 2, 2))
        assert verdict.k0 == 2
        assert verdict.holder.exponent is None
        assert verdict.holder.family == RationalInterval(F(0), F(1), False, False)
        assert str(verdict.holder) == "C_b^{0,λ∈(0,1)}"

    def test_corollary_holder_when_p_exceeds_dimension(self):
        verdict = ic.integer_embedding_verdict(1, 1, (2, 2))
        assert verdict.corollary_holder == HolderTarget(0, F(1, 2))
        assert ic.holder_corollary(1, 1, (2, 2)) == HolderTarget(0, F(1, 2))
        assert ic.holder_corollary(3, 1, (2, 2)) is None

    def test_trace_records_criteria_in_order(self):
        verdict = ic.integer_embedding_verdict(3, 1, (2, 2))
        assert verdict.trace[0] == ("k·p_k = 2 < N = 3", True)

    def test_vector_length_must_match_order(self):
        with pytest.raises(PreconditionError) as exc:
            ic.integer_embedding_verdict(3, 2, (2, 2))
        assert exc.value.inequality == "len(p⃗) = k+1"


@pytest.mark.unit
class TestChains:
    def test_first_order_chain(self):
        chain = ic.corollary_chain(4, 1, (10, 2))
        assert [e.value for e in chain.q.entries] == [F(4), F(2)]

    def test_second_order_chain_and_truncations(self):
        chain = ic.corollary_chain(6, 2, (20, 5, 2))
        assert [e.value for e in chain.q.entries] == [F(6), F(3), F(2)]
        assert [str(t) for t in chain.truncations] == ["(6, 3, 2)", "(6, 3)"]

    def test_chain_needs_subcritical_top_exponent(self):
        with pytest.raises(PreconditionError):
            ic.corollary_chain(2, 1, (3, 2))

    @pytest.mark.parametrize("N, p0, p1, expected", [
        (3, 2, 2, RationalInterval(F(2), F(6))),
        (3, 10, 2, RationalInterval(F(6), F(10))),
    ])
    def test_first_order_range(self, N, p0, p1, expected):
        assert ic.first_order_range(N, p0, p1) == expected

    def test_first_order_range_needs_p1_below_dimension(self):
        with pytest.raises(PreconditionError):
            ic.first_order_range(2, 1, 2)


@pytest.mark.unit
class TestFractionalEmbedding:
    def test_subcritical(self):
        verdict = ic.fractional_embedding_verdict(2, F(1, 2), 2, 2)
        assert verdict.case is EmbeddingCase.SUBCRITICAL
        assert verdict.lq_range == RationalInterval(F(2), F(4))

    def test_supercritical_holder(self):
        verdict = ic.fractional_embedding_verdict(1, F(3, 4), 1, 2)
        assert verdict.holder == HolderTarget(0, F(1, 4))

    def test_critical(self):
        verdict = ic.fractional_embedding_verdict(1, F(1, 2), 2, 2)
        assert verdict.case is EmbeddingCase.CRITICAL

    def test_outside_window_is_unknown(self):
        assert ic.fractional_embedding_verdict(2, F(1, 2), 5, 2).case is EmbeddingCase.UNKNOWN

    def test_inside_window_for_large_p0(self):
        verdict = ic.fractional_embedding_verdict(2, F(1, 2), 3, 2)
        assert verdict.lq_range == RationalInterval(F(3), F(4))

    def test_s_must_be_fractional(self):
        with pytest.raises(PreconditionError):
            ic.fractional_embedding_verdict(2, 1, 2, 2)


@pytest.mark.unit
class TestDensity:
    def test_special_hypothesis(self):
        assert ic.special_density_criterion(3, 1, (2, 2)).special_hypothesis
        verdict = ic.special_density_criterion(2, 1, (6, 1))
        assert not verdict.special_hypothesis
        assert verdict.dense

    def test_regularized_exponents_replace_small_entries(self):
        assert [e.value for e in ic.regularized_exponents(3, 1, (10, 2)).entries] == [F(6), F(2)]
        assert [e.value for e in ic.regularized_exponents(3, 1, (4, 2)).entries] == [F(4), F(2)]

    def test_regularized_exponents_satisfy_hypothesis(self):
        q = ic.regularized_exponents(3, 2, (10, 10, 2))
        assert ic.special_density_criterion(3, 2, q).special_hypothesis

    @pytest.mark.parametrize("N, s, p0, p1, expected", [
        (2, F(1, 2), 2, 4, True),
        (1, F(1, 4), 10, 2, False),
        (1, F(1, 2), 10, 2, True),
    ])
    def test_fractional_criterion(self, N, s, p0, p1, expected):
        assert ic.fractional_density_criterion(N, s, p0, p1) is expected


@pytest.mark.unit
class TestBootstrapRecursion:
    @pytest.mark.parametrize("N, p0, p1", BOOTSTRAP_CASES)
    def test_decreasing_to_sobolev_exponent(self, N, p0, p1):
        trace = ic.bootstrap_recursion(N, p0, p1)
        qs = [p0] + [q for _, q in trace.steps]
        assert all(b < a for a, b in zip(qs, qs[1:]))
        assert all(q == r * N / (N - 1) for r, q in trace.steps)
        assert trace.fixed_point == ic.sobolev_conjugate(N, p1, 1).value
        assert qs[-1] > trace.fixed_point

    def test_first_step(self):
        trace = ic.bootstrap_recursion(3, 10, F(3, 2))
        assert trace.steps[0] == (F(13, 3), F(13, 2))
        assert trace.fixed_point == 3
        assert abs(trace.steps[-1][1] - 3) < F(1, 2 ** 20)

    def test_max_steps_caps_length(self):
        assert len(ic.bootstrap_recursion(3, 10, F(3, 2), max_steps=3).steps) == 3

    @pytest.mark.parametrize("N, p0, p1, inequality", [
        (1, 10, F(3, 2), "N ≥ 2"),
        (3, 10, 3, "1 < p_1 < N"),
        (3, 2, F(3, 2), "1/p_1 > 1/p_0 + 1/N"),
    ])
    def test_preconditions(self, N, p0, p1, inequality):
        with pytest.raises(PreconditionError) as exc:
            ic.bootstrap_recursion(N, p0, p1)
        assert exc.value.inequality == inequality


@pytest.mark.unit
class TestSchrodinger:
    @pytest.mark.parametrize("s, p, expected", [
        (F(3, 2), F(3, 2), F(5, 4)),
        (2, F(3, 2), F(2)),
        (F(1, 2), 2, F(1, 2)),
    ])
    def test_beta(self, s, p, expected):
        assert ic.beta_s(s, p) == expected

    def test_beta_needs_p_in_range(self):
        with pytest.raises(PreconditionError):
            ic.beta_s(F(1, 2), 3)

    @pytest.mark.parametrize("N, a, s0, strict, citation", [
        (1, 2, F(1, 4), False, "Carleson; Dahlberg-Kenig (sharp)"),
        (1, 3, F(1, 4), False, "Sjolin (a > 1)"),
        (2, 2, F(1, 3), True, "Du-Guth-Li"),
        (3, 2, F(3, 8), True, "Du-Zhang"),
        (3, 3, F(1, 2), True, "Sjolin"),
    ])
    def test_known_thresholds(self, N, a, s0, strict, citation):
        threshold = ic.known_hs_threshold(N, a)
        assert (threshold.s0, threshold.strict, threshold.citation) == (s0, strict, citation)

    @pytest.mark.parametrize("N, s, pvec, a, kind", [
        (1, F(1, 4), (4, 2), 2, SchrodingerVerdictKind.CONVERGES_STANDARD),
        (1, 1, (4, 2), 2, SchrodingerVerdictKind.CONVERGES_PRINCIPAL_VALUE),
        (1, F(1, 2), (4, F(3, 2)), 2, SchrodingerVerdictKind.UNKNOWN),
        (1, F(1, 8), (4, 2), 2, SchrodingerVerdictKind.UNKNOWN),
        (2, F(1, 3), (4, 2), 2, SchrodingerVerdictKind.UNKNOWN),
    ])
    def test_criterion(self, N, s, pvec, a, kind):
        assert ic.schrodinger_criterion(N, s, pvec, a).kind is kind

    def test_non_quadratic_dispersion_needs_p_two(self):
        with pytest.raises(PreconditionError) as exc:
            ic.schrodinger_criterion(1, F(1, 2), (4, F(3, 2)), 3)
        assert exc.value.inequality == "a = 2"

    def test_fourier_local_integrability(self):
        assert ic.fourier_local_integrability(1, F(1, 2), (4, F(3, 2)))
        assert not ic.fourier_local_integrability(1, 1, (2, 2))


@pytest.mark.unit
class TestExampleFamily:
    @pytest.mark.parametrize("N, s, p0, p1, delta, expected", [
        (2, F(1, 2), 4, 2, F(4, 5), Membership.MEMBER),
        (2, F(1, 2), 10, 2, F(1, 2), Membership.NOT_MEMBER),
        (1, F(1, 2), 2, 2, 1, Membership.PRECONDITION_FAIL),
    ])
    def test_membership(self, N, s, p0, p1, delta, expected):
        assert ic.example_membership(N, s, p0, p1, delta) is expected

    def test_separation_window(self):
        window = ic.separation_window(2, 1, F(1, 4), 8, 2)
        assert window == RationalInterval(F(1, 4), F(3, 4), False, False)
        assert str(window) == "(1/4,3/4)"

    def test_empty_separation_window(self):
        assert ic.separation_window(1, 1, F(1, 2), 4, 2) is None

    def test_separation_needs_ordered_exponents(self):
        with pytest.raises(PreconditionError):
            ic.separation_window(2, 1, F(1, 4), 2, 8)

    @pytest.mark.parametrize("delta, expected", [(F(3, 4), True), (F(1, 2), False)])
    def test_hs_gap(self, delta, expected):
        assert ic.hs_gap_condition(2, F(1, 2), 8, delta) is expected

    def test_bubble_integrability(self):
        result = ic.bubble_integrability(4, 2, 3)
        assert result.p0_threshold == 2
        assert not result.in_w1p
        assert result.in_w1_p0p
        assert ic.bubble_integrability(9, 2, 2).in_w1p


@pytest.mark.unit
class TestHeatParams:
    def test_integer_smoothness(self):
        params = ic.heat_estimate_params(1, 1, (F(3, 2), F(3, 2)))
        assert params.p_s == F(3, 2)
        assert params.sigma == F(5, 6)
        assert params.varrho == F(5, 12)
        assert params.q_upper == F(24, 29)
        assert params.weighted_applicable

    def test_fractional_smoothness_replaces_top_exponent(self):
        params = ic.heat_estimate_params(1, F(1, 2), (4, 2))
        assert params.p_s == 2
        assert params.sigma == F(5, 8)
        assert params.varrho == 0
        assert params.q_upper == 1
        assert str(params.r_vec) == "(4, 2)"
        assert not params.weighted_applicable

    def test_length_mismatch(self):
        with pytest.raises(PreconditionError):
            ic.heat_estimate_params(1, F(1, 2), (2,))
