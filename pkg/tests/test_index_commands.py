"""Диспетчер операций исчисления: разбор аргументов и рендер"""
import pytest

from nonuniform_sobolev.exceptions import ConfigError, PreconditionError
from nonuniform_sobolev.schemas.indices import INDEX_OPERATIONS, IndexRequest
from nonuniform_sobolev.services.index_commands import _OPERATIONS, run_index_operation


def run(operation: str, **kwargs):
    return run_index_operation(operation, IndexRequest(**kwargs))


@pytest.mark.unit
class TestDispatch:
    def test_every_operation_has_a_handler(self):
        assert set(_OPERATIONS) == set(INDEX_OPERATIONS)

    def test_unknown_operation(self):
        with pytest.raises(ConfigError) as exc:
            run("volume")
        assert exc.value.field == "indices.operation"

    def test_missing_argument(self):
        with pytest.raises(ConfigError) as exc:
            run("embed", N=3, p="2,2")
        assert exc.value.field == "indices.k"

    def test_pair_length(self):
        with pytest.raises(ConfigError) as exc:
            run("first-order-range", N=3, p="2,2,2")
        assert exc.value.field == "indices.p"

    def test_infinite_entry_reaches_precondition(self):
        with pytest.raises(PreconditionError):
            run("embed", N=1, k=1, p=["inf", "2"])

    def test_numbers_accepted_as_text(self):
        assert run("beta", s=1.5, p=1.5).text == "5/4 (≈1.25)"


@pytest.mark.unit
class TestRenderedText:
    @pytest.mark.parametrize("operation, kwargs, text", [
        ("conjugate", dict(N=4, p="2"), "4"),
        ("conjugate", dict(N=5, p="2"), "10/3 (≈3.33333)"),
        ("beta", dict(s="3/2", p="3/2"), "5/4 (≈1.25)"),
        ("embed", dict(N=3, k=1, p="2,2"), "subcritical q∈[2,6]"),
        ("embed", dict(N=2, k=1, p="4,2"), "critical q∈[4,inf)"),
        ("embed-frac", dict(N=2, s="1/2", p="2,2"), "subcritical q∈[2,4]"),
        ("density", dict(N=2, k=1, p="6,1"), "special hypothesis fails; dense=true"),
        ("density-frac", dict(N=1, s="1/4", p="10,2"), "criterion fails"),
        ("schrodinger-criterion", dict(N=1, s="1", p="4,2", a="2"), "ConvergesPrincipalValue"),
        ("membership", dict(N=2, s="1/2", p="4,2", delta="4/5"), "Member"),
        ("regularized-exponents", dict(N=3, k=1, p="10,2"), "(6, 2)"),
        ("chain", dict(N=6, k=2, p="20,5,2"), "(6, 3, 2)"),
        ("holder-corollary", dict(N=1, k=1, p="2,2"), "C_b^{0,1/2}"),
        ("holder-corollary", dict(N=3, k=1, p="2,2"), "none"),
        ("first-order-range", dict(N=3, p="2,2"), "q∈[2,6]"),
        ("separation-window", dict(N=2, s="1", s_tilde="1/4", p="8,2"), "δ∈(1/4,3/4)"),
        ("separation-window", dict(N=1, s="1", s_tilde="1/2", p="4,2"), "empty"),
        ("hs-gap", dict(N=2, s="1/2", p="8", delta="3/4"), "true"),
        ("hs-threshold", dict(N=1, a="2"), "s ≥ 1/4 (Carleson; Dahlberg-Kenig (sharp))"),
        ("hs-threshold", dict(N=2, a="2"), "s > 1/3 (Du-Guth-Li)"),
        ("fourier-integrability", dict(N=1, s="1/2", p="4,3/2"), "true"),
        ("bubble-integrability", dict(N=4, p="2,3"), "W^1,p: false; W_1^(p0,p): true"),
    ])
    def test_text(self, operation, kwargs, text):
        assert run(operation, **kwargs).text == text


@pytest.mark.unit
class TestStructuredValues:
    def test_embedding_value_and_trace(self):
        result = run("embed", N=3, k=1, p="2,2")
        assert result.value["case"] == "subcritical"
        assert result.value["lq_range"] == {
            "lower": "2", "upper": "6", "lower_closed": True, "upper_closed": True, "text": "[2,6]",
        }
        assert result.trace[0].criterion == "k·p_k = 2 < N = 3"
        assert result.trace[0].holds

    def test_recursion_steps(self):
        result = run("recursion", N=3, p="10,3/2")
        assert result.value["fixed_point"] == "3"
        assert result.value["steps"][0] == {"r": "13/3", "q": "13/2", "q_decimal": 6.5}
        assert result.text.startswith("q̃ = 3 after ")

    def test_heat_params(self):
        value = run("heat-params", N=1, s="1/2", p="4,2").value
        assert value == {
            "p_s": "2",
            "sigma": "5/8",
            "varrho": "0",
            "r_vec": "(4, 2)",
            "weighted_applicable": False,
            "q_upper": "1",
        }

    def test_schrodinger_threshold(self):
        value = run("schrodinger-criterion", N=1, s="1/4", p="4,2", a="2").value
        assert value["kind"] == "ConvergesStandard"
        assert value["threshold"] == {"s0": "1/4", "strict": False, "citation": "Carleson; Dahlberg-Kenig (sharp)"}

    def test_bubble_threshold(self):
        assert run("bubble-integrability", N=4, p="2,3").value["p0_threshold"] == "2"
