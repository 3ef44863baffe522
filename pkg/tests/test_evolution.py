"""Пропагаторы и эксперименты над ними"""
import math
from fractions import Fraction as F

import numpy as np
import pytest

from nonuniform_sobolev.exceptions import ConfigError, PreconditionError
from nonuniform_sobolev.services.evolution import (
    HeatRunConfig,
    SchrodingerRunConfig,
    convergence_experiment,
    geometric_times,
    heat_closed_form,
    heat_energy_experiment,
    heat_propagate,
    lowhigh_split,
    lp12_identity_check,
    regularized_propagate,
    schrodinger_gaussian_closed_form,
    schrodinger_propagate,
    weighted_time_integral,
    wraparound_mass,
)
from nonuniform_sobolev.services.fields import Gaussian, GridSpec, SmoothBump, partial_derivative, sample
from nonuniform_sobolev.services.norms import lp_norm


@pytest.mark.unit
class TestHeatPropagator:
    @pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
    def test_matches_closed_form(self, grid1, gaussian1, t):
        u = heat_propagate(gaussian1, t, grid1)
        np.testing.assert_allclose(u.values.real, heat_closed_form(t, grid1.points()), atol=1e-12)

    def test_zero_time_returns_data(self, grid1, gaussian1):
        u = heat_propagate(gaussian1, 0.0, grid1)
        np.testing.assert_array_equal(u.values, sample(gaussian1, grid1).values)

    def test_negative_time(self, gaussian1):
        with pytest.raises(PreconditionError):
            heat_propagate(gaussian1, -1.0)

    def test_two_dimensional_closed_form(self):
        grid = GridSpec(2, 16.0, 128)
        u = heat_propagate(Gaussian.create(N=2), 0.25, grid)
        np.testing.assert_allclose(u.values.real, heat_closed_form(0.25, grid.points()), atol=1e-10)

    def test_semigroup(self, grid1, gaussian1):
        twice = heat_propagate(heat_propagate(gaussian1, 0.2, grid1), 0.3)
        np.testing.assert_allclose(twice.values, heat_propagate(gaussian1, 0.5, grid1).values, atol=1e-13)

    def test_commutes_with_derivative(self, grid1, gaussian1):
        t = 0.4
        left = partial_derivative(heat_propagate(gaussian1, t, grid1), (1,))
        right = heat_propagate(partial_derivative(gaussian1, (1,), grid1), t)
        np.testing.assert_allclose(left.values, right.values, atol=1e-12)


@pytest.mark.unit
class TestSchrodingerPropagator:
    def test_gaussian_closed_form_at_origin(self, grid1, gaussian1):
        t = 0.1
        u = schrodinger_propagate(gaussian1, t, 2, grid1)
        value = u.values[grid1.n // 2]
        assert abs(value - schrodinger_gaussian_closed_form(t, 0.0)) < 1e-10

    def test_closed_form_at_zero_time(self):
        value = schrodinger_gaussian_closed_form(0.0, 0.5)
        assert value.real == pytest.approx(math.exp(-0.25))
        assert abs(value.imag) < 1e-15

    def test_unitary(self, grid1, gaussian1):
        mass0 = lp_norm(sample(gaussian1, grid1), 2).value
        for a in (2, F(3, 2)):
            u = schrodinger_propagate(gaussian1, 0.3, a, grid1)
            assert lp_norm(u, 2).value == pytest.approx(mass0, rel=1e-12)

    @pytest.mark.parametrize("a", [2, F(3, 2), 3])
    def test_group_law(self, grid1, gaussian1, a):
        twice = schrodinger_propagate(schrodinger_propagate(gaussian1, 0.15, a, grid1), 0.1, a)
        np.testing.assert_allclose(twice.values, schrodinger_propagate(gaussian1, 0.25, a, grid1).values, atol=1e-12)
        back = schrodinger_propagate(schrodinger_propagate(gaussian1, 0.25, a, grid1), -0.25, a)
        np.testing.assert_allclose(back.values, sample(gaussian1, grid1).values, atol=1e-12)

    def test_dispersion_order(self, gaussian1):
        with pytest.raises(PreconditionError) as exc:
            schrodinger_propagate(gaussian1, 0.1, 1)
        assert exc.value.inequality == "a > 1"

    def test_lowhigh_split_sums_to_data(self, grid1, gaussian1):
        low, high = lowhigh_split(gaussian1, grid1)
        np.testing.assert_allclose((low + high).values, sample(gaussian1, grid1).values, atol=1e-12)

    def test_regularized_cutoff_removes_low_modes(self, grid1, gaussian1):
        u = regularized_propagate(gaussian1, 0.0, 0.5, grid1)
        # нулевая частота подавлена: интеграл обращается в ноль
        assert abs(grid1.h * u.values.sum()) < 1e-12

    def test_regularized_needs_positive_cutoff(self, gaussian1):
        with pytest.raises(PreconditionError):
            regularized_propagate(gaussian1, 0.1, 0.0)

    def test_regularized_cutoff_below_first_frequency(self, grid1, gaussian1):
        # π/L ≈ 0.196 на сетке L = 16: срезка с ε = 0.1 убрала бы только нулевую моду
        with pytest.raises(PreconditionError) as exc:
            regularized_propagate(gaussian1, 0.1, 0.1, grid1)
        assert exc.value.inequality == "ε ≥ π/L"
        assert exc.value.details["dual_spacing"] == pytest.approx(math.pi / 16.0)

    def test_regularized_sweep_approaches_free_evolution(self):
        grid = GridSpec(1, 320.0, 4096)
        u0 = sample(Gaussian.create(N=1), grid)
        free = schrodinger_propagate(u0, 0.25, 2).values
        removed, shapes = [], []
        for eps in (0.08, 0.04, 0.02, 0.01):
            quintic = regularized_propagate(u0, 0.25, eps).values
            smooth = regularized_propagate(u0, 0.25, eps, shape="smooth").values
            removed.append(np.max(np.abs(quintic - free)))
            shapes.append(np.max(np.abs(smooth - quintic)))
        assert all(b < a for a, b in zip(removed, removed[1:]))
        assert removed[-1] < removed[0] / 4
        # формы φ₀ различимы: срезка задевает ненулевые моды
        assert shapes[0] > 1e-9
        assert shapes[-1] < shapes[0] / 4


@pytest.mark.unit
class TestTimeHelpers:
    def test_geometric_times(self):
        times = geometric_times(1e-3, 1.0, 4)
        np.testing.assert_allclose(times, [1e-3, 1e-2, 1e-1, 1.0])
        assert times[-1] == 1.0

    def test_geometric_times_decreasing(self):
        np.testing.assert_allclose(geometric_times(1.0, 0.01, 3), [1.0, 0.1, 0.01])

    @pytest.mark.parametrize("start, end, count", [(1e-3, 1.0, 1), (0.0, 1.0, 4), (1.0, 1.0, 3)])
    def test_geometric_times_invalid(self, start, end, count):
        with pytest.raises(ConfigError) as exc:
            geometric_times(start, end, count)
        assert exc.value.field == "times"

    def test_weighted_integral_of_constant(self):
        assert weighted_time_integral([0.0, 1.0, 2.0], [3.0, 3.0, 3.0], 0.0) == pytest.approx(6.0)

    def test_weighted_integral_linear_weight(self):
        # трапеции точны для ∫_0^1 t dt
        assert weighted_time_integral([0.0, 0.5, 1.0], [1.0, 1.0, 1.0], 1.0) == pytest.approx(0.5)

    def test_negative_weight_drops_origin(self):
        value = weighted_time_integral([0.0, 1.0, 2.0], [1.0, 1.0, 1.0], -0.5)
        assert value == pytest.approx(0.5 * (1.0 + 2.0 ** -0.5))

    def test_wraparound_mass(self, grid1, gaussian1):
        assert wraparound_mass(gaussian1, grid1) < 1e-20
        wide = SmoothBump.create(N=1, radius=20.0)
        assert wraparound_mass(wide, grid1) == pytest.approx(1.0)


@pytest.mark.unit
class TestIdentity:
    def test_quadratic_case(self, gaussian1):
        check = lp12_identity_check(gaussian1, 2)
        # ∫f″f = −∫|f′|² = −(π/2)^{1/2}
        assert check.lhs == pytest.approx(-math.sqrt(math.pi / 2.0), rel=1e-9)
        assert check.residual < 1e-9

    def test_general_exponent(self, gaussian1):
        assert lp12_identity_check(gaussian1, 3).residual < 1e-6

    def test_one_dimensional_only(self):
        with pytest.raises(PreconditionError):
            lp12_identity_check(Gaussian.create(N=2), 2)


@pytest.mark.unit
class TestHeatExperiment:
    def _config(self, grid, **overrides):
        params = dict(
            grid=grid,
            initial=Gaussian.create(N=1),
            s=1,
            pvec=(2, 2),
            times=[0.1, 1.0],
            include_weighted=False,
        )
        params.update(overrides)
        return HeatRunConfig(**params)

    def test_columns_and_monotonicity(self, small_grid1):
        report = heat_energy_experiment(self._config(small_grid1))
        assert report.name == "heat"
        assert report.columns[:5] == ["t", "lp[D^(0)]", "lp[D^(1)]", "norm_Ws", "l2"]
        assert report.column("t") == [0.0, 0.1, 1.0]
        assert report.summary["monotone_all"]
        assert report.summary["l2_nonincreasing"]
        assert report.summary["varrho"] == "0"

    def test_l2_follows_closed_form(self, small_grid1):
        report = heat_energy_experiment(self._config(small_grid1))
        for row in report.rows:
            # ‖u(t)‖₂² = (π/2)^{1/2}(1+4t)^{−1/2}
            expected = (math.pi / 2.0) ** 0.25 * (1.0 + 4.0 * row["t"]) ** -0.25
            assert row["l2"] == pytest.approx(expected, rel=1e-9)

    def test_weighted_integrals(self, small_grid1):
        cfg = self._config(small_grid1, include_weighted=True, T_list=[0.5], q_list=[F(1, 2)])
        report = heat_energy_experiment(cfg)
        assert report.column("t") == [0.0, 0.1, 0.5, 1.0]
        assert "norm_Ws1" in report.columns and "norm_Ws2" in report.columns
        (entry,) = report.summary["integrals"]
        assert entry["T"] == 0.5
        assert entry["weighted_s1"] > 0
        assert "q=1/2" in entry

    def test_q_outside_range(self, small_grid1):
        cfg = self._config(small_grid1, q_list=[F(1)])
        with pytest.raises(ConfigError) as exc:
            heat_energy_experiment(cfg)
        assert exc.value.field == "heat.q_list"

    def test_times_must_increase(self, small_grid1):
        with pytest.raises(ConfigError) as exc:
            self._config(small_grid1, times=[1.0, 0.1])
        assert exc.value.field == "heat.times"


@pytest.mark.unit
class TestSchrodingerExperiment:
    def test_error_shrinks_with_time(self, grid1, gaussian1):
        cfg = SchrodingerRunConfig(
            grid=grid1,
            initial=sample(gaussian1, grid1),
            a=F(2),
            times=[0.1, 0.01, 0.001],
            probes=np.array([0.0, 1.0]),
        )
        report = convergence_experiment(cfg)
        assert report.columns == ["t", "err_f", "err_f1", "err_f2"]
        assert report.summary["t0_error"] == 0.0
        assert report.summary["monotone_trend"]
        assert report.summary["final_error"] < 1e-2
        assert report.summary["max_mass_drift"] < 1e-12

    def test_regularized_columns(self, grid1, gaussian1):
        cfg = SchrodingerRunConfig(
            grid=grid1, initial=gaussian1, a=F(2), times=[0.1], probes=[0.0], epsilon_list=[0.5],
        )
        assert "reg_eps=0.5" in convergence_experiment(cfg).columns

    def test_times_must_decrease(self, grid1, gaussian1):
        with pytest.raises(ConfigError) as exc:
            SchrodingerRunConfig(grid=grid1, initial=gaussian1, a=F(2), times=[0.01, 0.1], probes=[0.0])
        assert exc.value.field == "schrodinger.times"

    def test_regularization_needs_quadratic_dispersion(self, grid1, gaussian1):
        with pytest.raises(ConfigError):
            SchrodingerRunConfig(
                grid=grid1, initial=gaussian1, a=F(3), times=[0.1], probes=[0.0], epsilon_list=[0.5],
            )

    def test_cutoff_below_first_frequency(self, grid1, gaussian1):
        with pytest.raises(ConfigError) as exc:
            SchrodingerRunConfig(
                grid=grid1, initial=gaussian1, a=F(2), times=[0.1], probes=[0.0], epsilon_list=[0.5, 0.1],
            )
        assert exc.value.field == "schrodinger.epsilon_list"
