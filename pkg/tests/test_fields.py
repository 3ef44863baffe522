"""Сетки, аналитические семейства, спектральные операции"""
import math

import numpy as np
import pytest

from nonuniform_sobolev.exceptions import DomainError, PreconditionError, UnsupportedDerivativeError
from nonuniform_sobolev.services.fields import (
    FourierBump,
    Gaussian,
    GridSpec,
    MultiIndex,
    PLaplaceBubble,
    RationalDecay,
    SampledField,
    SmoothBump,
    default_grid,
    evaluate,
    evaluate_spectral,
    fourier,
    inverse_fourier,
    mollify,
    partial_derivative,
    plaplace_residual,
    sample,
    truncate,
)


@pytest.mark.unit
class TestGridSpec:
    @pytest.mark.parametrize("N, L, n, inequality", [
        (4, 16.0, 64, "N ∈ {1,2,3}"),
        (1, 0.0, 64, "L > 0"),
        (1, 16.0, 100, "n = 2^m ≥ 8"),
        (1, 16.0, 4, "n = 2^m ≥ 8"),
    ])
    def test_rejects_invalid(self, N, L, n, inequality):
        with pytest.raises(PreconditionError) as exc:
            GridSpec(N, L, n)
        assert exc.value.inequality == inequality

    def test_axis_is_half_open(self):
        grid = GridSpec(1, 4.0, 8)
        assert grid.h == 1.0
        np.testing.assert_allclose(grid.axis(), np.arange(-4.0, 4.0))

    def test_points_shape(self):
        assert GridSpec(2, 4.0, 8).points().shape == (8, 8, 2)

    @pytest.mark.parametrize("N, L, n", [(1, 16.0, 1024), (2, 16.0, 128), (3, 12.0, 64)])
    def test_default_grids(self, N, L, n):
        assert default_grid(N) == GridSpec(N, L, n)


@pytest.mark.unit
class TestMultiIndex:
    def test_of_order(self):
        assert [str(a) for a in MultiIndex.of_order(2, 1)] == ["(0,1)", "(1,0)"]
        assert len(MultiIndex.of_order(3, 2)) == 6

    def test_negative_rejected(self):
        with pytest.raises(PreconditionError):
            MultiIndex((1, -1))


@pytest.mark.unit
class TestAnalyticFamilies:
    def test_gaussian_value_and_derivatives(self, gaussian1):
        assert evaluate(gaussian1, [0.0]).real == pytest.approx(1.0)
        first = gaussian1.derivative(MultiIndex((1,)))
        second = gaussian1.derivative(MultiIndex((2,)))
        assert evaluate(first, [1.0]).real == pytest.approx(-2.0 * math.exp(-1.0), rel=1e-12)
        assert evaluate(second, [1.0]).real == pytest.approx(2.0 * math.exp(-1.0), rel=1e-12)

    def test_mixed_derivative_in_two_dimensions(self):
        f = Gaussian.create(N=2)
        mixed = f.derivative(MultiIndex((1, 1)))
        assert evaluate(mixed, [1.0, 1.0]).real == pytest.approx(4.0 * math.exp(-2.0), rel=1e-12)

    def test_derivative_order_limit(self, gaussian1):
        with pytest.raises(UnsupportedDerivativeError):
            gaussian1.derivative(MultiIndex((5,)))

    def test_dilation(self, gaussian1):
        assert evaluate(gaussian1.dilate(2.0), [2.0]).real == pytest.approx(math.exp(-1.0))

    def test_center_and_amplitude(self):
        f = Gaussian.create(N=1, center=(1.0,), amplitude=3.0)
        assert evaluate(f, [1.0]).real == pytest.approx(3.0)

    def test_rational_decay(self):
        f = RationalDecay(N=1, delta=2.0)
        assert evaluate(f, [1.0]).real == pytest.approx(0.5)

    def test_bubble_at_origin(self):
        bubble = PLaplaceBubble(N=4, p=2.0, lam=1.0)
        assert evaluate(bubble, [0.0] * 4).real == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)
        assert bubble.critical_exponent == pytest.approx(4.0)

    def test_bubble_needs_p_below_dimension(self):
        with pytest.raises(PreconditionError):
            PLaplaceBubble(N=2, p=2.0)

    def test_bubble_solves_equation(self):
        bubble = PLaplaceBubble(N=3, p=2.0)
        assert plaplace_residual(bubble, [0.5, 0.0, 0.0], 1e-2) < 1e-5

    def test_residual_stencil_inside_domain(self):
        bubble = PLaplaceBubble(N=3, p=2.0)
        with pytest.raises(DomainError):
            plaplace_residual(bubble, [0.99, 0.0, 0.0], 1e-2, domain_half_width=1.0)

    @pytest.mark.parametrize("x, expected", [(0.0, 1.0), (0.4, 1.0), (1.2, 0.0)])
    def test_smooth_bump(self, x, expected):
        assert evaluate(SmoothBump.create(N=1, radius=1.0), [x]).real == pytest.approx(expected)

    def test_truncation(self, gaussian1):
        truncated = truncate(gaussian1, 2.0)
        assert evaluate(truncated, [1.0]).real == pytest.approx(math.exp(-1.0))
        assert evaluate(truncated, [9.0]).real == 0.0

    def test_field_arithmetic(self, gaussian1):
        combined = 2.0 * gaussian1 + gaussian1
        assert evaluate(combined, [0.0]).real == pytest.approx(3.0)

    @pytest.mark.parametrize("f", [
        Gaussian.create(N=2, sigma=1.3, center=(0.2, -0.4)),
        RationalDecay(N=2, delta=1.5),
        truncate(Gaussian.create(N=2), 1.0),
        Gaussian.create(N=2) + 0.5 * RationalDecay(N=2, delta=3.0),
    ])
    def test_derivatives_compose(self, f):
        pts = np.random.default_rng(3).uniform(-2.5, 2.5, (40, 2))
        composed = partial_derivative(partial_derivative(f, (1, 0)), (0, 2))
        direct = partial_derivative(f, (1, 2))
        np.testing.assert_allclose(composed.evaluate(pts), direct.evaluate(pts), rtol=1e-10, atol=1e-12)

    def test_truncation_commutes_with_dilation(self):
        f = Gaussian.create(N=1, sigma=2.0, center=(0.3,))
        lam, n = 2.5, 1.5
        xs = np.linspace(-12.0, 12.0, 481)[:, None]
        dilated_first = truncate(f.dilate(lam), lam * n).evaluate(xs)
        np.testing.assert_allclose(dilated_first, truncate(f, n).dilate(lam).evaluate(xs), rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(dilated_first, truncate(f, n).evaluate(xs / lam), rtol=1e-12, atol=1e-15)


@pytest.mark.unit
class TestSampledField:
    def test_nodes_reproduced(self, small_grid1, gaussian1):
        sampled = sample(gaussian1, small_grid1)
        assert evaluate(sampled, [0.0]).real == pytest.approx(1.0)

    def test_outside_domain(self, small_grid1, gaussian1):
        sampled = sample(gaussian1, small_grid1)
        with pytest.raises(DomainError):
            evaluate(sampled, [16.0])

    def test_shape_mismatch(self, small_grid1):
        with pytest.raises(PreconditionError):
            SampledField(small_grid1, np.zeros(10))

    def test_non_finite_values(self, small_grid1):
        values = np.zeros(small_grid1.shape)
        values[3] = np.nan
        with pytest.raises(PreconditionError):
            SampledField(small_grid1, values)

    def test_dimension_mismatch(self, gaussian1):
        with pytest.raises(PreconditionError):
            sample(gaussian1, GridSpec(2, 4.0, 8))


@pytest.mark.unit
class TestSpectral:
    def test_fourier_at_zero_frequency(self, grid1, gaussian1):
        spectrum = fourier(gaussian1, grid1)
        assert spectrum.values[grid1.n // 2].real == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_fourier_matches_closed_form(self, grid1, gaussian1):
        spectrum = fourier(gaussian1, grid1)
        omega = grid1.dual_axis()
        expected = math.sqrt(math.pi) * np.exp(-omega ** 2 / 4.0)
        np.testing.assert_allclose(spectrum.values, expected, atol=1e-12)

    def test_inverse_restores_samples(self, small_grid1, gaussian1):
        restored = inverse_fourier(fourier(gaussian1, small_grid1))
        np.testing.assert_allclose(restored.values, sample(gaussian1, small_grid1).values, atol=1e-12)

    def test_spectral_interpolation_between_nodes(self, grid1, gaussian1):
        spectrum = fourier(gaussian1, grid1)
        value = evaluate_spectral(spectrum, np.array([[0.3]]))
        assert value[0].real == pytest.approx(math.exp(-0.09), abs=1e-10)

    def test_spectral_derivative_matches_formula(self, small_grid1, gaussian1):
        numeric = partial_derivative(gaussian1, (2,), small_grid1)
        exact = gaussian1.derivative(MultiIndex((2,))).evaluate(small_grid1.points())
        np.testing.assert_allclose(numeric.values.real, exact, atol=1e-9)

    def test_analytic_derivative_without_grid(self, gaussian1):
        assert partial_derivative(gaussian1, (1,)).is_analytic

    def test_fourier_bump_multiplier(self):
        bump = FourierBump(scale=1.0)
        np.testing.assert_allclose(bump.multiplier(np.array([0.5, 1.0, 2.0, 3.0])), [1.0, 1.0, 0.0, 0.0])

    @pytest.mark.parametrize("f", [
        Gaussian.create(N=1),
        SmoothBump.create(N=1, radius=3.0),
        RationalDecay(N=1, delta=2.0),
    ])
    def test_even_field_has_real_spectrum(self, grid1, f):
        spectrum = fourier(f, grid1)
        assert np.max(np.abs(spectrum.values.imag)) < 1e-12


@pytest.mark.unit
class TestMollify:
    def test_preserves_mass(self, small_grid1, gaussian1):
        smoothed = mollify(gaussian1, 0.5, small_grid1)
        h = small_grid1.h
        original = sample(gaussian1, small_grid1)
        assert h * smoothed.values.real.sum() == pytest.approx(h * original.values.real.sum(), rel=1e-10)

    def test_converges_as_radius_shrinks(self, small_grid1, gaussian1):
        original = sample(gaussian1, small_grid1).values
        errors = [np.abs(mollify(gaussian1, lam, small_grid1).values - original).max() for lam in (1.0, 0.5)]
        assert errors[1] < errors[0]

    def test_radius_below_spacing(self, small_grid1, gaussian1):
        with pytest.raises(DomainError):
            mollify(gaussian1, small_grid1.h / 2, small_grid1)
