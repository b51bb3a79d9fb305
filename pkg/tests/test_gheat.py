import math

import numpy as np
import pytest

from gnormal import (
    GFunction1D,
    Grid,
    ValidationError,
    default_grid,
    dp_oracle,
    g_apply,
    gexpect,
    solve_gheat,
)
from gnormal.distribution import canonical_family

from conftest import gauss_expect


class TestGFunction:
    def test_band_validation(self):
        with pytest.raises(ValidationError):
            GFunction1D(1.0, 0.5)
        with pytest.raises(ValidationError):
            GFunction1D(-0.1, 1.0)
        with pytest.raises(ValidationError):
            GFunction1D(0.0, 0.0)

    def test_apply_positive_part(self, band):
        assert g_apply(band, 2.0) == 1.0

    def test_apply_negative_part(self, band):
        assert g_apply(band, -2.0) == -0.25

    def test_apply_zero(self, band):
        assert g_apply(band, 0.0) == 0.0

    def test_apply_sublinear_in_argument(self, band):
        for a, b in [(1.0, -2.0), (3.0, 0.5), (-1.0, -1.5)]:
            assert g_apply(band, a + b) <= g_apply(band, a) + g_apply(band, b) + 1e-15


class TestGridValidation:
    def test_must_straddle_zero(self):
        with pytest.raises(ValidationError):
            Grid(1.0, 2.0)

    def test_odd_points(self):
        with pytest.raises(ValidationError):
            Grid(-1.0, 1.0, n_points=400)

    def test_cfl_range(self):
        with pytest.raises(ValidationError):
            Grid(-1.0, 1.0, cfl_fraction=0.6)

    def test_default_grid_spans_eight_sigmas(self):
        g = default_grid(2.0, t_final=4.0)
        assert g.x_max == pytest.approx(8.0 * 2.0 * 2.0)
        assert g.n_points == 401


class TestSolveGheat:
    def test_linear_data_is_stationary(self, band, grid):
        u = solve_gheat(band, lambda x: x, grid)
        assert np.allclose(u.values, grid.xs, atol=1e-12)

    def test_convex_quadratic_uses_upper_volatility(self, band, grid):
        # exact solution u = x^2 + sigma_bar^2 t since x^2 stays convex
        u = solve_gheat(band, lambda x: x * x, grid)
        assert u.at_zero() == pytest.approx(1.0, abs=1e-3)

    def test_concave_quadratic_uses_lower_volatility(self, band, grid):
        u = solve_gheat(band, lambda x: -x * x, grid)
        assert u.at_zero() == pytest.approx(-0.25, abs=1e-3)

    def test_constant_shift_commutes(self, band, grid):
        phi = lambda x: math.tanh(x) ** 2
        base = solve_gheat(band, phi, grid).values
        shifted = solve_gheat(band, lambda x: phi(x) + 3.25, grid).values
        assert np.allclose(shifted, base + 3.25, atol=1e-12)

    def test_monotone_in_initial_data(self, band, grid):
        lo = solve_gheat(band, math.tanh, grid).values
        hi = solve_gheat(band, lambda x: math.tanh(x) + 0.3 * (1 + math.cos(x)), grid)
        assert np.all(lo <= hi.values + 1e-12)

    def test_positive_homogeneity(self, band, grid):
        phi = lambda x: abs(x) - 0.2 * x
        base = solve_gheat(band, phi, grid).values
        scaled = solve_gheat(band, lambda x: 2.5 * phi(x), grid).values
        assert np.allclose(scaled, 2.5 * base, rtol=1e-10, atol=1e-10)

    def test_even_data_gives_even_solution(self, band, grid):
        u = solve_gheat(band, lambda x: math.cos(x), grid).values
        assert np.allclose(u, u[::-1], atol=1e-10)

    def test_rejects_non_finite_initial_data(self, band, grid):
        with pytest.raises(ValidationError):
            solve_gheat(band, lambda x: math.inf if x > 7.9 else 0.0, grid)


class TestGexpect:
    def test_convex_abs_matches_gaussian_upper(self, band, grid):
        want = gauss_expect(abs, 1.0)  # sqrt(2/pi)
        assert gexpect(band, abs, grid) == pytest.approx(want, abs=2e-3)

    def test_concave_neg_abs_matches_gaussian_lower(self, band, grid):
        want = -0.5 * gauss_expect(abs, 1.0)
        assert gexpect(band, lambda x: -abs(x), grid) == pytest.approx(want, abs=2e-3)

    def test_constant(self, band, grid):
        assert gexpect(band, lambda x: 4.5, grid) == pytest.approx(4.5, abs=1e-12)

    def test_classical_limit_matches_quadrature(self):
        g = GFunction1D(1.0, 1.0)
        grid = default_grid(1.0)
        for phi in canonical_family(1.0):
            want = gauss_expect(phi.evaluator, 1.0)
            assert gexpect(g, phi, grid) == pytest.approx(want, abs=1e-3), phi.name

    def test_reflection_symmetry(self, band, grid):
        phi = lambda x: math.tanh(x - 0.7)
        a = gexpect(band, phi, grid)
        b = gexpect(band, lambda x: phi(-x), grid)
        assert a == pytest.approx(b, abs=1e-10)


class TestDpOracle:
    def test_martingale_identity(self, band):
        for n in (1, 7, 100):
            assert dp_oracle(band, lambda x: x, 1.0, n) == pytest.approx(0.0, abs=1e-12)

    def test_convex_quadratic(self, band):
        assert dp_oracle(band, lambda x: x * x, 1.0, 2000) == pytest.approx(1.0, abs=5e-3)

    def test_nonconvex_bump_cross_validates_pde(self, band, grid):
        phi = lambda x: max(0.0, 1.0 - abs(x))
        pde = gexpect(band, phi, grid)
        dp = dp_oracle(band, phi, 1.0, 2000)
        assert dp == pytest.approx(pde, rel=1e-2, abs=1e-2)

    def test_rejects_zero_steps(self, band):
        with pytest.raises(ValidationError):
            dp_oracle(band, abs, 1.0, 0)

    def test_agrees_with_pde_on_canonical_family(self, band, grid):
        for phi in canonical_family(1.0):
            pde = gexpect(band, phi, grid)
            dp = dp_oracle(band, phi.evaluator, 1.0, 2000)
            tol = 1e-2 if abs(pde) < 1.0 else 1e-2 * abs(pde)
            assert abs(dp - pde) <= tol, (phi.name, pde, dp)
