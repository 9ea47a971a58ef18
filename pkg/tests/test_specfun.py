import math

import numpy as np
import pytest

from landausplit.specfun import (
    gauss_hermite,
    hermite_function,
    hermite_poly,
    laguerre,
    laguerre_prime,
    oscillator_integral_closed,
    oscillator_integral_quadrature,
    splitting_poly_roots,
    splitting_polynomial,
)

TWO_PI_SQ = 2.0 * np.pi**2


class TestHermite:
    def test_low_orders(self):
        assert hermite_poly(0, 1.7) == 1.0
        assert hermite_poly(1, 3.0) == 6.0
        # recurrence: H_2(t) = 4t^2 - 2
        assert hermite_poly(2, 1.0) == pytest.approx(2.0, abs=0)

    def test_vectorized(self):
        t = np.linspace(-2, 2, 7)
        assert np.allclose(hermite_poly(3, t), 8 * t**3 - 12 * t)

    def test_rejects_negative_degree(self):
        with pytest.raises(ValueError):
            hermite_poly(-1, 0.0)

    def test_ground_state_value(self):
        assert hermite_function(1, 0.0, 1.0) == pytest.approx(np.pi**-0.25, rel=1e-14)

    def test_odd_state_vanishes_at_origin(self):
        for B in (0.5, 1.0, TWO_PI_SQ):
            assert hermite_function(2, 0.0, B) == 0.0

    @pytest.mark.parametrize("j", [1, 2, 5, 13, 50])
    @pytest.mark.parametrize("B", [1.0, 4.0])
    def test_normalization(self, j, B):
        # integral phi_j^2 dt = (1/sqrt(B)) * sum w chi^2 at u nodes
        rule = gauss_hermite(max(64, j + 8))
        from landausplit.specfun import oscillator_ladder

        chi = oscillator_ladder(j, rule.nodes, weightless=True)[j - 1]
        assert rule.integrate(chi * chi) == pytest.approx(1.0, abs=1e-10)

    def test_high_order_no_overflow(self):
        rule = gauss_hermite(256)
        from landausplit.specfun import oscillator_ladder

        chi = oscillator_ladder(200, rule.nodes, weightless=True)[199]
        assert np.all(np.isfinite(chi))
        assert rule.integrate(chi * chi) == pytest.approx(1.0, abs=1e-9)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            hermite_function(0, 0.0, 1.0)
        with pytest.raises(ValueError):
            hermite_function(1, 0.0, -2.0)


class TestQuadrature:
    @pytest.mark.parametrize("n", [5, 20, 64])
    def test_structure(self, n):
        rule = gauss_hermite(n)
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.all(rule.weights > 0)
        assert np.allclose(rule.nodes + rule.nodes[::-1], 0.0, atol=1e-13)

    @pytest.mark.parametrize("n", [5, 20])
    def test_monomial_exactness(self, n):
        # integral t^(2m) e^{-t^2} dt = Gamma(m + 1/2), exact up to degree 2n-1
        rule = gauss_hermite(n)
        for m in range(n):
            exact = math.gamma(m + 0.5)
            assert rule.integrate(rule.nodes ** (2 * m)) == pytest.approx(exact, rel=1e-12)
        for m in range(n):  # odd monomials vanish, up to cancellation roundoff
            scale = rule.integrate(np.abs(rule.nodes) ** (2 * m + 1))
            assert abs(rule.integrate(rule.nodes ** (2 * m + 1))) < 1e-13 * scale


class TestLaguerre:
    def test_low_orders(self):
        assert laguerre(0, 5.3) == 1.0
        assert laguerre(1, 2.0) == -1.0
        # L_2(xi) = 1 - 2 xi + xi^2/2
        assert laguerre(2, 2.0) == pytest.approx(-1.0, abs=1e-14)

    def test_derivative_at_zero(self):
        for q in range(8):
            assert laguerre_prime(q, 0.0) == pytest.approx(-q, abs=1e-13)

    @pytest.mark.parametrize("q", [1, 3, 6])
    def test_derivative_vs_finite_difference(self, q):
        xi = np.array([0.05, 0.2, 0.26, 1.0, 7.5])
        d = 1e-6
        fd = (laguerre(q, xi + d) - laguerre(q, xi - d)) / (2 * d)
        assert np.allclose(laguerre_prime(q, xi), fd, rtol=1e-7, atol=1e-8)

    def test_branch_continuity(self):
        # identity branch and coefficient branch agree where they meet
        xi = np.linspace(0.2, 0.3, 11)
        for q in (2, 5):
            vals = laguerre_prime(q, xi)
            direct = q * (laguerre(q, xi) - laguerre(q - 1, xi)) / xi
            assert np.allclose(vals, direct, rtol=1e-12)


class TestSplittingPolynomial:
    def test_first_band_is_half_s(self):
        s = np.linspace(-5, 5, 11)
        assert np.array_equal(splitting_polynomial(1, s), s / 2)

    def test_second_band_value(self):
        assert splitting_polynomial(2, 2.0) == pytest.approx(1.0, abs=1e-14)

    def test_oddness_exact(self):
        s = np.linspace(0.1, 12.0, 40)
        for j in (1, 2, 3, 5, 8):
            assert np.array_equal(splitting_polynomial(j, -s), -splitting_polynomial(j, s))

    def test_root_of_p2(self):
        roots = splitting_poly_roots(2)
        assert roots.shape == (1,)
        assert roots[0] == pytest.approx(np.sqrt(6.0), abs=1e-12)

    def test_roots_of_p3_analytic(self):
        roots = splitting_poly_roots(3)
        expected = np.sqrt(2.0 * (4.0 - np.sqrt(6.0))), np.sqrt(2.0 * (4.0 + np.sqrt(6.0)))
        assert roots == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("j", range(2, 9))
    def test_root_count_bound(self, j):
        roots = splitting_poly_roots(j)
        assert len(roots) <= j - 1
        if j in (2, 3):
            assert len(roots) == j - 1


class TestOscillatorIntegral:
    def test_closed_form_reference_values(self):
        assert oscillator_integral_closed(1, 2.0, 1.0) == pytest.approx(np.exp(-1.0), rel=1e-14)
        val = oscillator_integral_closed(1, 2 * np.pi, TWO_PI_SQ)
        analytic = TWO_PI_SQ**-0.5 * (np.sqrt(2) / 2) * np.exp(-0.5)
        assert val == pytest.approx(analytic, rel=1e-14)
        assert val == pytest.approx(0.09653, abs=1e-5)

    @pytest.mark.parametrize("j", [1, 3, 6])
    @pytest.mark.parametrize("B", [0.5, 1.0, TWO_PI_SQ])
    def test_vanishes_at_zero(self, j, B):
        assert oscillator_integral_closed(j, 0.0, B) == 0.0

    def test_quadrature_gaussian_reference(self):
        # analytic: integral t sin(st) e^{-t^2} dt / sqrt(pi) = (s/2) e^{-s^2/4}
        assert oscillator_integral_quadrature(1, 2.0, 1.0) == pytest.approx(np.exp(-1.0), abs=1e-9)

    def test_quadrature_detects_root_transfer(self):
        assert oscillator_integral_quadrature(2, np.sqrt(6.0), 1.0) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("j", range(1, 7))
    @pytest.mark.parametrize("s", [0.5, 1.0, 2 * np.pi, 10.0])
    @pytest.mark.parametrize("B", [1.0, TWO_PI_SQ])
    def test_closed_vs_quadrature(self, j, s, B):
        closed = oscillator_integral_closed(j, s, B)
        quad = oscillator_integral_quadrature(j, s, B)
        if abs(closed) > 1e-9:
            assert quad == pytest.approx(closed, rel=1e-8)
        else:
            assert abs(quad - closed) < 1e-10

    def test_quadrature_oddness(self):
        for j in (1, 2, 4):
            for s in (0.7, 3.3):
                plus = oscillator_integral_quadrature(j, s, 2.0)
                minus = oscillator_integral_quadrature(j, -s, 2.0)
                assert abs(plus + minus) < 1e-12

    @pytest.mark.parametrize("j", range(1, 7))
    def test_scaling_law(self, j):
        for s in (0.1, 1.0, 4.0, 10.0):
            for B in (0.7, 3.0):
                lhs = oscillator_integral_quadrature(j, s, B)
                rhs = oscillator_integral_quadrature(j, s / np.sqrt(B), 1.0) / np.sqrt(B)
                assert abs(lhs - rhs) < 1e-9

    def test_rejects_bad_field(self):
        with pytest.raises(ValueError):
            oscillator_integral_closed(1, 1.0, 0.0)
        with pytest.raises(ValueError):
            oscillator_integral_quadrature(1, 1.0, -1.0)
