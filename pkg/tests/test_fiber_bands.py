import numpy as np
import pytest

from landausplit import (
    FiberConfig,
    PeriodicProfile,
    assemble_fiber_matrix,
    band_function,
    band_table,
    f_function,
    feynman_hellmann_slope,
    oscillator_integral_closed,
    spectrum_bands,
    symmetric_eigenvalues,
)
from landausplit.fiber_bands import default_k_grid
from landausplit.specfun import hermite_function

TWO_PI_SQ = 2.0 * np.pi**2


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

class TestAssembly:
    def test_unperturbed_is_diagonal(self, cosine):
        cfg = FiberConfig(B=1.0, lam=0.0, k=0.3, profile=cosine, basis_size=12)
        m = assemble_fiber_matrix(cfg)
        assert np.array_equal(m, np.diag(2.0 * np.arange(1, 13) - 1.0))

    @pytest.mark.parametrize("lam", [0.1, 0.5, 1.0])
    def test_constant_profile_keeps_landau_levels(self, lam):
        # completing the square: (Bt + lam)^2 shifts the oscillator, spectrum unchanged
        const = PeriodicProfile.constant()
        cfg = FiberConfig(B=1.0, lam=lam, k=0.0, profile=const, basis_size=40)
        evals = symmetric_eigenvalues(assemble_fiber_matrix(cfg))
        assert np.allclose(evals[:5], 2.0 * np.arange(1, 6) - 1.0, atol=1e-8)

    def test_entries_match_trapezoid_oracle(self, cosine):
        # independent dense-grid integration of <phi_m, v phi_n>
        B, lam, k, nb = 1.0, 0.1, 0.0, 6
        cfg = FiberConfig(B=B, lam=lam, k=k, profile=cosine, basis_size=nb)
        m = assemble_fiber_matrix(cfg)
        t = np.linspace(-9.0, 9.0, 40001)
        phis = np.stack([hermite_function(j, t, B) for j in range(1, nb + 1)])
        a = cosine(t + k / B)
        v = 2 * B * t * lam * a + lam**2 * a**2
        oracle = np.trapezoid(phis[:, None, :] * phis[None, :, :] * v, t, axis=2)
        oracle[np.diag_indices(nb)] += 2.0 * np.arange(1, nb + 1) - 1.0
        assert np.allclose(m, oracle, atol=1e-8)

    def test_matrix_exactly_symmetric(self, cosine):
        cfg = FiberConfig(B=2.0, lam=0.3, k=0.7, profile=cosine, basis_size=20)
        m = assemble_fiber_matrix(cfg)
        assert np.array_equal(m, m.T)

    def test_invalid_config_rejected(self, cosine):
        with pytest.raises(ValueError):
            FiberConfig(B=0.0, lam=0.1, k=0.0, profile=cosine, basis_size=10)
        with pytest.raises(ValueError):
            FiberConfig(B=1.0, lam=0.1, k=0.0, profile=cosine, basis_size=1)
        with pytest.raises(ValueError):
            FiberConfig(B=1.0, lam=-0.1, k=0.0, profile=cosine, basis_size=10)


class TestSymmetricEigenvalues:
    def test_analytic_2x2(self):
        assert np.allclose(symmetric_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]])), [1.0, 3.0])

    def test_identity(self):
        assert np.allclose(symmetric_eigenvalues(np.eye(5)), np.ones(5))

    def test_trace_identity(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((50, 50))
        m = a + a.T
        evals = symmetric_eigenvalues(m)
        assert np.sum(evals) == pytest.approx(np.trace(m), rel=1e-9)
        assert np.all(np.diff(evals) >= 0)

    def test_rejects_asymmetric(self):
        m = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            symmetric_eigenvalues(m)


# ---------------------------------------------------------------------------
# band functions
# ---------------------------------------------------------------------------

class TestBands:
    @pytest.mark.parametrize("B", [1.0, TWO_PI_SQ])
    def test_unperturbed_bands_are_landau_levels(self, cosine, B):
        table = band_table(5, 0.0, B, cosine, k_samples=256)
        levels = (2.0 * np.arange(1, 6) - 1.0) * B
        assert np.max(np.abs(table.values - levels)) < 1e-8 * B

    def test_first_order_perturbation(self, cosine):
        B, lam = TWO_PI_SQ, 0.01
        e1 = band_function(1, lam, np.array([B / 4]), B, cosine)[0]
        predicted = B - lam * 2 * B * oscillator_integral_closed(1, 2 * np.pi, B)
        assert predicted == pytest.approx(19.7011, abs=5e-4)
        assert abs(e1 - predicted) <= 5 * lam**2 * B

    @pytest.mark.parametrize("lam", [0.1, 0.5, 1.0])
    def test_constant_profile_null_width(self, lam):
        const = PeriodicProfile.constant()
        table = band_table(3, lam, 1.0, const, k_samples=128)
        for j in (1, 2, 3):
            lo, hi = table.band_interval(j)
            assert hi - lo < 1e-8

    def test_k_periodicity(self, cosine):
        B, lam = 1.0, 0.05
        ks = default_k_grid(B, 32)
        t1 = band_table(3, lam, B, cosine, k_grid=ks)
        t2 = band_table(3, lam, B, cosine, k_grid=ks + B)
        assert np.max(np.abs(t1.values - t2.values)) < 1e-8 * B

    def test_band_ordering(self, cosine):
        table = band_table(4, 0.05, TWO_PI_SQ, cosine, k_samples=64)
        assert np.all(np.diff(table.values, axis=1) > 0)

    def test_truncation_monotone_convergence(self, cosine):
        # error shrinks by >= 10x per basis doubling, and Rayleigh-Ritz from above
        B, lam, J = 1.0, 0.2, 3
        ks = default_k_grid(B, 8)
        sizes = [J + 30, 2 * (J + 30), 4 * (J + 30)]
        from landausplit.fiber_bands import _default_nodes
        from landausplit.specfun import gauss_hermite, oscillator_ladder

        def sweep(nn):
            rule = gauss_hermite(_default_nodes(nn, B, cosine))
            u = rule.nodes
            chi = oscillator_ladder(nn, u, weightless=True)
            out = np.empty((len(ks), J))
            for i, k in enumerate(ks):
                a = cosine(u / np.sqrt(B) + k / B)
                g = 2 * lam * np.sqrt(B) * u * a + lam**2 * a**2
                m = (chi * (rule.weights * g)) @ chi.T
                m = np.triu(m) + np.triu(m, 1).T
                m[np.diag_indices(nn)] += 2.0 * np.arange(1, nn + 1) - 1.0
                out[i] = np.linalg.eigvalsh(m)[:J]
            return out

        e = [sweep(n) for n in sizes]
        d1 = np.max(np.abs(e[0] - e[1]))
        d2 = np.max(np.abs(e[1] - e[2]))
        assert d2 <= d1 / 10.0
        # variational: larger basis never raises an eigenvalue (up to quadrature noise)
        assert np.all(e[1] <= e[0] + 1e-10)
        assert np.all(e[2] <= e[1] + 1e-10)

    def test_convergence_failure_raises(self, cosine):
        from landausplit.errors import ConvergenceError

        with pytest.raises(ConvergenceError):
            band_table(1, 0.3, 1.0, cosine, k_samples=4, tol=1e-16, max_doublings=1)


# ---------------------------------------------------------------------------
# spectrum bands
# ---------------------------------------------------------------------------

class TestSpectrumBands:
    def test_unperturbed_degenerate_intervals(self, cosine):
        bands = spectrum_bands(3, 0.0, 1.0, cosine, k_samples=128)
        for j, (lo, hi) in enumerate(bands.intervals, start=1):
            assert hi - lo < 1e-10
            assert lo == pytest.approx(2 * j - 1, abs=1e-10)
        assert bands.disjoint
        assert not bands.crossings_flagged

    def test_first_band_contains_first_order_interval(self, cosine):
        B, lam = TWO_PI_SQ, 0.01
        kappa = 2 * B * oscillator_integral_closed(1, 2 * np.pi, B)
        assert kappa == pytest.approx(3.811, abs=2e-3)
        bands = spectrum_bands(1, lam, B, cosine, k_samples=256)
        lo, hi = bands.intervals[0]
        slack = 5 * lam**2 * B
        assert lo <= B - kappa * lam + slack
        assert hi >= B + kappa * lam - slack
        assert (hi - lo) == pytest.approx(2 * kappa * lam, rel=0.05)

    def test_three_disjoint_bands(self, cosine):
        bands = spectrum_bands(3, 0.01, TWO_PI_SQ, cosine, k_samples=128)
        assert bands.disjoint
        for lo, hi in bands.gaps:
            assert hi > lo

    def test_insufficient_k_sampling_rejected(self, cosine):
        with pytest.raises(ValueError):
            spectrum_bands(2, 0.01, 1.0, cosine, k_samples=64)

    def test_first_order_width_law(self, cosine):
        # (max E - min E)/lam approaches 2B (max F - min F) as lam -> 0
        B, lam = TWO_PI_SQ, 1e-3
        bands = spectrum_bands(2, lam, B, cosine, k_samples=256)
        ks = default_k_grid(B, 256)
        for j in (1, 2):
            lo, hi = bands.intervals[j - 1]
            f = f_function(j, ks, B, cosine)
            first_order = 2 * B * (f.max() - f.min())
            assert (hi - lo) / lam == pytest.approx(first_order, rel=0.05)


# ---------------------------------------------------------------------------
# Feynman-Hellmann
# ---------------------------------------------------------------------------

class TestFeynmanHellmann:
    def test_constant_profile_slope_vanishes(self):
        const = PeriodicProfile.constant()
        for j in (1, 2, 4):
            for k in (0.0, 0.31):
                assert abs(feynman_hellmann_slope(j, k, 1.0, const)) < 1e-12

    def test_cosine_reference_value(self, cosine):
        B = TWO_PI_SQ
        slope = feynman_hellmann_slope(1, B / 4, B, cosine)
        assert slope == pytest.approx(-2 * B * oscillator_integral_closed(1, 2 * np.pi, B), rel=1e-12)
        assert slope == pytest.approx(-3.811, abs=2e-3)

    def test_matches_series_form(self, cosine):
        B = TWO_PI_SQ
        for j in (1, 2, 3, 4):
            for k in np.linspace(0, B, 7):
                series = 2 * B * f_function(j, k, B, cosine)
                assert feynman_hellmann_slope(j, k, B, cosine) == pytest.approx(series, abs=1e-9)

    def test_sign_witnesses_at_quarter_period(self, cosine):
        B = TWO_PI_SQ
        assert feynman_hellmann_slope(1, B / 4, B, cosine) < 0
        assert feynman_hellmann_slope(1, 3 * B / 4, B, cosine) > 0

    def test_matches_finite_difference(self, cosine):
        # two-sided difference kills the quadratic coupling term
        B, delta = TWO_PI_SQ, 1e-4
        ks = (np.arange(4) + 0.5) * B / 4
        for j in (1, 2):
            for k in ks:
                kk = np.array([k])
                ep = band_table(j, delta, B, cosine, k_grid=kk).band(j)[0]
                em = band_table(j, -delta, B, cosine, k_grid=kk).band(j)[0]
                fd = (ep - em) / (2 * delta)
                assert fd == pytest.approx(feynman_hellmann_slope(j, k, B, cosine), rel=1e-3)
