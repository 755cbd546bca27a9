import numpy as np
import pytest

from mvamp.scalar_channel import (DEFAULT_ORDER, gauss_hermite_rule, log_cosh,
                                  scalar_mi, scalar_mmse)

from oracles import mmse_monte_carlo


class TestQuadratureRule:
    def test_one_point(self):
        rule = gauss_hermite_rule(1)
        assert rule.nodes.tolist() == [0.0]
        assert rule.weights.tolist() == [1.0]

    def test_gaussian_moments(self):
        rule = gauss_hermite_rule(10)
        assert abs(rule.expect(lambda z: z ** 4) - 3.0) < 1e-10

    def test_normalization_and_low_moments(self):
        for k in (2, 10, 61, DEFAULT_ORDER):
            rule = gauss_hermite_rule(k)
            assert abs(rule.weights.sum() - 1.0) < 1e-12
            assert abs(rule.expect(lambda z: z)) < 1e-10
            assert abs(rule.expect(lambda z: z ** 2) - 1.0) < 1e-10

    def test_refinement_stability_at_default_order(self):
        # The tanh^2 integrand at snr 5 is the stress case; at the default
        # order another 10 nodes move the value by less than 1e-12.
        f = lambda z: np.tanh(5.0 + np.sqrt(5.0) * z) ** 2
        a = gauss_hermite_rule(DEFAULT_ORDER).expect(f)
        b = gauss_hermite_rule(DEFAULT_ORDER + 10).expect(f)
        assert abs(a - b) < 1e-12

    def test_rejects_zero_order(self):
        with pytest.raises(ValueError):
            gauss_hermite_rule(0)


class TestScalarMmse:
    def test_zero_snr_exact(self):
        assert scalar_mmse(0.0) == 1.0

    def test_high_snr_small(self):
        assert scalar_mmse(25.0) < 1e-4

    def test_monte_carlo_cross_check(self):
        # Second, independent oracle for the same expectation.
        assert abs(scalar_mmse(1.0) - mmse_monte_carlo(1.0)) < 1e-3

    def test_bounds_and_strict_decrease(self):
        grid = np.linspace(0.01, 10.0, 200)
        vals = np.array([scalar_mmse(e) for e in grid])
        assert np.all((vals >= 0.0) & (vals <= 1.0))
        assert np.all(np.diff(vals) < 0.0)

    def test_rejects_negative_snr(self):
        with pytest.raises(ValueError):
            scalar_mmse(-0.1)


class TestScalarMi:
    def test_zero_snr_exact(self):
        assert scalar_mi(0.0) == 0.0

    def test_saturation(self):
        assert abs(scalar_mi(25.0) - np.log(2.0)) < 1e-3

    def test_bounds_and_monotone(self):
        grid = np.linspace(0.0, 30.0, 120)
        vals = np.array([scalar_mi(e) for e in grid])
        assert np.all((vals >= 0.0) & (vals <= np.log(2.0)))
        assert np.all(np.diff(vals) >= -1e-14)

    def test_rejects_negative_snr(self):
        with pytest.raises(ValueError):
            scalar_mi(-1e-9)

    @pytest.mark.parametrize("eta", [0.1, 0.5, 1.0, 2.0, 5.0])
    def test_information_mmse_identity(self, eta):
        # Central finite differences of the information curve must match
        # half the mmse; this ties the two quadratures together and is the
        # strongest correctness check this module has.
        h = 1e-5
        fd = (scalar_mi(eta + h) - scalar_mi(eta - h)) / (2 * h)
        assert abs(fd - scalar_mmse(eta) / 2.0) < 1e-6


def test_log_cosh_overflow_safe():
    assert np.isfinite(log_cosh(800.0))
    assert abs(log_cosh(800.0) - (800.0 - np.log(2.0))) < 1e-12
    assert abs(log_cosh(0.0)) == 0.0
    x = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(log_cosh(x), np.log(np.cosh(x)), atol=1e-12)
