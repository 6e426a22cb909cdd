"""Modified Bessel function of the second kind: identities and two oracles.

The implementation is validated against (a) the analytic half-integer
identity, (b) the integral representation
K_nu(x) = integral_0^inf exp(-x cosh t) cosh(nu t) dt evaluated by adaptive
quadrature, and (c) scipy.special.kv over the full contract range.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import kv

from vgpricer import ParameterError, bessel_k


def integral_oracle(nu: float, x: float) -> float:
    # truncate where exp(-x cosh t) has fully underflowed
    t_max = math.acosh(745.0 / x) if x < 745.0 else 1.0
    value, err = quad(
        lambda t: math.exp(-x * math.cosh(t)) * math.cosh(nu * t),
        0.0, t_max, epsabs=1e-14, epsrel=1e-12, limit=300,
    )
    assert err < 1e-11
    return value


class TestHalfIntegerIdentity:
    def test_k_half_on_grid(self):
        for x in np.linspace(0.05, 30.0, 50):
            exact = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
            assert bessel_k(0.5, x) == pytest.approx(exact, rel=1e-10)

    def test_k_half_at_one(self):
        # sqrt(pi/2) / e
        assert bessel_k(0.5, 1.0) == pytest.approx(0.46106850444789455, rel=1e-12)


class TestIntegralRepresentation:
    @pytest.mark.parametrize("nu", [0.0, 0.25, 1.0, 2.5])
    @pytest.mark.parametrize("x", [0.5, 1.0, 3.0, 10.0])
    def test_matches_quadrature(self, nu, x):
        assert bessel_k(nu, x) == pytest.approx(integral_oracle(nu, x), rel=1e-9)

    def test_k0_at_one_value(self):
        oracle = integral_oracle(0.0, 1.0)
        assert oracle == pytest.approx(0.4210244, abs=5e-8)
        assert bessel_k(0.0, 1.0) == pytest.approx(oracle, rel=1e-10)


class TestAgainstScipy:
    @pytest.mark.parametrize("nu", [0.0, 0.1, 0.5, 0.999, 1.0, 2.5, 4.5, 7.7, 15.0, 33.3, 50.0])
    def test_relative_accuracy(self, nu):
        for x in np.logspace(-6, math.log10(700.0), 40):
            ref = float(kv(nu, x))
            got = bessel_k(nu, x)
            if math.isinf(ref) or ref == 0.0 or ref < 1e-290:
                # overflow/underflow fringe; scipy flushes to 0 earlier than we do
                continue
            assert got == pytest.approx(ref, rel=1e-10), (nu, x)

    def test_near_integer_orders(self):
        # exercises the small-|mu| branch of the Temme series
        for nu in (1.0 - 1e-9, 2.0 + 1e-9, 3.0 + 1e-12):
            for x in (0.3, 1.5, 8.0):
                assert bessel_k(nu, x) == pytest.approx(float(kv(nu, x)), rel=1e-10)


class TestSymmetryAndEdges:
    def test_even_in_order(self):
        assert bessel_k(2.5, 3.0) == bessel_k(-2.5, 3.0)
        assert bessel_k(1.25, 0.7) == bessel_k(-1.25, 0.7)

    def test_positive(self):
        for nu in (0.0, 1.3, 7.0):
            for x in (1e-5, 0.1, 5.0, 100.0):
                assert bessel_k(nu, x) > 0.0

    def test_domain_error(self):
        with pytest.raises(ParameterError):
            bessel_k(1.0, 0.0)
        with pytest.raises(ParameterError):
            bessel_k(1.0, -2.0)

    def test_overflow_saturates_to_inf(self):
        assert bessel_k(50.0, 1e-6) == math.inf

    def test_scaled_mode(self):
        assert bessel_k(1.0, 5.0, scaled=True) == pytest.approx(
            bessel_k(1.0, 5.0) * math.exp(5.0), rel=1e-13
        )
        # deep tail where the unscaled value underflows
        from scipy.special import kve

        assert bessel_k(2.0, 5000.0, scaled=True) == pytest.approx(
            float(kve(2.0, 5000.0)), rel=1e-12
        )
