"""Explicit finite differences: coefficient algebra, local moments, pricing, positivity."""

import math
import warnings

import numpy as np
import pytest

from vgpricer import (
    GridConfig,
    GridTooNarrowWarning,
    InstabilityError,
    OptionSpec,
    ParameterError,
    UnitCumulants,
    VgParams,
    cumulants,
    default_grid,
    fd_coefficients,
    local_moments,
    martingale_correction,
    p3_curve,
    positivity_report,
    price_fd,
    quadrature_european_price,
    step_scale,
    transition_probabilities,
)
from vgpricer.pide_fd import _sweep
from conftest import random_valid_params

DT_2000 = 1.0 / 2000.0


def _alpha(params: VgParams, dt: float) -> float:
    return step_scale(cumulants(params, dt))


class TestFdCoefficients:
    def test_weights_sum_to_one(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            params = random_valid_params(rng)
            dt = 10.0 ** rng.uniform(-5, -1)
            h = rng.uniform(0.01, 0.5)
            coeffs = fd_coefficients(params, dt, h)
            assert float(coeffs.as_array().sum()) == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_when_driftless(self):
        # theta = 0 kills ct3; r = -omega kills the advection term
        base = VgParams(theta=0.0, sigma=0.2, kappa=0.2)
        params = VgParams(theta=0.0, sigma=0.2, kappa=0.2, r=-martingale_correction(base))
        coeffs = fd_coefficients(params, 1e-3, 0.1)
        assert coeffs.p_plus_h == pytest.approx(coeffs.p_minus_h, rel=1e-12)
        assert coeffs.p_plus_2h == pytest.approx(coeffs.p_minus_2h, rel=1e-12)

    def test_center_weight_frozen_value(self, table1_params):
        # p_0 = 1 - ct2 dt/h^2 + ct4 dt/(4 h^4) at dt = 1/2000, h = 2 alpha(dt)
        h = 2.0 * _alpha(table1_params, DT_2000)
        assert h == pytest.approx(0.0959268, abs=1e-7)
        coeffs = fd_coefficients(table1_params, DT_2000, h)
        direct = 1.0 - 0.042 * DT_2000 / h**2 + 0.0011568 * DT_2000 / (4.0 * h**4)
        assert coeffs.p_0 == pytest.approx(direct, rel=1e-12)
        assert coeffs.p_0 == pytest.approx(0.9994256, abs=1e-7)

    def test_negative_weight_in_lattice_spacing_regime(self, table1_params):
        # the paper-regime h = 2 alpha leaves p_minus_h slightly negative
        coeffs = fd_coefficients(table1_params, DT_2000, 2.0 * _alpha(table1_params, DT_2000))
        assert coeffs.p_minus_h < 0.0
        assert not coeffs.all_nonnegative
        assert "p_minus_h" in coeffs.negative_weights()

    def test_unit_cumulants_match_t1(self, table1_params):
        uc = UnitCumulants.from_params(table1_params)
        c = cumulants(table1_params, 1.0)
        assert (uc.ct1, uc.ct2, uc.ct3, uc.ct4) == (c.c1, c.c2, c.c3, c.c4)


class TestLocalMoments:
    def test_identities(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            params = random_valid_params(rng)
            dt = 10.0 ** rng.uniform(-5, -1)
            h = rng.uniform(0.02, 0.4)
            coeffs = fd_coefficients(params, dt, h)
            mu1, mu2, mu3, mu4 = local_moments(coeffs, h, dt)
            uc = UnitCumulants.from_params(params)
            drift = params.r + martingale_correction(params) + uc.ct1
            assert mu1 == pytest.approx(drift * dt, abs=1e-12)
            assert mu2 == pytest.approx(uc.ct2 * dt, abs=1e-12)
            assert mu3 == pytest.approx((drift * h**2 + uc.ct3) * dt, abs=1e-12)
            assert mu4 == pytest.approx((uc.ct2 * h**2 + uc.ct4) * dt, abs=1e-12)

    def test_symmetric_third_moment_vanishes(self):
        base = VgParams(theta=0.0, sigma=0.2, kappa=0.2)
        params = VgParams(theta=0.0, sigma=0.2, kappa=0.2, r=-martingale_correction(base))
        coeffs = fd_coefficients(params, 1e-3, 0.1)
        _, _, mu3, _ = local_moments(coeffs, 0.1, 1e-3)
        assert mu3 == pytest.approx(0.0, abs=1e-15)


class TestP3Curve:
    def test_small_kurtosis_limit(self):
        point = p3_curve([1e-9], c2=0.042, dt=DT_2000)[0]
        assert point.p3_mm == pytest.approx(0.5, abs=1e-9)

    def test_large_kurtosis_limit(self):
        point = p3_curve([1e9], c2=0.042, dt=DT_2000)[0]
        assert point.p3_mm == pytest.approx(1.0, abs=1e-8)
        assert point.p3_pde == pytest.approx(1.0, abs=1e-8)

    def test_unit_kurtosis_frozen_values(self):
        point = p3_curve([1.0], c2=0.042, dt=DT_2000)[0]
        assert point.p3_mm == pytest.approx(0.625, rel=1e-12)
        # 1 - 3/(3+kbar) + 9 kbar/(4 (3+kbar)^2) at kbar = 1
        assert point.p3_pde == pytest.approx(0.390625, rel=1e-12)

    def test_mm_curve_increasing(self):
        points = p3_curve(np.linspace(0.1, 5.0, 50), c2=0.042, dt=DT_2000)
        mm = [p.p3_mm for p in points]
        assert all(b > a for a, b in zip(mm, mm[1:]))

    def test_depends_only_on_kurtosis_with_matched_spacing(self):
        # with h = 2 alpha both probabilities collapse to functions of kbar
        a = p3_curve([0.7, 2.2], c2=0.042, dt=DT_2000)
        b = p3_curve([0.7, 2.2], c2=0.9, dt=0.05)
        for pa, pb in zip(a, b):
            assert pa.p3_pde == pytest.approx(pb.p3_pde, rel=1e-12)

    def test_rejects_nonpositive_kurtosis(self):
        with pytest.raises(ParameterError):
            p3_curve([0.0], c2=0.042, dt=DT_2000)


class TestFdVsMomentMatching:
    def test_weights_close_to_branch_probabilities(self, table1_params):
        """With h = 2 alpha the five FD weights track the matched probabilities."""
        c = cumulants(table1_params, DT_2000)
        probs = transition_probabilities(c).as_array()
        coeffs = fd_coefficients(table1_params, DT_2000, 2.0 * step_scale(c))
        gaps = np.abs(coeffs.as_array() - probs)
        assert float(gaps.max()) < 0.05


class TestPriceFd:
    def _spec(self, spot, style="european", kind="put"):
        return OptionSpec(strike=40.0, maturity=1.0, kind=kind, style=style, spot=spot)

    def test_european_put_vs_quadrature(self, table1_params):
        # stable all-nonnegative regime: h = 3 alpha(dt), strike mid-cell
        spec = self._spec(40.0)
        grid = default_grid(spec, table1_params, n_time=2000,
                            h=3.0 * _alpha(table1_params, DT_2000))
        oracle = quadrature_european_price(spec, table1_params)
        assert price_fd(spec, table1_params, grid) == pytest.approx(oracle, abs=0.05)

    def test_refinement_does_not_increase_error(self, table1_params):
        spec = self._spec(40.0)
        oracle = quadrature_european_price(spec, table1_params)
        errors = {}
        for m in (1000, 4000):
            grid = default_grid(spec, table1_params, n_time=m,
                                h=3.0 * _alpha(table1_params, 1.0 / m))
            errors[m] = abs(price_fd(spec, table1_params, grid) - oracle)
        assert errors[4000] <= errors[1000]

    def test_american_dominates_european(self, table1_params):
        for spot in (36.0, 38.0, 40.0, 42.0, 44.0):
            grid = default_grid(self._spec(spot), table1_params, n_time=400,
                                h=3.0 * _alpha(table1_params, 1.0 / 400.0))
            eu = price_fd(self._spec(spot), table1_params, grid)
            am = price_fd(self._spec(spot, style="american"), table1_params, grid)
            assert am >= eu - 1e-12

    def test_call_prices_sane(self, table1_params):
        spec = self._spec(40.0, kind="call")
        grid = default_grid(spec, table1_params, n_time=1000,
                            h=3.0 * _alpha(table1_params, 1e-3))
        oracle = quadrature_european_price(spec, table1_params)
        assert price_fd(spec, table1_params, grid) == pytest.approx(oracle, abs=0.06)

    def test_zero_terminal_data_stays_zero(self):
        # linearity of the sweep: all-zero terminal data propagates to zero
        weights = np.array([0.01, 0.2, 0.6, 0.18, 0.01])
        values = _sweep(
            np.zeros(41), weights, r_factor=0.999, n_time=50, dt=0.01,
            boundary_low=lambda tau: 0.0, boundary_high=lambda tau: 0.0,
            projection=None, growth_bound=None,
        )
        assert np.all(values == 0.0)

    def test_instability_detected(self, table1_params):
        # h far below the lattice spacing makes the fourth-order term explode
        spec = self._spec(40.0)
        h = 0.5 * _alpha(table1_params, DT_2000)
        grid = default_grid(spec, table1_params, n_time=2000, h=h)
        with pytest.raises(InstabilityError):
            price_fd(spec, table1_params, grid)

    def test_narrow_grid_warns(self, table1_params):
        spec = self._spec(40.0)
        grid = default_grid(spec, table1_params, n_time=200,
                            h=3.0 * _alpha(table1_params, 1.0 / 200.0),
                            half_width_stdev=2.0)
        with pytest.warns(GridTooNarrowWarning):
            price_fd(spec, table1_params, grid)

    def test_wide_grid_silent(self, table1_params):
        spec = self._spec(40.0)
        grid = default_grid(spec, table1_params, n_time=200,
                            h=3.0 * _alpha(table1_params, 1.0 / 200.0))
        with warnings.catch_warnings():
            warnings.simplefilter("error", GridTooNarrowWarning)
            price_fd(spec, table1_params, grid)

    def test_spot_outside_grid_rejected(self, table1_params):
        spec = self._spec(40.0)
        grid = GridConfig(x_min=5.0, x_max=6.0, n_space=10, n_time=10)
        with pytest.raises(ParameterError):
            price_fd(spec, table1_params, grid)


class TestDefaultGrid:
    def test_strike_is_mid_cell(self, table1_params):
        spec = OptionSpec(strike=40.0, maturity=1.0, kind="put", style="european", spot=37.0)
        grid = default_grid(spec, table1_params, n_time=500)
        frac = (math.log(40.0) - grid.x_min) / grid.h % 1.0
        assert frac == pytest.approx(0.5, abs=1e-9)

    def test_default_spacing_is_lattice_consistent(self, table1_params):
        spec = OptionSpec(strike=40.0, maturity=1.0, kind="put", style="european", spot=40.0)
        grid = default_grid(spec, table1_params, n_time=2000)
        assert grid.h == pytest.approx(2.0 * _alpha(table1_params, DT_2000), rel=1e-12)

    def test_covers_requested_width(self, table1_params):
        spec = OptionSpec(strike=40.0, maturity=1.0, kind="put", style="european", spot=40.0)
        grid = default_grid(spec, table1_params, n_time=500, half_width_stdev=10.0)
        c = cumulants(table1_params, 1.0)
        assert grid.x_max - grid.x_min >= 20.0 * math.sqrt(c.c2)


class TestPositivityReport:
    def test_flags_negative_regime_and_finds_nonnegative_one(self, table1_params):
        alpha = _alpha(table1_params, DT_2000)
        h_grid = np.linspace(0.5 * alpha, 4.0 * alpha, 40)
        report = positivity_report(table1_params, DT_2000, h_grid)
        negatives = [e for e in report.entries if e.negative]
        assert negatives, "expected at least one negative-weight spacing"
        assert report.nonnegative_h, "expected an all-nonnegative spacing band"
        assert not report.all_nonnegative
        # the paper-regime spacing h = 2 alpha itself carries a negative weight
        single = positivity_report(table1_params, DT_2000, 2.0 * alpha)
        assert single.entries[0].negative

    def test_gaussian_limit_boundary(self):
        # ct4 ~ 0 and h^2 = ct2 dt sits exactly on the positivity boundary:
        # p_0 = 0 with every other weight nonnegative
        base = VgParams(theta=0.0, sigma=0.2, kappa=1e-10)
        params = VgParams(theta=0.0, sigma=0.2, kappa=1e-10,
                          r=-martingale_correction(base))
        dt = 1e-3
        h = math.sqrt(params.sigma**2 * dt)
        report = positivity_report(params, dt, h)
        entry = report.entries[0]
        assert entry.coefficients.p_0 == pytest.approx(0.0, abs=1e-6)
        assert all(w >= -1e-12 for w in entry.coefficients.as_array())
        assert report.nonnegative_h == (h,) or abs(entry.coefficients.p_0) < 1e-6

    def test_wide_spacing_drifts_to_center(self, table1_params):
        # h -> large: p_0 -> 1, side weights -> 0 with drift-sign asymmetry
        report = positivity_report(table1_params, DT_2000, 50.0)
        c = report.entries[0].coefficients
        assert c.p_0 == pytest.approx(1.0, abs=1e-6)
        assert abs(c.p_plus_h) < 1e-6 and abs(c.p_minus_h) < 1e-6
        # positive total drift pushes the +h weight above the -h weight
        assert c.p_plus_h > c.p_minus_h
