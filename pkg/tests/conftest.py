"""Shared fixtures and independent oracles for the test suite."""

import math

import numpy as np
import pytest

from vgpricer import VgParams

# The standard parameter set used throughout the comparison tables.
TABLE1 = dict(theta=-0.1, sigma=0.2, kappa=0.2, r=0.06)


@pytest.fixture(scope="session")
def table1_params() -> VgParams:
    return VgParams(**TABLE1)


def random_valid_params(
    rng: np.random.Generator, max_skew_ratio: float | None = None
) -> VgParams:
    """Draw VG parameters satisfying the martingale-correction domain.

    ``max_skew_ratio`` caps theta^2*kappa/sigma^2.  The moment-matched branch
    probabilities stay nonnegative for every step size only when
    c4*c2 >= 3*c3^2, which for VG means that ratio below ~0.19; lattice
    sampling uses 0.15 for margin, while unconstrained draws exercise the
    heavier-skew region where the negative-probability error is reachable.
    """
    while True:
        theta = rng.uniform(-0.5, 0.5)
        sigma = rng.uniform(0.05, 0.6)
        kappa = rng.uniform(0.05, 1.5)
        if 1.0 - theta * kappa - 0.5 * sigma**2 * kappa <= 1e-3:
            continue
        if max_skew_ratio is not None and theta**2 * kappa / sigma**2 > max_skew_ratio:
            continue
        return VgParams(theta=theta, sigma=sigma, kappa=kappa, r=rng.uniform(0.0, 0.1))


def vg_unit_period_draws(
    rng: np.random.Generator, theta: float, sigma: float, kappa: float, n: int
) -> np.ndarray:
    """Simulate n one-period VG increments via the Gamma-time-changed normal.

    Independent forward oracle: X = theta*G + sigma*sqrt(G)*Z with
    G ~ Gamma(shape=1/kappa, scale=kappa) so E[G] = 1, Var[G] = kappa.
    """
    g = rng.gamma(1.0 / kappa, kappa, size=n)
    z = rng.standard_normal(n)
    return theta * g + sigma * np.sqrt(g) * z


def closed_form_probabilities(s: float, kbar: float) -> np.ndarray:
    """Branch probabilities in terms of skewness and excess kurtosis.

    Kept here, written independently of the library, as the cross-check
    oracle for the linear-system solution.
    """
    d = 3.0 + kbar
    root = math.sqrt(9.0 + 3.0 * kbar)
    return np.array(
        [
            (d + s * root) / (4.0 * d * d),
            (d - s * root) / (2.0 * d * d),
            (3.0 + 2.0 * kbar) / (2.0 * d),
            (d + s * root) / (2.0 * d * d),
            (d - s * root) / (4.0 * d * d),
        ]
    )
