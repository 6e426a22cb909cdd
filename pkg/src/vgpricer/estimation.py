"""Method-of-moments fitting of VG and Normal parameters to a log-return series.

The VG fit uses the small-theta inversion of the unit-period cumulants:
sigma^2 = variance, kappa = kurtosis/3 - 1, theta = skewness * sigma / (3 kappa),
plus a free location (drift) so the fitted density mean matches the sample
mean.  Because the inversion drops higher-order theta terms, the fit also
reports the residual between the sample skewness/kurtosis and the values the
full cumulant formulas give for the fitted parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EstimationError, NotVgFittableError
from .vg_model import VgParams, pdf

__all__ = [
    "MIN_FIT_OBSERVATIONS",
    "ReturnSeries",
    "SampleMoments",
    "VgFitResiduals",
    "VgFit",
    "OverlayRow",
    "sample_moments",
    "fit_vg_moments",
    "fit_normal",
    "density_overlay_table",
]

MIN_FIT_OBSERVATIONS = 30


@dataclass(frozen=True)
class ReturnSeries:
    """Ordered log-returns, one per observation period (e.g. daily)."""

    values: tuple[float, ...]
    period_label: str = ""

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in vals):
            raise EstimationError("return series contains non-finite values")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SampleMoments:
    """Mean, unbiased variance, and biased-moment skewness/kurtosis (non-excess)."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float
    n: int


@dataclass(frozen=True)
class VgFitResiduals:
    """Gap between sample moments and the full cumulant map at the fitted parameters."""

    model_variance: float
    model_skewness: float
    model_kurtosis: float
    variance_error: float
    skewness_error: float
    kurtosis_error: float


@dataclass(frozen=True)
class VgFit:
    """Fitted per-period VG parameters plus a location shift."""

    theta: float
    sigma: float
    kappa: float
    drift: float
    residuals: VgFitResiduals


class OverlayRow(NamedTuple):
    bin_center: float
    hist_density: float
    vg_density: float | None
    normal_density: float


def sample_moments(series: ReturnSeries) -> SampleMoments:
    """Standard central-moment estimators; kurtosis is mu4/mu2^2 (non-excess)."""
    x = np.asarray(series.values)
    n = len(x)
    if n < 2:
        raise EstimationError(f"need at least 2 observations, got {n}")
    mean = float(x.mean())
    centered = x - mean
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise EstimationError("series has zero variance")
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    return SampleMoments(
        mean=mean,
        variance=float(centered @ centered / (n - 1)),
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
        n=n,
    )


def _model_moments(theta: float, sigma: float, kappa: float) -> tuple[float, float, float]:
    """(variance, skewness, non-excess kurtosis) of the unit-period VG law."""
    c2 = sigma**2 + theta**2 * kappa
    c3 = 2.0 * theta**3 * kappa**2 + 3.0 * sigma**2 * theta * kappa
    c4 = 3.0 * sigma**4 * kappa + 12.0 * sigma**2 * theta**2 * kappa**2 + 6.0 * theta**4 * kappa**3
    return c2, c3 / c2**1.5, 3.0 + c4 / c2**2


def fit_vg_moments(m: SampleMoments) -> VgFit:
    """Small-theta method-of-moments inversion at the one-period horizon.

    Requires positive excess kurtosis; a Gaussian-or-thinner sample has no
    VG fit with kappa > 0 and raises ``NotVgFittableError``.
    """
    if m.variance <= 0.0:
        raise EstimationError(f"variance must be > 0, got {m.variance}")
    if m.kurtosis <= 3.0:
        raise NotVgFittableError(
            f"sample kurtosis {m.kurtosis:.4f} <= 3: no positive-kappa VG fit; "
            "use the Normal fit instead"
        )
    sigma = math.sqrt(m.variance)
    kappa = m.kurtosis / 3.0 - 1.0
    theta = m.skewness * sigma / (3.0 * kappa)
    drift = m.mean - theta
    model_var, model_skew, model_kurt = _model_moments(theta, sigma, kappa)
    residuals = VgFitResiduals(
        model_variance=model_var,
        model_skewness=model_skew,
        model_kurtosis=model_kurt,
        variance_error=model_var - m.variance,
        skewness_error=model_skew - m.skewness,
        kurtosis_error=model_kurt - m.kurtosis,
    )
    return VgFit(theta=theta, sigma=sigma, kappa=kappa, drift=drift, residuals=residuals)


def fit_normal(m: SampleMoments) -> tuple[float, float]:
    """Gaussian moment fit: (mu, sigma) = (mean, sqrt(variance))."""
    if m.variance <= 0.0:
        raise EstimationError(f"variance must be > 0, got {m.variance}")
    return m.mean, math.sqrt(m.variance)


def density_overlay_table(series: ReturnSeries, bins: int) -> list[OverlayRow]:
    """Histogram density with fitted VG and Normal overlays, one row per bin.

    The VG column is the unit-period density at (x - drift) for the fitted
    parameters; when the sample kurtosis does not exceed 3 the VG fit is
    impossible and the column is left empty (Normal-only fallback).
    """
    if len(series) < MIN_FIT_OBSERVATIONS:
        raise EstimationError(
            f"series too short: {len(series)} observations "
            f"(need >= {MIN_FIT_OBSERVATIONS})"
        )
    if bins < 1:
        raise EstimationError(f"bins must be >= 1, got {bins}")
    x = np.asarray(series.values)
    moments = sample_moments(series)
    mu, sd = fit_normal(moments)
    try:
        vg_fit = fit_vg_moments(moments)
        vg_params = VgParams(theta=vg_fit.theta, sigma=vg_fit.sigma, kappa=vg_fit.kappa)
    except NotVgFittableError:
        vg_fit = None
        vg_params = None

    hist, edges = np.histogram(x, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    rows = []
    for center, density in zip(centers, hist):
        normal_density = math.exp(-0.5 * ((center - mu) / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))
        vg_density = None
        if vg_fit is not None:
            vg_density = pdf(vg_params, 1.0, center - vg_fit.drift)
        rows.append(
            OverlayRow(
                bin_center=float(center),
                hist_density=float(density),
                vg_density=vg_density,
                normal_density=normal_density,
            )
        )
    return rows
