"""Explicit finite differences for the fourth-order PDE approximation of the VG PIDE.

Expanding the jump integral of the pricing PIDE in a Taylor series up to the
fourth derivative turns it into a PDE whose coefficients are the unit-time
cumulants ct_n = integral y^n nu(dy).  Central differences in space and an
explicit step in time give a five-point update whose weights play the role
of transition probabilities of a Markov chain on the grid -- except that,
unlike the moment-matched lattice, they are not always nonnegative.  This
module assembles those weights, checks their local moments, prices
European/American payoffs with the explicit sweep, reports positivity, and
produces the centre-probability comparison curve p3_mm vs p3_pde.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import GridTooNarrowWarning, InstabilityError, ParameterError
from .lattice import OptionSpec, step_scale
from .vg_model import VgParams, cumulants, martingale_correction

__all__ = [
    "GridConfig",
    "UnitCumulants",
    "FdCoefficients",
    "P3Point",
    "PositivityEntry",
    "PositivityReport",
    "fd_coefficients",
    "local_moments",
    "default_grid",
    "price_fd",
    "p3_curve",
    "positivity_report",
]

_INFLUENCE_THRESHOLD = 1e-6
_GROWTH_FACTOR = 10.0


@dataclass(frozen=True)
class GridConfig:
    """Log-price grid: n_space intervals on [x_min, x_max], n_time steps in time."""

    x_min: float
    x_max: float
    n_space: int
    n_time: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ParameterError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.n_space < 4:
            raise ParameterError(f"n_space must be >= 4, got {self.n_space}")
        if self.n_time < 1:
            raise ParameterError(f"n_time must be >= 1, got {self.n_time}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_space


@dataclass(frozen=True)
class UnitCumulants:
    """Per-unit-time cumulants ct_n = integral y^n nu(dy) (cumulants at t = 1)."""

    ct1: float
    ct2: float
    ct3: float
    ct4: float

    @classmethod
    def from_params(cls, params: VgParams) -> "UnitCumulants":
        c = cumulants(params, 1.0)
        return cls(ct1=c.c1, ct2=c.c2, ct3=c.c3, ct4=c.c4)


@dataclass(frozen=True)
class FdCoefficients:
    """Explicit-update weights for displacements +2h, +h, 0, -h, -2h.

    The five weights sum to one by construction; negativity is possible and
    is reported, not fatal.  r_factor = 1 / (1 + r dt) discounts one step.
    """

    p_plus_2h: float
    p_plus_h: float
    p_0: float
    p_minus_h: float
    p_minus_2h: float
    r_factor: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.p_plus_2h, self.p_plus_h, self.p_0, self.p_minus_h, self.p_minus_2h]
        )

    def negative_weights(self) -> dict[str, float]:
        names = ("p_plus_2h", "p_plus_h", "p_0", "p_minus_h", "p_minus_2h")
        return {n: w for n, w in zip(names, self.as_array()) if w < 0.0}

    @property
    def all_nonnegative(self) -> bool:
        return not self.negative_weights()


def fd_coefficients(params: VgParams, dt: float, h: float) -> FdCoefficients:
    """Assemble the five explicit weights from the unit-time cumulants.

    With drift = r + omega + ct1:

        p_{+-h}  = +-drift dt/(2h) + ct2 dt/(2h^2) -+ ct3 dt/(6h^3) - ct4 dt/(6h^4)
        p_{+-2h} = +-ct3 dt/(12h^3) + ct4 dt/(24h^4)
        p_0      = 1 - ct2 dt/h^2 + ct4 dt/(4h^4)
    """
    if not dt > 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if not h > 0.0:
        raise ParameterError(f"h must be > 0, got {h}")
    uc = UnitCumulants.from_params(params)
    omega = martingale_correction(params)
    drift = params.r + omega + uc.ct1
    adv = drift * dt / (2.0 * h)
    diff2 = uc.ct2 * dt / (2.0 * h**2)
    diff3 = uc.ct3 * dt / (12.0 * h**3)
    diff4 = uc.ct4 * dt / (24.0 * h**4)
    return FdCoefficients(
        p_plus_2h=diff3 + diff4,
        p_minus_2h=-diff3 + diff4,
        p_plus_h=adv + diff2 - 2.0 * diff3 - 4.0 * diff4,
        p_minus_h=-adv + diff2 + 2.0 * diff3 - 4.0 * diff4,
        p_0=1.0 - 2.0 * diff2 + 6.0 * diff4,
        r_factor=1.0 / (1.0 + params.r * dt),
    )


def local_moments(coeffs: FdCoefficients, h: float, dt: float) -> tuple[float, float, float, float]:
    """Raw moments of the five-point increment distribution, computed from the weights.

    For weights assembled by ``fd_coefficients`` these reproduce
    mu1' = (r+omega+ct1) dt, mu2' = ct2 dt, mu3' = ((r+omega+ct1) h^2 + ct3) dt
    and mu4' = (ct2 h^2 + ct4) dt identically.
    """
    if not dt > 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    disp = np.array([2.0 * h, h, 0.0, -h, -2.0 * h])
    w = coeffs.as_array()
    return tuple(float(w @ disp**k) for k in range(1, 5))


def default_grid(
    spec: OptionSpec,
    params: VgParams,
    n_time: int,
    h: float | None = None,
    half_width_stdev: float = 10.0,
) -> GridConfig:
    """Grid covering +-half_width_stdev standard deviations around the drifted spot.

    The spacing defaults to h = 2 alpha(dt), the lattice-consistent value.
    Nodes are anchored so the strike falls midway between two of them, which
    kills the payoff-kink sampling bias of coarse explicit grids; the price
    at the spot is then read out by local polynomial interpolation.
    """
    if n_time < 1:
        raise ParameterError(f"n_time must be >= 1, got {n_time}")
    dt = spec.maturity / n_time
    if h is None:
        h = 2.0 * step_scale(cumulants(params, dt))
    if not h > 0.0:
        raise ParameterError(f"h must be > 0, got {h}")
    uc = UnitCumulants.from_params(params)
    omega = martingale_correction(params)
    drift = params.r + omega + uc.ct1
    center = math.log(spec.spot) + 0.5 * drift * spec.maturity
    half = half_width_stdev * math.sqrt(uc.ct2 * spec.maturity)
    anchor = math.log(spec.strike) + 0.5 * h
    n_lo = max(2, math.ceil((anchor - (center - half)) / h))
    n_hi = max(2, math.ceil(((center + half) - anchor) / h))
    return GridConfig(
        x_min=anchor - n_lo * h,
        x_max=anchor + n_hi * h,
        n_space=n_lo + n_hi,
        n_time=n_time,
    )


def _sweep(
    values: np.ndarray,
    weights: np.ndarray,
    r_factor: float,
    n_time: int,
    dt: float,
    boundary_low: Callable[[float], np.ndarray | float],
    boundary_high: Callable[[float], np.ndarray | float],
    projection: np.ndarray | None,
    growth_bound: float | None,
) -> np.ndarray:
    """Backward explicit sweep over an extended array with two ghost layers per side."""
    w_p2, w_p1, w_0, w_m1, w_m2 = weights
    for n in range(n_time - 1, -1, -1):
        tau = (n_time - n) * dt  # time remaining at level n
        new = np.empty_like(values)
        new[2:-2] = r_factor * (
            w_p2 * values[4:]
            + w_p1 * values[3:-1]
            + w_0 * values[2:-2]
            + w_m1 * values[1:-3]
            + w_m2 * values[:-4]
        )
        new[:2] = boundary_low(tau)
        new[-2:] = boundary_high(tau)
        if projection is not None:
            np.maximum(new, projection, out=new)
        if growth_bound is not None and float(np.abs(new).max()) > growth_bound:
            raise InstabilityError(
                f"explicit sweep exceeded growth bound {growth_bound:.3e} at "
                f"step {n} (max |V| = {np.abs(new).max():.3e}); the (h, dt) "
                "regime is unstable"
            )
        values = new
    return values


def _read_out(x_nodes: np.ndarray, values: np.ndarray, x0: float) -> float:
    """Four-point Lagrange interpolation at x0 (linear fallback near edges)."""
    if len(x_nodes) < 4:
        return float(np.interp(x0, x_nodes, values))
    j = int(np.searchsorted(x_nodes, x0))
    lo = min(max(j - 2, 0), len(x_nodes) - 4)
    xs = x_nodes[lo:lo + 4]
    vs = values[lo:lo + 4]
    total = 0.0
    for a in range(4):
        weight = 1.0
        for b in range(4):
            if b != a:
                weight *= (x0 - xs[b]) / (xs[a] - xs[b])
        total += weight * vs[a]
    return float(total)


def price_fd(
    spec: OptionSpec,
    params: VgParams,
    grid: GridConfig,
    warn_influence: bool = True,
) -> float:
    """Explicit backward time-stepping price on the given grid.

    Each level applies V^n_i = r_factor * sum of the five weighted successor
    values; American styles take the pointwise maximum with intrinsic value
    after every step.  Boundaries use two ghost layers per side holding the
    payoff asymptotics (put: K - e^x below, 0 above; call mirrored with the
    discounted strike).  A companion sweep with absolute weights measures how
    much boundary data reaches the spot and warns if that influence exceeds
    1e-6; values growing past ten times the initial payoff scale raise an
    instability error instead of returning garbage.
    """
    dt = spec.maturity / grid.n_time
    h = grid.h
    x0 = math.log(spec.spot)
    if not grid.x_min <= x0 <= grid.x_max:
        raise ParameterError(
            f"log-spot {x0:.4f} lies outside the grid [{grid.x_min:.4f}, {grid.x_max:.4f}]"
        )
    coeffs = fd_coefficients(params, dt, h)
    weights = coeffs.as_array()

    n_ext = grid.n_space + 5  # real nodes plus two ghosts per side
    x = grid.x_min + (np.arange(n_ext) - 2.0) * h
    prices = np.exp(x)
    terminal = spec.payoff(prices)
    strike = spec.strike

    if spec.kind == "put":
        low_prices, high_prices = prices[:2], prices[-2:]

        def boundary_low(tau: float) -> np.ndarray:
            return np.maximum(strike - low_prices,
                              strike * math.exp(-params.r * tau) - low_prices)

        def boundary_high(tau: float) -> float:
            return 0.0

    else:
        high_prices = prices[-2:]

        def boundary_low(tau: float) -> float:
            return 0.0

        def boundary_high(tau: float) -> np.ndarray:
            return high_prices - strike * math.exp(-params.r * tau)

    projection = spec.payoff(prices) if spec.is_american else None
    growth_bound = _GROWTH_FACTOR * max(1.0, float(terminal.max()))
    values = _sweep(
        terminal.copy(), weights, coeffs.r_factor, grid.n_time, dt,
        boundary_low, boundary_high, projection, growth_bound,
    )

    x_real = x[2:-2]
    if warn_influence:
        ones = lambda tau: 1.0  # noqa: E731 - constant boundary marker
        marker = _sweep(
            np.zeros(n_ext), np.abs(weights), coeffs.r_factor, grid.n_time, dt,
            ones, ones, None, None,
        )
        j = int(np.searchsorted(x_real, x0))
        influence = float(np.max(marker[2:-2][max(j - 1, 0):j + 1]))
        if influence > _INFLUENCE_THRESHOLD:
            warnings.warn(
                GridTooNarrowWarning(
                    f"boundary values reach the spot with weight {influence:.2e} "
                    f"(> {_INFLUENCE_THRESHOLD:g}); widen the grid"
                ),
                stacklevel=2,
            )
    return _read_out(x_real, values[2:-2], x0)


class P3Point(NamedTuple):
    kbar: float
    p3_mm: float
    p3_pde: float


def p3_curve(kbar_values: Sequence[float], c2: float, dt: float) -> list[P3Point]:
    """Centre probabilities from moment matching and from the PDE weights.

    For each excess kurtosis kbar, the per-step variance is c2*dt and the
    per-step fourth cumulant kbar*(c2*dt)^2; with the lattice-consistent
    spacing h = 2 alpha both centre probabilities collapse to functions of
    kbar alone:

        p3_mm  = (3 + 2 kbar) / (2 (3 + kbar))
        p3_pde = 1 - ct2 dt / h^2 + ct4 dt / (4 h^4)
    """
    if not dt > 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if not c2 > 0.0:
        raise ParameterError(f"c2 must be > 0, got {c2}")
    out = []
    for kbar in kbar_values:
        if kbar <= 0.0:
            raise ParameterError(f"excess kurtosis must be > 0, got {kbar}")
        v2 = c2 * dt
        v4 = kbar * v2 * v2
        h = 2.0 * math.sqrt(v2 * (3.0 + kbar) / 12.0)
        p3_mm = (3.0 + 2.0 * kbar) / (2.0 * (3.0 + kbar))
        p3_pde = 1.0 - v2 / h**2 + v4 / (4.0 * h**4)
        out.append(P3Point(kbar=float(kbar), p3_mm=p3_mm, p3_pde=p3_pde))
    return out


@dataclass(frozen=True)
class PositivityEntry:
    h: float
    coefficients: FdCoefficients
    negative: dict[str, float]


@dataclass(frozen=True)
class PositivityReport:
    dt: float
    entries: tuple[PositivityEntry, ...]
    nonnegative_h: tuple[float, ...]

    @property
    def all_nonnegative(self) -> bool:
        return len(self.nonnegative_h) == len(self.entries)


def positivity_report(
    params: VgParams, dt: float, h_values: float | Sequence[float]
) -> PositivityReport:
    """Scan spacings and report which weights go negative where.

    Returns one entry per scanned h listing its negative weights (empty when
    all five are nonnegative) plus the subset of h values whose weights are
    all nonnegative.
    """
    if np.isscalar(h_values):
        h_values = [float(h_values)]
    entries = []
    for h in h_values:
        coeffs = fd_coefficients(params, dt, float(h))
        entries.append(
            PositivityEntry(h=float(h), coefficients=coeffs, negative=coeffs.negative_weights())
        )
    return PositivityReport(
        dt=dt,
        entries=tuple(entries),
        nonnegative_h=tuple(e.h for e in entries if not e.negative),
    )
