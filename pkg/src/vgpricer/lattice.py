"""Recombining pentanomial lattice for the exponential VG model.

One time step moves the log price by b*dt + j*alpha with j in
{+4, +2, 0, -2, -4}; five branches are enough to match the first four
moments of the VG increment.  The per-step half-spacing alpha and the
branch probabilities come from moment matching against the increment
cumulants at horizon dt.  Backward induction prices European and American
payoffs; a Cox-Ross-Rubinstein binomial tree provides the Black-Scholes
baseline used for comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, NegativeProbabilityError, ParameterError
from .vg_model import (
    Cumulants,
    VgParams,
    central_moments_from_cumulants,
    cumulants,
    martingale_correction,
    skew_kurt,
)

__all__ = [
    "LatticeConfig",
    "StepParams",
    "ProbVector",
    "OptionSpec",
    "step_scale",
    "transition_probabilities",
    "up_down_factors",
    "terminal_prices",
    "price_lattice",
    "binomial_bs_price",
]

BRANCHES = 5
# Log-price displacement multipliers, largest up-move first (branch l = 1..5).
BRANCH_STEPS = np.array([4.0, 2.0, 0.0, -2.0, -4.0])
# exp() overflow guard for extreme n_steps * alpha.
_MAX_LOG_PRICE = 700.0
_PROB_TOLERANCE = -1e-12
_CROSS_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class LatticeConfig:
    """Time discretization: n_steps steps spanning [t0, T]."""

    n_steps: int
    T: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ParameterError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.T > self.t0:
            raise ParameterError(f"need T > t0, got T={self.T}, t0={self.t0}")

    @property
    def dt(self) -> float:
        return (self.T - self.t0) / self.n_steps


@dataclass(frozen=True)
class StepParams:
    """Per-step geometry: log u = b_step/4 + alpha, log d = b_step/4 - alpha.

    b_step is the full per-step drift b * dt, split evenly over the four
    up/down factor applications so one branch move is b*dt + j*alpha.
    u/d = e^{2 alpha} is constant across steps, so the tree recombines.
    """

    alpha: float
    b_step: float
    u: float
    d: float

    @property
    def log_u(self) -> float:
        return 0.25 * self.b_step + self.alpha

    @property
    def log_d(self) -> float:
        return 0.25 * self.b_step - self.alpha


@dataclass(frozen=True)
class ProbVector:
    """Branch probabilities ordered from the largest up-move to the largest down-move."""

    p1: float
    p2: float
    p3: float
    p4: float
    p5: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3, self.p4, self.p5])


@dataclass(frozen=True)
class OptionSpec:
    """Vanilla option contract: strike, maturity, call/put, European/American, spot."""

    strike: float
    maturity: float
    kind: str
    style: str
    spot: float

    def __post_init__(self) -> None:
        if not self.strike > 0.0:
            raise ParameterError(f"strike must be > 0, got {self.strike}")
        if not self.spot > 0.0:
            raise ParameterError(f"spot must be > 0, got {self.spot}")
        if not self.maturity > 0.0:
            raise ParameterError(f"maturity must be > 0, got {self.maturity}")
        if self.kind not in ("call", "put"):
            raise ParameterError(f"kind must be 'call' or 'put', got {self.kind!r}")
        if self.style not in ("european", "american"):
            raise ParameterError(f"style must be 'european' or 'american', got {self.style!r}")

    @property
    def is_american(self) -> bool:
        return self.style == "american"

    def payoff(self, prices: np.ndarray) -> np.ndarray:
        if self.kind == "call":
            return np.maximum(prices - self.strike, 0.0)
        return np.maximum(self.strike - prices, 0.0)


def step_scale(c_step: Cumulants) -> float:
    """Per-step half-spacing alpha = sqrt(c2) sqrt((3 + kbar) / 12),

    with c2 and kbar = c4/c2^2 evaluated at the step horizon.  This choice
    keeps all five moment-matched probabilities in [0, 1].
    """
    if not c_step.c2 > 0.0:
        raise ParameterError(f"step_scale requires c2 > 0, got {c_step.c2}")
    if c_step.c4 < 0.0:
        raise ParameterError(f"step_scale requires c4 >= 0, got {c_step.c4}")
    kbar = c_step.c4 / c_step.c2**2
    return math.sqrt(c_step.c2) * math.sqrt((3.0 + kbar) / 12.0)


def _closed_form_probabilities(s: float, kbar: float) -> np.ndarray:
    """Moment-matched branch probabilities in terms of skewness and excess kurtosis."""
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


def transition_probabilities(c_step: Cumulants) -> ProbVector:
    """Solve the five-condition moment-matching system for the branch probabilities.

    Conditions: probabilities sum to one, the centered step has zero mean,
    and alpha^k E[j^k] equals the increment's central moments for k = 2..4.
    The closed form in (skewness, excess kurtosis) must agree with the
    linear-system solution to 1e-10 and is kept as a cross-check.
    """
    alpha = step_scale(c_step)
    s, kbar = skew_kurt(c_step)
    mu2, mu3, mu4 = central_moments_from_cumulants(c_step)
    system = np.vstack([BRANCH_STEPS**k for k in range(BRANCHES)])
    rhs = np.array([1.0, 0.0, mu2 / alpha**2, mu3 / alpha**3, mu4 / alpha**4])
    probs = np.linalg.solve(system, rhs)
    closed = _closed_form_probabilities(s, kbar)
    gap = float(np.max(np.abs(probs - closed)))
    if gap > _CROSS_CHECK_TOL:
        raise EvaluationError(
            f"moment-matching system and closed-form probabilities disagree by {gap:.3e}"
        )
    if float(probs.min()) < _PROB_TOLERANCE:
        raise NegativeProbabilityError(
            f"negative branch probability {probs.min():.3e} "
            f"(skewness={s:.6g}, excess_kurtosis={kbar:.6g})",
            skewness=s,
            excess_kurtosis=kbar,
        )
    return ProbVector(*(float(p) for p in probs))


def up_down_factors(b_per_unit: float, dt: float, alpha: float) -> StepParams:
    """Up/down factors u = exp(b dt/4 + alpha), d = exp(b dt/4 - alpha).

    The drift is spread over the L-1 = 4 factor applications so that branch
    l contributes (5-l) log u + (l-1) log d = b dt + (6-2l) alpha.
    """
    if alpha < 0.0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    if not dt > 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    b_step = b_per_unit * dt
    return StepParams(
        alpha=alpha,
        b_step=b_step,
        u=math.exp(0.25 * b_step + alpha),
        d=math.exp(0.25 * b_step - alpha),
    )


def terminal_prices(spec: OptionSpec, step: StepParams, n_steps: int) -> np.ndarray:
    """The 4N+1 terminal prices S^(j) = u^(4N+1-j) d^(j-1) S0, decreasing in j."""
    if n_steps < 1:
        raise ParameterError(f"n_steps must be >= 1, got {n_steps}")
    j = np.arange(1, 4 * n_steps + 2)
    logs = (
        math.log(spec.spot)
        + n_steps * step.b_step
        + (4 * n_steps + 2 - 2 * j) * step.alpha
    )
    if float(logs.max()) > _MAX_LOG_PRICE:
        raise EvaluationError(
            f"terminal log-price {logs.max():.1f} would overflow; "
            "reduce n_steps * alpha"
        )
    return np.exp(logs)


def _level_log_prices(spec: OptionSpec, step: StepParams, n: int) -> np.ndarray:
    k = np.arange(4 * n + 1)
    return math.log(spec.spot) + n * step.b_step + (4 * n - 2 * k) * step.alpha


def price_lattice(spec: OptionSpec, params: VgParams, cfg: LatticeConfig) -> float:
    """Backward-induction lattice price of a European or American option.

    Each level keeps the 4n+1 recombined node values; the value at node k is
    the discounted probability-weighted combination of its five successors,
    and American styles take the maximum with intrinsic value at every node.
    """
    horizon = cfg.T - cfg.t0
    if abs(horizon - spec.maturity) > 1e-9 * max(1.0, spec.maturity):
        raise ParameterError(
            f"lattice horizon {horizon} must equal the option maturity {spec.maturity}"
        )
    dt = cfg.dt
    c_step = cumulants(params, dt)
    probs = transition_probabilities(c_step).as_array()
    alpha = step_scale(c_step)
    omega = martingale_correction(params)
    b = params.r + omega + params.theta
    step = up_down_factors(b, dt, alpha)

    n = cfg.n_steps
    values = spec.payoff(np.exp(_check_log_range(_level_log_prices(spec, step, n))))
    discount = math.exp(-params.r * dt)
    p1, p2, p3, p4, p5 = probs
    for level in range(n - 1, -1, -1):
        values = discount * (
            p1 * values[:-4]
            + p2 * values[1:-3]
            + p3 * values[2:-2]
            + p4 * values[3:-1]
            + p5 * values[4:]
        )
        if spec.is_american:
            level_prices = np.exp(_level_log_prices(spec, step, level))
            np.maximum(values, spec.payoff(level_prices), out=values)
    return float(values[0])


def _check_log_range(logs: np.ndarray) -> np.ndarray:
    if float(logs.max()) > _MAX_LOG_PRICE:
        raise EvaluationError(
            f"lattice log-price {logs.max():.1f} would overflow; reduce n_steps * alpha"
        )
    return logs


def binomial_bs_price(spec: OptionSpec, sigma_bs: float, r: float, n_steps: int) -> float:
    """Cox-Ross-Rubinstein binomial price, the Black-Scholes baseline.

    u = exp(sigma sqrt(dt)), d = 1/u, risk-neutral p = (e^{r dt} - d)/(u - d).
    Supports European and American exercise via the same backward sweep.
    """
    if not sigma_bs > 0.0:
        raise ParameterError(f"sigma_bs must be > 0, got {sigma_bs}")
    if n_steps < 1:
        raise ParameterError(f"n_steps must be >= 1, got {n_steps}")
    dt = spec.maturity / n_steps
    width = sigma_bs * math.sqrt(dt)
    u = math.exp(width)
    d = 1.0 / u
    p = (math.exp(r * dt) - d) / (u - d)
    if not 0.0 < p < 1.0:
        raise ParameterError(f"risk-neutral probability {p} outside (0, 1)")

    k = np.arange(n_steps + 1)
    prices = spec.spot * np.exp((n_steps - 2 * k) * width)
    values = spec.payoff(prices)
    discount = math.exp(-r * dt)
    for level in range(n_steps - 1, -1, -1):
        values = discount * (p * values[:-1] + (1.0 - p) * values[1:])
        if spec.is_american:
            level_prices = spec.spot * np.exp((level - 2 * np.arange(level + 1)) * width)
            np.maximum(values, spec.payoff(level_prices), out=values)
    return float(values[0])
