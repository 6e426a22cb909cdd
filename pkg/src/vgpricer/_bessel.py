"""Modified Bessel function of the second kind, K_nu(x).

Two classic regimes, stitched at x = 2:

* x <= 2: Temme's power series for K_mu and K_{mu+1} with |mu| <= 1/2.
* x > 2:  Steed's continued fraction (CF2) for the same pair, evaluated in
  e^x-scaled form so large arguments neither under- nor overflow early.

Orders above 1/2 are reached by the upward three-term recurrence
K_{nu+1}(x) = (2 nu / x) K_nu(x) + K_{nu-1}(x), which is stable because K
grows with the order.  Overflow saturates gracefully to ``inf`` instead of
raising; ``scaled=True`` returns e^x * K_nu(x) for work deep in the tails.
"""

from __future__ import annotations

import math

from .errors import ParameterError

_EPS = 1e-17
_MAX_ITER = 20000
_EULER_GAMMA = 0.5772156649015328606
# z^3 coefficient of 1/Gamma(1+z); drives the small-|mu| limit of _gam1.
_RGAMMA_A3 = -0.0420026350340952355


def _gam1(mu: float) -> float:
    """(1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), continuous through mu = 0."""
    if abs(mu) < 1e-3:
        # Direct evaluation cancels catastrophically near mu = 0.
        return -_EULER_GAMMA - _RGAMMA_A3 * mu * mu
    return (1.0 / math.gamma(1.0 - mu) - 1.0 / math.gamma(1.0 + mu)) / (2.0 * mu)


def _gam2(mu: float) -> float:
    """(1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2."""
    return 0.5 * (1.0 / math.gamma(1.0 - mu) + 1.0 / math.gamma(1.0 + mu))


def _temme_series(mu: float, x: float, scaled: bool) -> tuple[float, float]:
    """(K_mu(x), K_{mu+1}(x)) for x <= 2 and |mu| <= 1/2 (Temme 1975)."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if pimu == 0.0 else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if e == 0.0 else math.sinh(e) / e
    ff = fact * (_gam1(mu) * math.cosh(e) + _gam2(mu) * fact2 * d)
    total = ff
    e_exp = math.exp(e)  # (x/2)^(-mu)
    p = 0.5 * e_exp * math.gamma(1.0 + mu)
    q = 0.5 / e_exp * math.gamma(1.0 - mu)
    c = 1.0
    x2sq = x2 * x2
    total1 = p
    for k in range(1, _MAX_ITER):
        ff = (k * ff + p + q) / (k * k - mu * mu)
        c *= x2sq / k
        p /= k - mu
        q /= k + mu
        delta = c * ff
        total += delta
        total1 += c * (p - k * ff)
        if abs(delta) < abs(total) * _EPS:
            break
    if scaled:
        ex = math.exp(x)
        return total * ex, total1 * (2.0 / x) * ex
    return total, total1 * (2.0 / x)


def _steed_cf2(mu: float, x: float, scaled: bool) -> tuple[float, float]:
    """(K_mu(x), K_{mu+1}(x)) for x > 2 via Steed's continued fraction."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    if not scaled:
        kmu *= math.exp(-x)
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def bessel_k(nu: float, x: float, scaled: bool = False) -> float:
    """Modified Bessel function of the second kind K_nu(x).

    Even in the order (K_nu = K_{-nu}) and strictly positive on x > 0.
    ``scaled=True`` returns e^x * K_nu(x).  Overflow (small x with large
    order) saturates to ``inf``; underflow (very large x) flushes to 0.0.
    """
    nu = float(nu)
    x = float(x)
    if not x > 0.0:
        raise ParameterError(f"bessel_k requires x > 0, got x={x}")
    nu = abs(nu)
    n = int(nu + 0.5)
    mu = nu - n  # in [-0.5, 0.5]
    if x <= 2.0:
        kmu, kmu1 = _temme_series(mu, x, scaled)
    else:
        kmu, kmu1 = _steed_cf2(mu, x, scaled)
    if math.isinf(kmu) or math.isinf(kmu1):
        return math.inf
    for i in range(n):
        nxt = (2.0 * (mu + i + 1) / x) * kmu1 + kmu
        if math.isinf(nxt):
            return math.inf
        kmu, kmu1 = kmu1, nxt
    return kmu
