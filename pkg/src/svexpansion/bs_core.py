# -*- coding: utf-8 -*-

"""Black-Scholes primitives in total-variance parametrization.

Prices are undiscounted (zero interest rates) and parametrized by the
total variance ``t = sigma**2 * T`` instead of volatility and maturity.

SPDX-License-Identifier: MIT
"""

import logging
from collections import namedtuple
from math import pi
from math import sqrt

import numpy as np
from scipy import special

from svexpansion.errors import ArbitrageBoundsError
from svexpansion.errors import DomainError
from svexpansion.errors import NumericalError

_INV_SQRT_2PI = 1.0 / sqrt(2.0 * pi)


class BsQuote(namedtuple("BsQuote", ["spot", "strike", "total_variance"])):
    """Spot, strike and total variance of a European option.

    Examples
    --------
    >>> q = BsQuote(100.0, 100.0, 0.04)
    >>> q.strike
    100.0
    >>> BsQuote(100.0, -1.0, 0.04)
    Traceback (most recent call last):
    ...
    svexpansion.errors.DomainError: strike must be positive, got -1.0
    """

    __slots__ = ()

    def __new__(cls, spot, strike, total_variance):
        if not spot > 0:
            raise DomainError(f"spot must be positive, got {spot!r}")
        if not strike > 0:
            raise DomainError(f"strike must be positive, got {strike!r}")
        if not total_variance >= 0:
            raise DomainError(
                "total variance must be nonnegative, got "
                f"{total_variance!r}"
            )
        return super().__new__(
            cls, float(spot), float(strike), float(total_variance)
        )

    def with_variance(self, total_variance):
        return BsQuote(self.spot, self.strike, total_variance)


def norm_pdf(x):
    """Standard normal density, vectorized over numpy arrays."""
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def norm_cdf(x):
    """Standard normal distribution function.

    Evaluated through the complementary error function, which keeps the
    absolute error at the level of double rounding in both tails.

    >>> float(norm_cdf(0.0))
    0.5
    >>> float(norm_cdf(40.0))
    1.0
    """
    x = np.asarray(x, dtype=float)
    return 0.5 * special.erfc(-x / sqrt(2.0))


def d_pm(quote):
    """Return ``(d_plus, d_minus)`` of a quote with positive total variance.

    >>> d_plus, d_minus = d_pm(BsQuote(100.0, 100.0, 0.04))
    >>> round(d_plus, 12), round(d_minus, 12)
    (0.1, -0.1)
    """
    t = quote.total_variance
    if not t > 0:
        raise DomainError(
            f"d_+/d_- need a positive total variance, got {t!r}"
        )
    root_t = sqrt(t)
    log_moneyness = np.log(quote.spot / quote.strike)
    return (
        float((log_moneyness + 0.5 * t) / root_t),
        float((log_moneyness - 0.5 * t) / root_t),
    )


def put_price(quote):
    """Undiscounted put price ``K Phi(-d_-) - s Phi(-d_+)``.

    At zero total variance the payoff ``(K - s)_+`` is returned directly.
    """
    if quote.total_variance == 0:
        return max(quote.strike - quote.spot, 0.0)
    d_plus, d_minus = d_pm(quote)
    return float(
        quote.strike * norm_cdf(-d_minus) - quote.spot * norm_cdf(-d_plus)
    )


def call_price(quote):
    """Undiscounted call price from put-call parity."""
    return put_price(quote) + quote.spot - quote.strike


def digital_put_price(quote):
    """Probability ``P[S_T < K]`` under Black-Scholes, i.e. ``Phi(-d_-)``."""
    if quote.total_variance == 0:
        return 1.0 if quote.spot < quote.strike else 0.0
    return float(norm_cdf(-d_pm(quote)[1]))


def dp_dt(quote):
    """Derivative of the put price in total variance.

    Returns ``K phi(-d_-) / (2 sqrt(t))``, which equals
    ``s phi(-d_+) / (2 sqrt(t))``.
    """
    t = quote.total_variance
    if not t > 0:
        raise DomainError(
            f"dp/dt needs a positive total variance, got {t!r}"
        )
    d_minus = d_pm(quote)[1]
    return float(quote.strike * norm_pdf(-d_minus) / (2.0 * sqrt(t)))


def implied_total_variance(
    price, spot, strike, initial_guess=0.25, rel_tol=1e-12, max_iter=200
):
    """Invert :func:`put_price` for the total variance.

    A safeguarded Newton iteration in total variance: the derivative is
    :func:`dp_dt`, a bracket ``[lo, hi]`` is kept from the sign of the
    residual and any Newton step leaving the bracket or failing to halve
    the previous step is replaced by bisection. The iteration stops once
    both the price residual and the Newton step relative to ``t`` are
    within tolerance, and one last Newton correction is applied.

    Parameters
    ----------
    price : float
        Undiscounted put price, strictly inside ``((K - s)_+, K)``.
    spot, strike : float
        Positive spot and strike.
    initial_guess : float
        Starting total variance.
    rel_tol : float
        Required price residual relative to the strike and Newton step
        relative to the total variance.
    max_iter : int
        Iteration cap; exceeding it raises :class:`NumericalError`.

    Returns
    -------
    float
        Total variance ``t*`` with
        ``|put_price(s, K, t*) - price| <= rel_tol * K``.

    Examples
    --------
    >>> p = put_price(BsQuote(100.0, 100.0, 0.04))
    >>> round(implied_total_variance(p, 100.0, 100.0), 12)
    0.04
    """
    quote = BsQuote(spot, strike, 0.0)
    lower = max(strike - spot, 0.0)
    upper = float(strike)
    if not lower < price < upper:
        raise ArbitrageBoundsError(price, lower, upper)

    def residual(t):
        return put_price(quote.with_variance(t)) - price

    lo, hi = 0.0, max(2.0 * initial_guess, 1.0)
    for _ in range(max_iter):
        if residual(hi) >= 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalError(
            f"No upper bracket for put price {price!r} "
            f"(s={spot!r}, K={strike!r}) below t={hi!r}."
        )

    t = initial_guess if lo < initial_guess < hi else 0.5 * (lo + hi)
    tolerance = rel_tol * strike
    previous_step = hi - lo
    for iteration in range(max_iter):
        r = residual(t)
        if r == 0:
            return t
        if r < 0:
            lo = t
        else:
            hi = t
        slope = dp_dt(quote.with_variance(t))
        step = r / slope if slope > 0 else np.inf
        candidate = t - step
        # far from the money the residual is tiny long before t is right
        if abs(r) <= tolerance and abs(step) <= rel_tol * t:
            logging.debug(
                "Implied total variance converged after %d iterations.",
                iteration + 1,
            )
            return candidate if lo <= candidate <= hi else t
        if not lo < candidate < hi or abs(step) > 0.5 * abs(previous_step):
            candidate = 0.5 * (lo + hi)
        previous_step = t - candidate
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            # price noise exceeds the remaining Newton step
            if abs(r) <= tolerance:
                return t
            break
        t = candidate
    raise NumericalError(
        f"Implied total variance did not converge for put price "
        f"{price!r} (s={spot!r}, K={strike!r}); last iterate t={t!r}, "
        f"bracket [{lo!r}, {hi!r}]."
    )
