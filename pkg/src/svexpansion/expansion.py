# -*- coding: utf-8 -*-

"""First-order martingale expansion of prices, smiles and skews.

For a bounded payoff ``f``

    E[f(S_T)] = int f(S_0 exp(sqrt(v) x - v / 2)) phi_eps(x) dx + o(eps)

with the expanded (signed) density

    phi_eps = phi + eps / (2 sqrt(v)) g' + eps / (2 v) g'',
    g(x) = E[Y | X = x] phi(x).

Puts and digitals have closed forms obtained by integrating by parts;
:func:`expected_payoff` integrates any bounded payoff numerically and
serves as an independent check of them.

SPDX-License-Identifier: MIT
"""

import logging
import warnings
from collections import namedtuple
from math import exp
from math import log
from math import sqrt

import numpy as np

from svexpansion import quadrature
from svexpansion.bs_core import BsQuote
from svexpansion.bs_core import d_pm
from svexpansion.bs_core import dp_dt
from svexpansion.bs_core import norm_cdf
from svexpansion.bs_core import norm_pdf
from svexpansion.bs_core import put_price
from svexpansion.errors import DomainError
from svexpansion.model.conditional import Affine

PutExpansionReport = namedtuple(
    "PutExpansionReport",
    [
        "leading",
        "correction",
        "form_a",
        "form_b",
        "form_c",
        "equivalent_variance",
    ],
)
PutExpansionReport.__doc__ = """Put price at first order, in three forms.

``form_a`` adds the correction to the Black-Scholes price, ``form_b``
writes it through ``dp/dt`` and ``form_c`` prices at the shifted total
variance ``equivalent_variance``. ``form_a`` and ``form_b`` agree up to
rounding, ``form_c`` differs from them at ``O(eps**2)``.
"""

SmilePoint = namedtuple(
    "SmilePoint", ["strike", "log_moneyness", "implied_total_variance"]
)

DIAGNOSTIC_POINTS = 4801


class ExpandedDensity:
    """The signed density ``phi_eps`` of the normalized log-price.

    It integrates to one and preserves the forward, but for large
    ``eps |E[XY]|`` it dips below zero in the tails. No clamping is
    applied; see :meth:`diagnostics`.

    Parameters
    ----------
    inputs : :class:`~svexpansion.model.spec.ExpansionInputs`
    cond_mean : :class:`~svexpansion.model.conditional.ConditionalMean`

    Examples
    --------
    >>> from svexpansion.model.spec import ExpansionInputs
    >>> inputs = ExpansionInputs(100.0, 0.04, -0.0291667, 0.0)
    >>> d = ExpandedDensity(inputs, inputs.conditional_mean())
    >>> round(float(d(0.0)), 12)
    0.398942280401
    """

    def __init__(self, inputs, cond_mean):
        self.inputs = inputs
        self.cond_mean = cond_mean
        self._first = inputs.eps / (2.0 * sqrt(inputs.v_eps))
        self._second = inputs.eps / (2.0 * inputs.v_eps)

    def __call__(self, x):
        if isinstance(self.cond_mean, Affine):
            return self._hermite(x)
        return self.evaluate_by_derivatives(x)

    def _hermite(self, x):
        x = np.asarray(x, dtype=float)
        c = self.cond_mean.exy
        return norm_pdf(x) * (
            1.0
            + self._first * c * (1.0 - x * x)
            + self._second * c * (x**3 - 3.0 * x)
        )

    def evaluate_by_derivatives(self, x):
        """Evaluate from the derivatives of ``g = m phi``."""
        x = np.asarray(x, dtype=float)
        return (
            norm_pdf(x)
            + self._first * self.cond_mean.product_d1(x)
            + self._second * self.cond_mean.product_d2(x)
        )

    def diagnostics(self):
        """Minimum of the density over ``|x| <= 12`` and where it occurs.

        A `RuntimeWarning` is issued when the minimum is negative.
        """
        bound = quadrature.GAUSSIAN_BOUND
        grid = np.linspace(-bound, bound, DIAGNOSTIC_POINTS)
        values = self(grid)
        index = int(np.argmin(values))
        minimum, where = float(values[index]), float(grid[index])
        if minimum < 0:
            warnings.warn(
                f"Expanded density is negative (min {minimum!r} at "
                f"x={where!r}); it is a signed measure at this eps.",
                RuntimeWarning,
            )
        return minimum, where


def expanded_density_at(d, x):
    return d(x)


def density_diagnostics(d):
    return d.diagnostics()


def _standardized(inputs, strike):
    """``x`` with ``S_0 exp(sqrt(v) x - v / 2) = strike``, i.e. ``-d_-``."""
    v = inputs.v_eps
    return (log(strike / inputs.spot) + 0.5 * v) / sqrt(v)


def expected_payoff(payoff, inputs, cond_mean, kinks=(), rel_tol=1e-9):
    """Expected payoff at first order by quadrature against ``phi_eps``.

    Parameters
    ----------
    payoff : callable
        Bounded, vectorized function of the terminal price. Boundedness
        is the caller's responsibility; price calls through parity.
    inputs : :class:`~svexpansion.model.spec.ExpansionInputs`
    cond_mean : :class:`~svexpansion.model.conditional.ConditionalMean`
    kinks : iterable of float
        Terminal prices where the payoff has kinks or jumps, typically
        the strike.
    rel_tol : float
        Relative accuracy of the quadrature.
    """
    density = ExpandedDensity(inputs, cond_mean)
    spot, v = inputs.spot, inputs.v_eps
    root_v = sqrt(v)

    def integrand(x):
        return payoff(spot * np.exp(root_v * x - 0.5 * v))

    result = quadrature.integrate_gaussian_weighted(
        integrand,
        rel_tol=rel_tol,
        kinks=[_standardized(inputs, k) for k in kinks],
        weight=density,
    )
    return result.value


def put_expansion(inputs, cond_mean, strike):
    """Put price at first order in ``eps``.

    >>> from svexpansion.model.spec import ExpansionInputs
    >>> inputs = ExpansionInputs(100.0, 0.04, -0.7 * 0.04 / 0.96, 0.2)
    >>> report = put_expansion(inputs, inputs.conditional_mean(), 100.0)
    >>> round(report.correction, 5)
    -0.05789
    """
    if not strike > 0:
        raise DomainError(f"strike must be positive, got {strike!r}")
    v, eps = inputs.v_eps, inputs.eps
    quote = BsQuote(inputs.spot, strike, v)
    x = -d_pm(quote)[1]
    m = float(cond_mean.m(x))
    leading = put_price(quote)
    correction = eps / (2.0 * sqrt(v)) * strike * m * float(norm_pdf(x))
    equivalent = v + eps * m
    return PutExpansionReport(
        leading=leading,
        correction=correction,
        form_a=leading + correction,
        form_b=leading + eps * dp_dt(quote) * m,
        form_c=put_price(quote.with_variance(equivalent)),
        equivalent_variance=equivalent,
    )


def call_expansion(inputs, cond_mean, strike):
    """Call price at first order, from the put through parity."""
    report = put_expansion(inputs, cond_mean, strike)
    return report.form_a + inputs.spot - strike


def digital_expansion(inputs, cond_mean, strike):
    """``P[S_T < K]`` at first order.

    Integrating ``phi_eps`` up to ``x* = -d_-`` gives
    ``Phi(x*) + eps / (2 sqrt(v)) g(x*) + eps / (2 v) g'(x*)``.
    """
    if not strike > 0:
        raise DomainError(f"strike must be positive, got {strike!r}")
    v, eps = inputs.v_eps, inputs.eps
    x = _standardized(inputs, strike)
    return float(
        norm_cdf(x)
        + eps / (2.0 * sqrt(v)) * cond_mean.product(x)
        + eps / (2.0 * v) * cond_mean.product_d1(x)
    )


def implied_variance_expansion(inputs, cond_mean, strike):
    """Implied total variance ``v + eps E[Y | X = -d_-(S_0, v)]``."""
    if not strike > 0:
        raise DomainError(f"strike must be positive, got {strike!r}")
    x = _standardized(inputs, strike)
    return SmilePoint(
        strike=float(strike),
        log_moneyness=log(strike / inputs.spot),
        implied_total_variance=inputs.v_eps
        + inputs.eps * float(cond_mean.m(x)),
    )


def smile(inputs, cond_mean, strikes):
    """:func:`implied_variance_expansion` over `strikes`, order preserved."""
    return [implied_variance_expansion(inputs, cond_mean, k) for k in strikes]


def skew_atm(inputs, cond_mean):
    """Skew ``d sqrt(v_hat) / dk = eps E[XY] / (2 v)`` of an affine mean.

    >>> from svexpansion.model.spec import ExpansionInputs
    >>> inputs = ExpansionInputs(100.0, 0.04, -0.7 * 0.04 / 0.96, 0.2)
    >>> round(skew_atm(inputs, inputs.conditional_mean()), 7)
    -0.0729167
    """
    if not isinstance(cond_mean, Affine):
        raise DomainError(
            "skew_atm needs an affine conditional mean, got "
            f"{cond_mean!r}; use skew_generic instead."
        )
    return inputs.eps * cond_mean.exy / (2.0 * inputs.v_eps)


def skew_generic(inputs, cond_mean, k):
    """Skew at log-moneyness `k` for any differentiable conditional mean.

    ``(eps / (2 sqrt(v))) d/dk E[Y | X = k / sqrt(v) + sqrt(v) / 2]``.
    """
    root_v = sqrt(inputs.v_eps)
    x = k / root_v + 0.5 * root_v
    return float(
        inputs.eps / (2.0 * root_v) * cond_mean.dm(x) / root_v
    )


def skew_from_digital(inputs, cond_mean, k):
    """Skew through the identity linking it to the digital price.

    ``d sqrt(v_hat) / dk = (P[S_T < K] - Phi(-d_-)) / phi(-d_-)`` with
    ``d_-`` taken at the implied total variance ``v_hat(K)``, both sides
    evaluated at first order. Agrees with :func:`skew_generic` up to
    ``O(eps**2)``.
    """
    strike = inputs.spot * exp(k)
    probability = digital_expansion(inputs, cond_mean, strike)
    v_hat = implied_variance_expansion(
        inputs, cond_mean, strike
    ).implied_total_variance
    x = -d_pm(BsQuote(inputs.spot, strike, v_hat))[1]
    logging.debug(
        "Digital skew at k=%r: P=%r, v_hat=%r.", k, probability, v_hat
    )
    return float((probability - norm_cdf(x)) / norm_pdf(x))
