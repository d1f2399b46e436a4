# -*- coding: utf-8 -*-

"""Bergomi-type model specifications and the inputs of the expansion.

The variance process is

    V_t = V_0(t) exp(eps sum_i int_0^t k_i(t - s) dW^i_s
                     - eps**2 / 2 sum_i int_0^t k_i(t - s)**2 ds),

with ``d<B, W^i> = rho_i dt`` against the Brownian motion ``B`` driving
the price. To first order in ``eps`` the expansion needs two numbers:
the base total variance ``v = int_0^T V_0(t) dt`` and the covariance
``E[XY]`` of the normalized limit pair.

SPDX-License-Identifier: MIT
"""

import logging
from collections import namedtuple
from math import sqrt

import numpy as np
from scipy import integrate as sp_integrate

from svexpansion import quadrature
from svexpansion.errors import DomainError
from svexpansion.model.conditional import Affine
from svexpansion.model.curves import ForwardVarianceCurve
from svexpansion.model.kernels import Kernel
from svexpansion.model.kernels import Tabulated

Factor = namedtuple("Factor", ["rho", "kernel"])


class ExpansionInputs(
    namedtuple("ExpansionInputs", ["spot", "v_eps", "exy", "eps"])
):
    """Everything the first-order expansion needs from a model.

    Parameters
    ----------
    spot : float
        Initial price ``S_0``.
    v_eps : float
        Base total variance, positive.
    exy : float
        Limit covariance ``E[XY]``.
    eps : float
        Volatility-of-volatility parameter, nonnegative.
    """

    __slots__ = ()

    def __new__(cls, spot, v_eps, exy, eps):
        if not spot > 0:
            raise DomainError(f"spot must be positive, got {spot!r}")
        if not v_eps > 0:
            raise DomainError(
                f"base total variance must be positive, got {v_eps!r}"
            )
        if not eps >= 0:
            raise DomainError(f"eps must be nonnegative, got {eps!r}")
        return super().__new__(
            cls, float(spot), float(v_eps), float(exy), float(eps)
        )

    def conditional_mean(self):
        """The Gaussian-limit conditional mean ``x -> E[XY] x``."""
        return Affine(self.exy)

    def with_eps(self, eps):
        return self._replace(eps=float(eps))


class ModelSpec:
    r"""A Bergomi-type stochastic volatility model.

    Parameters
    ----------
    spot : float
        Initial price ``S_0 > 0``.
    horizon : float
        Maturity ``T > 0`` in years.
    eps : float
        Volatility-of-volatility ``eps >= 0``; ``eps = 0`` is the
        Black-Scholes model with deterministic variance ``V_0``.
    factors : iterable of (float, :class:`Kernel`)
        Correlations ``rho_i`` and kernels ``k_i``; at least one, with
        :math:`\sum_i \rho_i^2 < 1`.
    curve : :class:`ForwardVarianceCurve`
        Forward variance curve covering ``[0, T]``.

    Examples
    --------
    >>> from svexpansion.model.curves import Flat
    >>> from svexpansion.model.kernels import Power
    >>> model = ModelSpec(100.0, 1.0, 0.2, [(-0.7, Power(1.0, 0.1))],
    ...                   Flat(0.04))
    >>> model.rho
    0.7
    >>> total_base_variance(model)
    0.04
    """

    def __init__(self, spot, horizon, eps, factors, curve):
        factors = [Factor(float(rho), kernel) for rho, kernel in factors]
        if not spot > 0:
            raise DomainError(f"spot must be positive, got {spot!r}")
        if not horizon > 0:
            raise DomainError(f"horizon must be positive, got {horizon!r}")
        if not eps >= 0:
            raise DomainError(f"eps must be nonnegative, got {eps!r}")
        if not factors:
            raise DomainError("A model needs at least one factor.")
        for f in factors:
            if not isinstance(f.kernel, Kernel):
                raise DomainError(
                    f"Factor kernel {f.kernel!r} is not a Kernel but of "
                    f"{type(f.kernel)}."
                )
        if not isinstance(curve, ForwardVarianceCurve):
            raise DomainError(
                f"{curve!r} is not a ForwardVarianceCurve but of "
                f"{type(curve)}."
            )
        if not curve.covers(horizon):
            raise DomainError(
                f"Forward variance curve {curve!r} does not cover "
                f"[0, {horizon!r}]."
            )
        rho_squared = sum(f.rho**2 for f in factors)
        if not rho_squared < 1:
            raise DomainError(
                "The aggregate correlation must lie in (-1, 1), got "
                f"sum(rho_i**2) = {rho_squared!r}."
            )
        self.spot = float(spot)
        self.horizon = float(horizon)
        self.eps = float(eps)
        self.factors = tuple(factors)
        self.curve = curve

    @property
    def rho(self):
        """Aggregate correlation ``sqrt(sum rho_i**2)``."""
        return sqrt(sum(f.rho**2 for f in self.factors))

    @property
    def n_factors(self):
        return len(self.factors)

    def with_eps(self, eps):
        """The same model with another volatility-of-volatility."""
        return ModelSpec(
            self.spot, self.horizon, eps, self.factors, self.curve
        )

    def with_curve(self, curve):
        return ModelSpec(
            self.spot, self.horizon, self.eps, self.factors, curve
        )

    def __repr__(self):
        return (
            "<{0.__module__}.{0.__name__}: spot={1.spot!r}, "
            "horizon={1.horizon!r}, eps={1.eps!r}, "
            "factors={1.factors!r}, curve={1.curve!r}>"
        ).format(type(self), self)


def total_base_variance(model):
    """``v = int_0^T V_0(t) dt``, exact for the supported curves."""
    return model.curve.integral(0.0, model.horizon)


def _inner_integral(kernel, curve, s, horizon, rel_tol):
    """``int_s^T V_0(u) k(u - s) du`` after substituting ``tau = u - s``."""
    width = horizon - s
    if width <= 0:
        return 0.0
    points = [p - s for p in curve.knots() if s < p < horizon]
    if isinstance(kernel, Tabulated):
        grid = np.union1d(kernel.refined_grid(0.0, width), points)
        integrand = curve.value(s + grid) * kernel.value(grid)
        return float(sp_integrate.trapezoid(integrand, grid))

    def smooth(tau):
        return curve.value(s + tau) * kernel.smooth_part(tau)

    result = quadrature.integrate_algebraic_singularity(
        smooth, kernel.exponent, width, rel_tol=rel_tol, points=points
    )
    return result.value


def cross_covariance(model, rel_tol=1e-9):
    r"""Limit covariance ``E[XY]`` by nested adaptive quadrature.

    .. math::

        E[XY] = v^{-1/2} \int_0^T \sqrt{V_0(s)} \int_s^T V_0(u)
                \sum_i \rho_i k_i(u - s)\,du\,ds

    The inner integrals are computed ten times tighter than `rel_tol`.
    """
    active = [f for f in model.factors if f.rho != 0]
    if not active:
        return 0.0
    curve, horizon = model.curve, model.horizon
    inner_tol = 0.1 * rel_tol

    def outer(s):
        inner = sum(
            f.rho * _inner_integral(f.kernel, curve, s, horizon, inner_tol)
            for f in active
        )
        return sqrt(float(curve.value(s))) * inner

    result = quadrature.integrate(
        np.vectorize(outer, otypes=[float]),
        0.0,
        horizon,
        rel_tol=rel_tol,
        points=curve.knots(),
    )
    logging.debug(
        "E[XY] quadrature: %r +/- %r on %d panels.",
        result.value,
        result.abs_error_estimate,
        result.subdivisions,
    )
    return result.value / sqrt(total_base_variance(model))


def cross_covariance_closed_form(model):
    """Closed form of :func:`cross_covariance` or `None`.

    Available for a flat curve with exponential and power kernels only,
    where ``E[XY] = v0 / sqrt(T) sum_i rho_i int_0^T (T - u) k_i(u) du``.
    """
    if model.curve.kind != "flat":
        return None
    masses = [f.kernel.weighted_mass(model.horizon) for f in model.factors]
    if any(m is None for m in masses):
        return None
    v0 = model.curve.v0
    return (
        v0
        / sqrt(model.horizon)
        * sum(f.rho * m for f, m in zip(model.factors, masses))
    )


def expansion_inputs(model, rel_tol=1e-9):
    """Bundle ``S_0``, ``v``, ``E[XY]`` and ``eps`` of a model."""
    return ExpansionInputs(
        model.spot,
        total_base_variance(model),
        cross_covariance(model, rel_tol=rel_tol),
        model.eps,
    )
