# -*- coding: utf-8 -*-

"""Adaptive Gauss-Kronrod quadrature on top of QUADPACK.

Integrands are called with one abscissa at a time and may return a
float or a zero-dimensional array. Nested integrals wrap the inner
integral in :func:`numpy.vectorize`.

SPDX-License-Identifier: MIT
"""

import logging
from collections import namedtuple

import numpy as np
from scipy import integrate as sp_integrate

from svexpansion.bs_core import norm_pdf
from svexpansion.errors import DomainError
from svexpansion.errors import QuadratureError

QuadResult = namedtuple(
    "QuadResult", ["value", "abs_error_estimate", "subdivisions"]
)

MAX_PANELS = 100000
GAUSSIAN_BOUND = 12.0

# QUADPACK refuses relative tolerances below this without an absolute one
_MIN_REL_TOL = 50.0 * np.finfo(float).eps


def _breakpoints(a, b, points):
    points = () if points is None else np.ravel(points)
    return sorted({float(p) for p in points if a < p < b})


def integrate(f, a, b, rel_tol=1e-10, abs_tol=0.0, points=None):
    """Integrate ``f`` over ``[a, b]`` by adaptive bisection of panels.

    :func:`scipy.integrate.quad` halves the panel with the largest
    21-point Gauss-Kronrod error estimate until the summed estimate
    drops below ``max(abs_tol, rel_tol * |value|)``. Rounding limited
    results are accepted as they are.

    Parameters
    ----------
    f : callable
        Integrand of one float.
    a, b : float
        Integration bounds, ``a <= b``.
    rel_tol, abs_tol : float
        Requested relative and absolute accuracy. Relative tolerances
        below ``50`` machine epsilons are raised to that level.
    points : iterable of float, optional
        Abscissae where the integrand has kinks or jumps; they become
        initial panel boundaries.

    Returns
    -------
    QuadResult

    Raises
    ------
    QuadratureError
        If more than :data:`MAX_PANELS` panels are needed. The partial
        estimate is attached.

    Examples
    --------
    >>> r = integrate(lambda x: x ** 2, 0.0, 1.0)
    >>> round(r.value, 14)
    0.33333333333333
    """
    if b < a:
        raise DomainError(f"Integration bounds reversed: a={a!r} > b={b!r}.")
    if a == b:
        return QuadResult(0.0, 0.0, 0)

    def scalar(x):
        value = float(f(x))
        if not np.isfinite(value):
            raise DomainError(f"Integrand is not finite at x={x!r}.")
        return value

    inner = _breakpoints(a, b, points)
    out = sp_integrate.quad(
        scalar,
        a,
        b,
        epsabs=abs_tol,
        epsrel=max(rel_tol, _MIN_REL_TOL),
        limit=MAX_PANELS,
        points=inner or None,
        full_output=1,
    )
    value, error, info = out[:3]
    result = QuadResult(float(value), float(error), int(info["last"]))
    if result.subdivisions >= MAX_PANELS:
        raise QuadratureError(
            f"Quadrature on [{a!r}, {b!r}] exceeded {MAX_PANELS} "
            f"panels; estimate {value!r} +/- {error!r}.",
            partial=result,
        )
    if len(out) > 3:
        logging.debug("Quadrature on [%r, %r]: %s", a, b, out[3].strip())
    logging.debug(
        "Quadrature on [%r, %r] used %d panels.", a, b, result.subdivisions
    )
    return result


def integrate_algebraic_singularity(
    g, alpha, b, a=0.0, rel_tol=1e-10, abs_tol=0.0, points=None
):
    r"""Integrate ``(t - a)**alpha * g(t)`` over ``[a, b]`` for ``alpha > -1``.

    The substitution :math:`w = (t - a)^{\alpha + 1}` turns the integral
    into :math:`\frac{1}{\alpha + 1}\int_0^{(b-a)^{\alpha+1}}
    g(a + w^{1/(\alpha+1)})\,dw`, whose integrand is bounded.
    """
    if not alpha > -1:
        raise DomainError(
            f"(t - a)**alpha is not integrable at a for alpha={alpha!r}."
        )
    if b < a:
        raise DomainError(f"Integration bounds reversed: a={a!r} > b={b!r}.")
    power = alpha + 1.0

    def transformed(w):
        return g(a + w ** (1.0 / power))

    points = () if points is None else np.ravel(points)
    mapped = [(p - a) ** power for p in points if a < p < b]
    result = integrate(
        transformed,
        0.0,
        (b - a) ** power,
        rel_tol=rel_tol,
        abs_tol=abs_tol * power,
        points=mapped,
    )
    return QuadResult(
        result.value / power,
        result.abs_error_estimate / power,
        result.subdivisions,
    )


def integrate_power_singularity(
    g, H, b, a=0.0, rel_tol=1e-10, abs_tol=0.0, points=None
):
    """Integrate ``(t - a)**(H - 1/2) * g(t)`` over ``[a, b]``.

    This is the shape of every integral against a rough power-law kernel
    with Hurst parameter ``0 < H <= 1/2``.

    Examples
    --------
    >>> r = integrate_power_singularity(lambda t: 1.0, 0.1, 1.0)
    >>> round(r.value, 12)
    1.666666666667
    """
    if not 0 < H <= 0.5:
        raise DomainError(f"Hurst parameter must lie in (0, 1/2], got {H!r}")
    return integrate_algebraic_singularity(
        g,
        H - 0.5,
        b,
        a=a,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        points=points,
    )


def integrate_gaussian_weighted(
    h, rel_tol=1e-10, abs_tol=0.0, kinks=(), weight=norm_pdf, n_panels=8
):
    """Integrate ``h(x) * weight(x)`` over ``[-12, 12]``.

    The weight defaults to the standard normal density; the tail mass
    beyond ``|x| = 12`` is below ``1e-31`` and is dropped. The range
    starts out split into ``n_panels`` equal panels plus the declared
    ``kinks`` of ``h``.

    >>> r = integrate_gaussian_weighted(lambda x: x ** 2)
    >>> round(r.value, 10)
    1.0
    """
    bound = GAUSSIAN_BOUND
    grid = list(np.linspace(-bound, bound, n_panels + 1)[1:-1])

    def integrand(x):
        return h(x) * weight(x)

    return integrate(
        integrand,
        -bound,
        bound,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        points=grid + list(kinks),
    )
