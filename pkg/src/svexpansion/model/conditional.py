# -*- coding: utf-8 -*-

"""Conditional means ``x -> E[Y | X = x]`` of the limit pair ``(X, Y)``.

The expansion only sees the limit law through this function and
through the product ``g(x) = E[Y | X = x] phi(x)`` with the standard
normal density ``phi``, whose first two derivatives enter the expanded
density.

SPDX-License-Identifier: MIT
"""

import numpy as np

from svexpansion.bs_core import norm_pdf
from svexpansion.errors import DomainError

BOUNDARY_POINT = 10.0
BOUNDARY_TOLERANCE = 1e-12
DIFFERENCE_STEP = 1e-5


class ConditionalMean:
    """Abstract conditional mean ``m(x)`` with derivatives ``m'``, ``m''``."""

    def m(self, x):
        raise NotImplementedError

    def dm(self, x):
        raise NotImplementedError

    def d2m(self, x):
        raise NotImplementedError

    def product(self, x):
        """``g(x) = m(x) phi(x)``."""
        return self.m(x) * norm_pdf(x)

    def product_d1(self, x):
        """``g'(x) = (m'(x) - x m(x)) phi(x)``."""
        x = np.asarray(x, dtype=float)
        return (self.dm(x) - x * self.m(x)) * norm_pdf(x)

    def product_d2(self, x):
        """``g''(x) = (m'' - 2 x m' + (x**2 - 1) m) phi(x)``."""
        x = np.asarray(x, dtype=float)
        return (
            self.d2m(x) - 2.0 * x * self.dm(x) + (x * x - 1.0) * self.m(x)
        ) * norm_pdf(x)


class Affine(ConditionalMean):
    """Gaussian limit: ``E[Y | X = x] = E[XY] x``.

    Parameters
    ----------
    exy : float
        The limit covariance ``E[XY]``.
    """

    def __init__(self, exy):
        self.exy = float(exy)

    def m(self, x):
        return self.exy * np.asarray(x, dtype=float)

    def dm(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.exy)

    def d2m(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def __repr__(self):
        return "<{0.__module__}.{0.__name__}: exy={1!r}>".format(
            type(self), self.exy
        )


class Custom(ConditionalMean):
    """A user supplied conditional mean for non-Gaussian limits.

    Missing derivatives are computed by central differences with step
    ``1e-5``. On construction ``m phi`` and ``(m phi)'`` are checked to
    vanish at ``x = +-10``, which is how the expansion's boundary
    condition is enforced.

    Parameters
    ----------
    m : callable
        Vectorized ``x -> E[Y | X = x]``.
    dm, d2m : callable, optional
        Its first and second derivative.

    Raises
    ------
    DomainError
        If the boundary condition fails.
    """

    def __init__(self, m, dm=None, d2m=None):
        self._m = m
        self._dm = dm
        self._d2m = d2m
        for x in (-BOUNDARY_POINT, BOUNDARY_POINT):
            g = float(self.product(x))
            dg = float(self.product_d1(x))
            if not (
                abs(g) < BOUNDARY_TOLERANCE and abs(dg) < BOUNDARY_TOLERANCE
            ):
                raise DomainError(
                    "\n\nCustom conditional mean violates the boundary "
                    "condition m(x) phi(x) -> 0, (m phi)'(x) -> 0.\n"
                    f"    x          : {x!r}\n"
                    f"    m phi      : {g!r}\n"
                    f"    (m phi)'   : {dg!r}\n"
                    f"Both must be below {BOUNDARY_TOLERANCE!r}."
                )

    def m(self, x):
        return np.asarray(self._m(np.asarray(x, dtype=float)), dtype=float)

    def dm(self, x):
        x = np.asarray(x, dtype=float)
        if self._dm is not None:
            return np.asarray(self._dm(x), dtype=float)
        h = DIFFERENCE_STEP
        return (self.m(x + h) - self.m(x - h)) / (2.0 * h)

    def d2m(self, x):
        x = np.asarray(x, dtype=float)
        if self._d2m is not None:
            return np.asarray(self._d2m(x), dtype=float)
        h = DIFFERENCE_STEP
        return (self.dm(x + h) - self.dm(x - h)) / (2.0 * h)

    def __repr__(self):
        return "<{0.__module__}.{0.__name__}: {1!r}>".format(
            type(self), self._m
        )
