# -*- coding: utf-8 -*-

"""Volterra kernels driving the log-variance of Bergomi-type models.

Every kernel is written as ``k(t) = t**exponent * smooth_part(t)`` so the
quadrature code can remove the algebraic singularity of rough kernels.

SPDX-License-Identifier: MIT
"""

import numpy as np

from svexpansion.errors import DomainError

REFINEMENT = 8


class Kernel:
    """Abstract Volterra kernel.

    Users should not instantiate this but one of :class:`Exponential`,
    :class:`Power` or :class:`Tabulated`.

    Attributes
    ----------
    kind : str
        Name of the kernel type in configuration documents.
    exponent : float
        Exponent of the algebraic factor ``t**exponent``, ``0`` for
        kernels that are bounded at the origin.
    """

    kind = None
    exponent = 0.0

    def value(self, t):
        """Evaluate the kernel at ``t > 0`` (vectorized)."""
        t = np.asarray(t, dtype=float)
        return t**self.exponent * self.smooth_part(t)

    def smooth_part(self, t):
        raise NotImplementedError

    def weighted_mass(self, horizon):
        """Closed form of ``int_0^T (T - u) k(u) du`` or `None`."""
        return None

    @property
    def is_singular(self):
        return self.exponent < 0

    def knots(self):
        """Abscissae where the kernel has kinks."""
        return ()

    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self))

    def __repr__(self):
        params = ", ".join(
            "{}={!r}".format(k, v)
            for k, v in self.to_dict().items()
            if k != "type"
        )
        return "<{0.__module__}.{0.__name__}: {1}>".format(type(self), params)


class Exponential(Kernel):
    """Bergomi kernel ``k(t) = a exp(-b t)`` with ``a, b > 0``."""

    kind = "exponential"

    def __init__(self, a, b):
        if not (a > 0 and b > 0):
            raise DomainError(
                "Exponential kernel needs a > 0 and b > 0, "
                f"got a={a!r}, b={b!r}."
            )
        self.a = float(a)
        self.b = float(b)

    def smooth_part(self, t):
        return self.a * np.exp(-self.b * np.asarray(t, dtype=float))

    def weighted_mass(self, horizon):
        a, b, T = self.a, self.b, horizon
        return a / b * (T + np.expm1(-b * T) / b)

    def to_dict(self):
        return {"type": self.kind, "a": self.a, "b": self.b}


class Power(Kernel):
    """Rough Bergomi kernel ``k(t) = a t**(H - 1/2)``, ``0 < H <= 1/2``."""

    kind = "power"

    def __init__(self, a, H):
        if not a > 0:
            raise DomainError(f"Power kernel needs a > 0, got a={a!r}.")
        if not 0 < H <= 0.5:
            raise DomainError(
                "Power kernel t**(H - 1/2) is locally square integrable "
                f"only for H > 0; H must lie in (0, 1/2], got H={H!r}."
            )
        self.a = float(a)
        self.H = float(H)
        self.exponent = self.H - 0.5

    def smooth_part(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.a)

    def weighted_mass(self, horizon):
        H = self.H
        return (
            self.a * horizon ** (H + 1.5) / ((H + 0.5) * (H + 1.5))
        )

    def to_dict(self):
        return {"type": self.kind, "a": self.a, "H": self.H}


class Tabulated(Kernel):
    """Kernel given on a grid, linearly interpolated.

    Outside the grid the first and last values are continued flat.

    Parameters
    ----------
    times : sequence of float
        Strictly increasing, nonnegative abscissae.
    values : sequence of float
        Finite kernel values at `times`.
    """

    kind = "tabulated"

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise DomainError(
                "Tabulated kernel needs matching 1d `times` and `values` "
                f"with at least two points, got shapes {times.shape} and "
                f"{values.shape}."
            )
        if times[0] < 0 or np.any(np.diff(times) <= 0):
            raise DomainError(
                "Tabulated kernel `times` must be nonnegative and strictly "
                f"increasing, got {times.tolist()!r}."
            )
        if not np.all(np.isfinite(values)):
            raise DomainError(
                f"Tabulated kernel values must be finite, got "
                f"{values.tolist()!r}."
            )
        self.times = times
        self.values = values

    def smooth_part(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.values)

    def knots(self):
        return tuple(self.times)

    def refined_grid(self, lo, hi):
        """Kernel grid refined ``REFINEMENT`` times, clipped to [lo, hi]."""
        fine = np.concatenate(
            [
                np.linspace(left, right, REFINEMENT + 1)[:-1]
                for left, right in zip(self.times[:-1], self.times[1:])
            ]
            + [self.times[-1:]]
        )
        inside = fine[(fine > lo) & (fine < hi)]
        return np.concatenate([[lo], inside, [hi]])

    def to_dict(self):
        return {
            "type": self.kind,
            "times": self.times.tolist(),
            "values": self.values.tolist(),
        }


KERNEL_TYPES = {k.kind: k for k in (Exponential, Power, Tabulated)}
