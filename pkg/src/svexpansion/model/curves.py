# -*- coding: utf-8 -*-

"""Forward variance curves ``t -> V_0(t) = E[V_t]``.

SPDX-License-Identifier: MIT
"""

import numpy as np

from svexpansion.errors import DomainError


class ForwardVarianceCurve:
    """Abstract deterministic, strictly positive forward variance curve."""

    kind = None

    def value(self, t):
        raise NotImplementedError

    def integral(self, lo, hi):
        """Exact ``int_lo^hi V_0(t) dt``."""
        raise NotImplementedError

    def knots(self):
        """Interior points where the curve jumps."""
        return ()

    def covers(self, horizon):
        return True

    def scaled(self, factor):
        """The curve multiplied by a positive constant."""
        raise NotImplementedError

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


class Flat(ForwardVarianceCurve):
    """Constant curve ``V_0(t) = v0``.

    >>> Flat(0.04).integral(0.0, 2.0)
    0.08
    """

    kind = "flat"

    def __init__(self, v0):
        if not v0 > 0:
            raise DomainError(
                f"Forward variance must be positive, got v0={v0!r}."
            )
        self.v0 = float(v0)

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.v0)

    def integral(self, lo, hi):
        return self.v0 * (hi - lo)

    def scaled(self, factor):
        return Flat(self.v0 * factor)

    def to_dict(self):
        return {"type": self.kind, "v0": self.v0}


class PiecewiseConstant(ForwardVarianceCurve):
    """Right-continuous step curve.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i + 1])``; the
    last value also holds at and beyond the final breakpoint.

    Parameters
    ----------
    breakpoints : sequence of float
        Strictly increasing, starting at 0, one more entry than `values`.
    values : sequence of float
        Positive levels.

    Examples
    --------
    >>> curve = PiecewiseConstant([0.0, 0.5, 1.0], [0.04, 0.09])
    >>> round(curve.integral(0.0, 1.0), 12)
    0.065
    """

    kind = "piecewise_constant"

    def __init__(self, breakpoints, values):
        breakpoints = np.asarray(breakpoints, dtype=float)
        values = np.asarray(values, dtype=float)
        if (
            breakpoints.ndim != 1
            or values.ndim != 1
            or breakpoints.size != values.size + 1
            or values.size < 1
        ):
            raise DomainError(
                "PiecewiseConstant needs one more breakpoint than values, "
                f"got {breakpoints.size} breakpoints and {values.size} "
                "values."
            )
        if breakpoints[0] != 0 or np.any(np.diff(breakpoints) <= 0):
            raise DomainError(
                "Breakpoints must start at 0 and increase strictly, got "
                f"{breakpoints.tolist()!r}."
            )
        if not np.all(values > 0):
            raise DomainError(
                f"Forward variance must be positive, got {values.tolist()!r}."
            )
        self.breakpoints = breakpoints
        self.values = values

    def value(self, t):
        t = np.asarray(t, dtype=float)
        index = np.searchsorted(self.breakpoints, t, side="right") - 1
        return self.values[np.clip(index, 0, self.values.size - 1)]

    def _cumulative(self, t):
        edges = np.minimum(self.breakpoints, t)
        widths = np.diff(edges)
        tail = max(t - self.breakpoints[-1], 0.0) * self.values[-1]
        return float(np.dot(widths, self.values) + tail)

    def integral(self, lo, hi):
        return self._cumulative(hi) - self._cumulative(lo)

    def knots(self):
        return tuple(self.breakpoints[1:])

    def covers(self, horizon):
        return self.breakpoints[-1] >= horizon

    def scaled(self, factor):
        return PiecewiseConstant(self.breakpoints, self.values * factor)

    def to_dict(self):
        return {
            "type": self.kind,
            "breakpoints": self.breakpoints.tolist(),
            "values": self.values.tolist(),
        }


CURVE_TYPES = {c.kind: c for c in (Flat, PiecewiseConstant)}
