# -*- coding: utf-8 -*-

"""Exceptions raised by svexpansion.

Precondition violations are `ValueError` subclasses, failures of a
numerical procedure are `ArithmeticError` subclasses, so callers can
tell bad input from a method that did not converge.

SPDX-License-Identifier: MIT
"""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ArbitrageBoundsError(DomainError):
    """A put price violates the no-arbitrage bounds ``((K-s)_+, K)``.

    Parameters
    ----------
    price : float
        The offending price.
    lower, upper : float
        The strict bounds the price has to lie between.
    """

    def __init__(self, price, lower, upper):
        self.price = price
        self.lower = lower
        self.upper = upper
        super().__init__(
            "\n\nPut price outside the no-arbitrage bounds.\n"
            f"    price : {price!r}\n"
            f"    bounds: ({lower!r}, {upper!r})\n"
            "An implied total variance does not exist for this price."
        )


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature hit its subdivision limit.

    The estimate reached so far is attached as :attr:`partial`.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(ValueError):
    """A configuration document is missing a key or holds a bad value.

    Parameters
    ----------
    key : str
        Dotted path of the offending key, e.g.
        ``model.factors[0].kernel.H``.
    message : str
        What is wrong with it.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
