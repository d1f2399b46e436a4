# -*- coding: utf-8 -*-

"""JSON configuration of models and runs.

A configuration document has a ``model`` and an optional ``run`` section::

    {
        "model": {
            "spot": 100.0, "horizon": 1.0, "eps": 0.2,
            "curve": {"type": "flat", "v0": 0.04},
            "factors": [
                {"rho": -0.7, "kernel": {"type": "power", "a": 1.0, "H": 0.1}}
            ],
            "conditional_mean": {"type": "affine", "exy": -0.03}
        },
        "run": {"strikes": [90.0, 100.0, 110.0], "seed": 42}
    }

``conditional_mean`` is optional and overrides the Gaussian limit derived
from the model. Besides ``affine`` it may be ``polynomial`` with
``coefficients`` in increasing degree, for non-Gaussian limits.

Every problem is reported as a :class:`~svexpansion.errors.ConfigError`
carrying the dotted path of the offending key.

SPDX-License-Identifier: MIT
"""

import json
import logging
import numbers
from collections import namedtuple

import numpy as np

from svexpansion.errors import ConfigError
from svexpansion.errors import DomainError
from svexpansion.model.conditional import Affine
from svexpansion.model.conditional import Custom
from svexpansion.model.curves import CURVE_TYPES
from svexpansion.model.kernels import KERNEL_TYPES
from svexpansion.model.spec import ModelSpec

KERNEL_KEYS = {
    "exponential": ("a", "b"),
    "power": ("a", "H"),
    "tabulated": ("times", "values"),
}
CURVE_KEYS = {
    "flat": ("v0",),
    "piecewise_constant": ("breakpoints", "values"),
}

RunParameters = namedtuple(
    "RunParameters",
    [
        "strikes",
        "eps_list",
        "n_paths",
        "n_steps",
        "seed",
        "bandwidth",
        "antithetic",
        "block_size",
        "workers",
        "out",
    ],
)

DEFAULT_RUN = {
    "strikes": None,
    "eps_list": [0.4, 0.2, 0.1, 0.05],
    "n_paths": 100000,
    "n_steps": 200,
    "seed": 42,
    "bandwidth": None,
    "antithetic": True,
    "block_size": 10000,
    "workers": None,
    "out": None,
}

RunConfig = namedtuple("RunConfig", ["model", "run", "conditional_mean"])
RunConfig.__doc__ = """A parsed configuration document.

`conditional_mean` is `None` unless the document overrides the Gaussian
limit of the model.
"""


def _get(mapping, key, path):
    if not isinstance(mapping, dict):
        raise ConfigError(path, f"expected an object, got {mapping!r}")
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing")
    return mapping[key]


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, path, minimum):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {value!r}")
    return int(value)


def _reals(value, path):
    if not isinstance(value, list) or not value:
        raise ConfigError(path, f"expected a non-empty list, got {value!r}")
    return [_real(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _typed(mapping, path, registry, keys):
    """Instantiate ``registry[type]`` from the keys listed for that type."""
    kind = _get(mapping, "type", path)
    if kind not in registry:
        raise ConfigError(
            f"{path}.type",
            f"unknown type {kind!r}, expected one of {sorted(registry)!r}",
        )
    params = {}
    for key in keys[kind]:
        value = _get(mapping, key, path)
        if isinstance(value, list):
            params[key] = _reals(value, f"{path}.{key}")
        else:
            params[key] = _real(value, f"{path}.{key}")
    try:
        return registry[kind](**params)
    except (DomainError, TypeError) as e:
        raise ConfigError(path, str(e)) from e


def model_from_dict(document, path="model"):
    """Build a :class:`~svexpansion.model.spec.ModelSpec` from a mapping.

    >>> model = model_from_dict({
    ...     "spot": 100, "horizon": 1, "eps": 0.2,
    ...     "curve": {"type": "flat", "v0": 0.04},
    ...     "factors": [{"rho": -0.7,
    ...                  "kernel": {"type": "power", "a": 1, "H": 0.1}}]})
    >>> model.factors[0].kernel
    <svexpansion.model.kernels.Power: a=1.0, H=0.1>
    >>> model_from_dict({"spot": 100})
    Traceback (most recent call last):
    ...
    svexpansion.errors.ConfigError: model.horizon: missing
    """
    spot = _real(_get(document, "spot", path), f"{path}.spot")
    horizon = _real(_get(document, "horizon", path), f"{path}.horizon")
    eps = _real(_get(document, "eps", path), f"{path}.eps")
    curve = _typed(
        _get(document, "curve", path),
        f"{path}.curve",
        CURVE_TYPES,
        CURVE_KEYS,
    )
    factors = _get(document, "factors", path)
    if not isinstance(factors, list) or not factors:
        raise ConfigError(
            f"{path}.factors", f"expected a non-empty list, got {factors!r}"
        )
    parsed = []
    for i, factor in enumerate(factors):
        where = f"{path}.factors[{i}]"
        rho = _real(_get(factor, "rho", where), f"{where}.rho")
        kernel = _typed(
            _get(factor, "kernel", where),
            f"{where}.kernel",
            KERNEL_TYPES,
            KERNEL_KEYS,
        )
        parsed.append((rho, kernel))
    try:
        return ModelSpec(spot, horizon, eps, parsed, curve)
    except DomainError as e:
        raise ConfigError(path, str(e)) from e


def model_to_dict(model):
    """Inverse of :func:`model_from_dict`."""
    return {
        "spot": model.spot,
        "horizon": model.horizon,
        "eps": model.eps,
        "curve": model.curve.to_dict(),
        "factors": [
            {"rho": f.rho, "kernel": f.kernel.to_dict()} for f in model.factors
        ],
    }


def conditional_mean_from_dict(document, path="model.conditional_mean"):
    kind = _get(document, "type", path)
    if kind == "affine":
        return Affine(_real(_get(document, "exy", path), f"{path}.exy"))
    if kind == "polynomial":
        coefficients = _reals(
            _get(document, "coefficients", path), f"{path}.coefficients"
        )
        polynomial = np.polynomial.Polynomial(coefficients)
        try:
            return Custom(
                polynomial, dm=polynomial.deriv(1), d2m=polynomial.deriv(2)
            )
        except DomainError as e:
            raise ConfigError(path, str(e)) from e
    raise ConfigError(
        f"{path}.type",
        f"unknown type {kind!r}, expected 'affine' or 'polynomial'",
    )


def run_from_dict(document, spot, path="run"):
    """Validated :class:`RunParameters`, defaults filled in.

    Strikes default to the single at-the-money strike `spot`.
    """
    if not isinstance(document, dict):
        raise ConfigError(path, f"expected an object, got {document!r}")
    unknown = sorted(set(document) - set(DEFAULT_RUN))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown key")
    run = dict(DEFAULT_RUN, **document)

    strikes = run["strikes"]
    if strikes is None:
        strikes = [spot]
    else:
        strikes = _reals(strikes, f"{path}.strikes")
    for i, k in enumerate(strikes):
        if not k > 0:
            raise ConfigError(
                f"{path}.strikes[{i}]", f"must be positive, got {k!r}"
            )
    eps_list = _reals(run["eps_list"], f"{path}.eps_list")
    if any(e < 0 for e in eps_list) or any(
        a <= b for a, b in zip(eps_list[:-1], eps_list[1:])
    ):
        raise ConfigError(
            f"{path}.eps_list",
            f"must be nonnegative and strictly decreasing, got {eps_list!r}",
        )
    bandwidth = run["bandwidth"]
    if bandwidth is not None:
        bandwidth = _real(bandwidth, f"{path}.bandwidth")
        if not bandwidth > 0:
            raise ConfigError(
                f"{path}.bandwidth", f"must be positive, got {bandwidth!r}"
            )
    if not isinstance(run["antithetic"], bool):
        raise ConfigError(
            f"{path}.antithetic",
            f"expected true or false, got {run['antithetic']!r}",
        )
    workers = run["workers"]
    if workers is not None:
        workers = _integer(workers, f"{path}.workers", 1)
    out = run["out"]
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"{path}.out", f"expected a path, got {out!r}")
    return RunParameters(
        strikes=strikes,
        eps_list=eps_list,
        n_paths=_integer(run["n_paths"], f"{path}.n_paths", 2),
        n_steps=_integer(run["n_steps"], f"{path}.n_steps", 2),
        seed=_integer(run["seed"], f"{path}.seed", 0),
        bandwidth=bandwidth,
        antithetic=run["antithetic"],
        block_size=_integer(run["block_size"], f"{path}.block_size", 1),
        workers=workers,
        out=out,
    )


def config_from_dict(document):
    model_doc = _get(document, "model", "config")
    model = model_from_dict(model_doc)
    conditional_mean = None
    if "conditional_mean" in model_doc:
        conditional_mean = conditional_mean_from_dict(
            model_doc["conditional_mean"]
        )
    run = run_from_dict(document.get("run", {}), model.spot)
    return RunConfig(model, run, conditional_mean)


def load_config(path):
    """Read and validate a JSON configuration file.

    Raises
    ------
    ConfigError
        If the file cannot be read or parsed, or any key is missing or
        invalid.
    """
    try:
        with open(path) as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError("config", f"cannot read {path!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(
            "config", f"{path!r} is not valid JSON: {e}"
        ) from e
    config = config_from_dict(document)
    logging.debug("Configuration loaded from %s.", path)
    return config
