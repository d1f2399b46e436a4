# -*- coding: utf-8 -*-

"""Command line front end.

Usage::

    svexpansion price|smile|skew|validate|conditional-iv --config PATH
        [--out PATH] [--seed N] [--paths N] [--steps N]
        [--eps-list a,b,c] [--strikes a,b,c] [--bandwidth h]
        [--workers N] [--no-antithetic] [-v] [--log-dir DIR]

Exit status is 0 on success, 2 for configuration errors, 3 for numerical
failures (and any other failure of a command, such as an unwritable
output file) and 4 when ``validate`` fails.

SPDX-License-Identifier: MIT
"""

import argparse
import logging
import os
import sys
from math import log
from math import sqrt

import numpy as np
import pandas as pd
from oemof.tools import logger

from svexpansion import __version__
from svexpansion.config import load_config
from svexpansion.errors import ConfigError
from svexpansion.errors import DomainError
from svexpansion.errors import NumericalError
from svexpansion.expansion import implied_variance_expansion
from svexpansion.expansion import put_expansion
from svexpansion.expansion import skew_atm
from svexpansion.expansion import skew_from_digital
from svexpansion.expansion import skew_generic
from svexpansion.expansion import smile
from svexpansion.mc_oracle import PathSimulator
from svexpansion.mc_oracle import SimGrid
from svexpansion.mc_oracle import conditional_iv_experiment
from svexpansion.mc_oracle import convergence_study
from svexpansion.model.conditional import Affine
from svexpansion.model.spec import expansion_inputs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_FAIL = 4

FLOAT_FORMAT = "%.17g"
SKEW_STEP = 1e-4


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated numbers, got {text!r}"
        )


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", required=True, help="JSON model and run configuration"
    )
    common.add_argument("--out", help="CSV output path, stdout if omitted")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--paths", type=int, help="independent draws")
    common.add_argument("--steps", type=int, help="time steps")
    common.add_argument("--eps-list", type=_floats, help="e.g. 0.4,0.2,0.1")
    common.add_argument("--strikes", type=_floats, help="e.g. 90,100,110")
    common.add_argument("--bandwidth", type=float, help="regression width")
    common.add_argument("--workers", type=int, help="simulation threads")
    common.add_argument(
        "--no-antithetic",
        action="store_true",
        help="plain instead of antithetic sampling",
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", help="debug output on screen"
    )
    common.add_argument("--log-dir", help="directory of the log file")

    parser = argparse.ArgumentParser(
        prog="svexpansion",
        description="First-order martingale expansion of option prices "
        "under small volatility of volatility, with a Monte Carlo check.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, function, help_text in (
        ("price", cmd_price, "put prices at first order"),
        ("smile", cmd_smile, "implied total variance smile"),
        ("skew", cmd_skew, "at-the-money skew with cross-checks"),
        ("validate", cmd_validate, "Monte Carlo convergence study"),
        (
            "conditional-iv",
            cmd_conditional_iv,
            "conditional integrated variance experiment",
        ),
    ):
        command = commands.add_parser(name, parents=[common], help=help_text)
        command.set_defaults(function=function)
    return parser


def apply_overrides(config, args):
    """Replace run parameters by the flags given on the command line."""
    flags = {
        "strikes": args.strikes,
        "eps_list": args.eps_list,
        "n_paths": args.paths,
        "n_steps": args.steps,
        "seed": args.seed,
        "bandwidth": args.bandwidth,
        "workers": args.workers,
        "out": args.out,
    }
    changes = {k: v for k, v in flags.items() if v is not None}
    if args.no_antithetic:
        changes["antithetic"] = False
    for key, value in changes.items():
        if key in ("n_paths", "n_steps") and value < 2:
            raise ConfigError(f"run.{key}", f"must be at least 2, got {value}")
        if key == "strikes" and not (value and all(k > 0 for k in value)):
            raise ConfigError("run.strikes", f"must be positive, got {value}")
        if key == "eps_list" and not (
            value
            and all(e >= 0 for e in value)
            and all(a > b for a, b in zip(value[:-1], value[1:]))
        ):
            raise ConfigError(
                "run.eps_list",
                f"must be nonnegative and strictly decreasing, got {value}",
            )
    return config._replace(run=config.run._replace(**changes))


def _expansion(config):
    inputs = expansion_inputs(config.model)
    cond_mean = config.conditional_mean or inputs.conditional_mean()
    return inputs, cond_mean


def _simulator(config):
    run = config.run
    return PathSimulator(
        config.model,
        SimGrid.uniform(config.model.horizon, run.n_steps),
        antithetic=run.antithetic,
        block_size=run.block_size,
        workers=run.workers,
    )


def _write(table, out):
    table.to_csv(
        out if out is not None else sys.stdout,
        index=False,
        float_format=FLOAT_FORMAT,
    )
    if out is not None:
        logging.info("Table written to %s.", out)


def cmd_price(config):
    inputs, cond_mean = _expansion(config)
    rows = []
    for strike in config.run.strikes:
        report = put_expansion(inputs, cond_mean, strike)
        rows.append(
            {
                "strike": strike,
                "k": log(strike / inputs.spot),
                "bs_price": report.leading,
                "correction": report.correction,
                "price_form_a": report.form_a,
                "price_form_c": report.form_c,
                "equiv_total_variance": report.equivalent_variance,
            }
        )
    _write(pd.DataFrame(rows), config.run.out)
    return EXIT_OK


def _root(total_variance):
    """Square root, NaN where a first-order variance is not positive."""
    return sqrt(total_variance) if total_variance > 0 else np.nan


def cmd_smile(config):
    inputs, cond_mean = _expansion(config)
    horizon = config.model.horizon
    points = smile(inputs, cond_mean, config.run.strikes)
    for p in points:
        if not p.implied_total_variance > 0:
            logging.warning(
                "Implied total variance %r at strike %r is not positive; "
                "implied_vol is left empty.",
                p.implied_total_variance,
                p.strike,
            )
    table = pd.DataFrame(
        [
            {
                "strike": p.strike,
                "k": p.log_moneyness,
                "implied_total_variance": p.implied_total_variance,
                "implied_vol": _root(p.implied_total_variance / horizon),
            }
            for p in points
        ]
    )
    _write(table, config.run.out)
    return EXIT_OK


def _linearized_root(inputs, cond_mean, k):
    """``sqrt(v) + (v_hat - v) / (2 sqrt(v))``, first order in ``eps``."""
    v_hat = implied_variance_expansion(
        inputs, cond_mean, inputs.spot * np.exp(k)
    ).implied_total_variance
    return sqrt(inputs.v_eps) + (v_hat - inputs.v_eps) / (
        2.0 * sqrt(inputs.v_eps)
    )


def _exact_root(inputs, cond_mean, k):
    return _root(
        implied_variance_expansion(
            inputs, cond_mean, inputs.spot * np.exp(k)
        ).implied_total_variance
    )


def skew_report(inputs, cond_mean, h=SKEW_STEP):
    """At-the-money skew and its finite difference cross-checks."""
    if isinstance(cond_mean, Affine):
        skew = skew_atm(inputs, cond_mean)
        method = "skew_atm"
    else:
        skew = skew_generic(inputs, cond_mean, 0.0)
        method = "skew_generic"
    linear = (
        _linearized_root(inputs, cond_mean, h)
        - _linearized_root(inputs, cond_mean, -h)
    ) / (2.0 * h)
    exact = (
        _exact_root(inputs, cond_mean, h) - _exact_root(inputs, cond_mean, -h)
    ) / (2.0 * h)
    return {
        "method": method,
        "skew": skew,
        "finite_difference": linear,
        "difference": skew - linear,
        "finite_difference_exact_root": exact,
        "from_digital": skew_from_digital(inputs, cond_mean, 0.0),
    }


def cmd_skew(config):
    inputs, cond_mean = _expansion(config)
    report = skew_report(inputs, cond_mean)
    for key, value in report.items():
        if isinstance(value, float):
            print(f"{key:<28} {value:.17g}")
        else:
            print(f"{key:<28} {value}")
    if config.run.out is not None:
        _write(pd.DataFrame([report]), config.run.out)
    return EXIT_OK


def passes(table):
    """Verdict of a convergence study and a one-line reason.

    ``err / eps`` has to decrease strictly over the positive ``eps`` and
    the last error has to lie within ``max(3 se, err_prev / 2)``.
    """
    positive = table[table["eps"] > 0]
    ratios = positive["err_over_eps"].to_numpy()
    if np.any(np.diff(ratios) >= 0):
        return False, (
            f"err/eps does not decrease strictly: {ratios.tolist()!r}"
        )
    if len(table) < 2:
        return True, "single eps, nothing to compare"
    last, previous = table.iloc[-1], table.iloc[-2]
    bound = max(3.0 * last["se"], 0.5 * previous["err"])
    if last["err"] > bound:
        if 3.0 * last["se"] >= 0.5 * previous["err"]:
            return False, (
                f"final error {last['err']:.3g} exceeds 3 standard errors "
                f"({3.0 * last['se']:.3g}); Monte Carlo noise dominates, "
                "increase --paths"
            )
        return False, (
            f"final error {last['err']:.3g} exceeds half the previous "
            f"error {0.5 * previous['err']:.3g}"
        )
    return True, f"final error {last['err']:.3g} within {bound:.3g}"


def cmd_validate(config):
    run = config.run
    simulator = _simulator(config)
    table = convergence_study(
        config.model,
        config.model.spot,
        run.eps_list,
        simulator.grid,
        run.n_paths,
        run.seed,
        simulator=simulator,
    )
    _write(table, run.out)
    if run.out is not None:
        experiment = conditional_iv_experiment(
            config.model,
            [config.model.spot],
            simulator.grid,
            run.n_paths,
            run.seed,
            bandwidth=run.bandwidth,
            simulator=simulator,
        )
        _write(experiment, os.path.splitext(run.out)[0] + ".conditional.csv")
    ok, reason = passes(table)
    print(f"{'PASS' if ok else 'FAIL'}: {reason}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_conditional_iv(config):
    run = config.run
    simulator = _simulator(config)
    table = conditional_iv_experiment(
        config.model,
        run.strikes,
        simulator.grid,
        run.n_paths,
        run.seed,
        bandwidth=run.bandwidth,
        simulator=simulator,
    )
    _write(table, run.out)
    return EXIT_OK


def _log_block(sender, block, n_blocks, size):
    logging.debug(
        "Simulated block %d of %d with %d draws.", block + 1, n_blocks, size
    )


_LOG_HANDLERS = []


def _configure_logging(args):
    """Install the log handlers of this run.

    Handlers installed by an earlier call in the same process are
    removed first.
    """
    root = logging.getLogger()
    for handler in _LOG_HANDLERS:
        root.removeHandler(handler)
        handler.close()
    before = list(root.handlers)
    if args.log_dir is not None:
        os.makedirs(args.log_dir, exist_ok=True)
    logger.define_logging(
        logpath=args.log_dir,
        logfile="svexpansion.log",
        screen_level=logging.DEBUG if args.verbose else logging.WARNING,
    )
    _LOG_HANDLERS[:] = [h for h in root.handlers if h not in before]


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    PathSimulator.signals[PathSimulator.simulate_block].connect(_log_block)
    try:
        config = apply_overrides(load_config(args.config), args)
        return args.function(config)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, NumericalError) as e:
        logging.error("Numerical failure: %s", e)
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, ValueError, OSError) as e:
        logging.exception("Command %s failed.", args.command)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
