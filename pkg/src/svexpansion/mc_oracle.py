# -*- coding: utf-8 -*-

"""Monte Carlo simulation of Bergomi-type models.

The Gaussian Volterra drivers ``M^i_t = int_0^t k_i(t - s) dW^i_s`` are
sampled exactly at the grid points together with the Brownian increments
``dW^i`` by factorizing their joint covariance. The log-price is then
evolved by an Euler scheme with left-point variance. Since ``eps`` only
enters the variance analytically, one set of Gaussian draws serves every
``eps`` (common random numbers).

Random streams are split per block of paths: block ``b`` of a run with
seed ``s`` draws from ``default_rng(SeedSequence(s, spawn_key=(b,)))``, and
blocks are always reduced in block order, so results do not depend on the
number of worker threads.

SPDX-License-Identifier: MIT
"""

import logging
import os
import warnings
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from math import ceil
from math import log
from math import sqrt

import blinker
import dill as pickle
import numpy as np
import pandas as pd
from oemof.tools import debugging

from svexpansion import quadrature
from svexpansion.bs_core import BsQuote
from svexpansion.bs_core import dp_dt
from svexpansion.bs_core import implied_total_variance
from svexpansion.errors import ArbitrageBoundsError
from svexpansion.errors import DomainError
from svexpansion.errors import NumericalError
from svexpansion.expansion import implied_variance_expansion
from svexpansion.expansion import put_expansion
from svexpansion.model.spec import expansion_inputs

BLOCK_SIZE = 10000
JITTERS = (1e-14, 1e-13, 1e-12)
EIGENVALUE_TOLERANCE = 1e-10
MIN_EFFECTIVE_SAMPLES = 100

McEstimate = namedtuple("McEstimate", ["mean", "std_error", "n_paths", "seed"])

PathBundle = namedtuple(
    "PathBundle", ["terminal_log_price", "integrated_variance"]
)
PathBundle.__doc__ = """Simulated paths, one row per independent draw.

Both arrays have shape ``(n_paths, 2)`` with antithetic sampling (the
second column holds the mirrored path) and ``(n_paths, 1)`` without.
"""


class SimGrid(namedtuple("SimGrid", ["n_steps", "step", "times"])):
    """Uniform time grid ``t_j = j * step``, ``j = 0, ..., n_steps``.

    >>> grid = SimGrid.uniform(1.0, 4)
    >>> grid.times.tolist()
    [0.0, 0.25, 0.5, 0.75, 1.0]
    """

    __slots__ = ()

    @classmethod
    def uniform(cls, horizon, n_steps):
        if not n_steps >= 2:
            raise DomainError(f"A grid needs n_steps >= 2, got {n_steps!r}.")
        if not horizon > 0:
            raise DomainError(f"horizon must be positive, got {horizon!r}")
        n_steps = int(n_steps)
        step = horizon / n_steps
        return cls(n_steps, step, step * np.arange(n_steps + 1))

    @property
    def horizon(self):
        return float(self.times[-1])


class DriverCovariance:
    r"""Joint covariance of the Volterra drivers and Brownian increments.

    For each factor ``i`` the vector holds ``M^i_{t_0}, ..., M^i_{t_n}``
    followed by ``dW^i_1, ..., dW^i_n``; factors are stacked and
    independent of each other. ``M^i_{t_0} = 0`` is excluded from the
    factorization.

    Attributes
    ----------
    matrix : numpy.ndarray
        The full covariance, including the zero rows at ``t_0``.
    factor : numpy.ndarray
        A matrix ``L`` with ``L L^T`` equal to ``matrix`` restricted to
        :attr:`active`.
    active : numpy.ndarray
        Indices of the entries with positive variance.
    variances : numpy.ndarray
        ``Var(M^i_{t_j})``, shape ``(n_factors, n_steps + 1)``, which is
        the compensator of the exponential.
    """

    def __init__(self, matrix, factor, active, variances, n_steps):
        self.matrix = matrix
        self.factor = factor
        self.active = active
        self.variances = variances
        self.n_steps = n_steps

    @property
    def block(self):
        return 2 * self.n_steps + 1

    def index_m(self, factor, j):
        """Position of ``M^factor_{t_j}``."""
        return factor * self.block + j

    def index_dw(self, factor, j):
        """Position of ``dW^factor_j``, the increment ending at ``t_j``."""
        return factor * self.block + self.n_steps + j

    def expand(self, z):
        draws = np.zeros((self.matrix.shape[0], z.shape[1]))
        draws[self.active] = self.factor @ z
        return draws


def _lagged_products(kernel, step, n_steps, rel_tol):
    """``P[m, d] = int_{m h}^{(m+1) h} k(tau) k(tau + d h) dtau``.

    Only entries with ``m + d < n_steps`` are needed and computed.
    """
    products = np.zeros((n_steps, n_steps + 1))
    alpha = kernel.exponent
    knots = np.asarray(kernel.knots(), dtype=float)
    for d in range(n_steps):
        shift = d * step

        def shifted(tau):
            return kernel.value(tau + shift)

        if d == 0:
            first = quadrature.integrate_algebraic_singularity(
                lambda tau: kernel.smooth_part(tau) ** 2,
                2.0 * alpha,
                step,
                rel_tol=rel_tol,
                points=knots,
            )
        else:
            first = quadrature.integrate_algebraic_singularity(
                lambda tau: kernel.smooth_part(tau) * shifted(tau),
                alpha,
                step,
                rel_tol=rel_tol,
                points=np.concatenate([knots, knots - shift]),
            )
        products[0, d] = first.value
        for m in range(1, n_steps - d):
            products[m, d] = quadrature.integrate(
                lambda tau: kernel.value(tau) * shifted(tau),
                m * step,
                (m + 1) * step,
                rel_tol=rel_tol,
                points=np.concatenate([knots, knots - shift]),
            ).value
    return products


def _panel_masses(kernel, step, n_steps, rel_tol):
    """``Q[m] = int_{m h}^{(m+1) h} k(tau) dtau``."""
    knots = kernel.knots()
    masses = np.empty(n_steps)
    masses[0] = quadrature.integrate_algebraic_singularity(
        kernel.smooth_part,
        kernel.exponent,
        step,
        rel_tol=rel_tol,
        points=knots,
    ).value
    for m in range(1, n_steps):
        masses[m] = quadrature.integrate(
            kernel.value,
            m * step,
            (m + 1) * step,
            rel_tol=rel_tol,
            points=knots,
        ).value
    return masses


def _factor_block(kernel, grid, rel_tol):
    n, h = grid.n_steps, grid.step
    block = np.zeros((2 * n + 1, 2 * n + 1))
    # Cov(M_{t_j}, M_{t_{j+d}}) = sum_{m < j} P[m, d]
    cumulative = np.cumsum(_lagged_products(kernel, h, n, rel_tol), axis=0)
    for j in range(1, n + 1):
        for d in range(n - j + 1):
            block[j, j + d] = block[j + d, j] = cumulative[j - 1, d]
    # Cov(M_{t_j}, dW_l) = Q[j - l] for l <= j, zero otherwise
    masses = _panel_masses(kernel, h, n, rel_tol)
    for j in range(1, n + 1):
        for ell in range(1, j + 1):
            block[j, n + ell] = block[n + ell, j] = masses[j - ell]
    block[n + 1 :, n + 1 :] = h * np.eye(n)
    return block


def _factorize(matrix):
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        pass
    identity = np.eye(matrix.shape[0])
    for jitter in JITTERS:
        try:
            factor = np.linalg.cholesky(matrix + jitter * identity)
        except np.linalg.LinAlgError:
            continue
        logging.warning(
            "Driver covariance factorized with diagonal jitter %r.", jitter
        )
        return factor
    values, vectors = np.linalg.eigh(matrix)
    if values[0] < -EIGENVALUE_TOLERANCE * values[-1]:
        raise NumericalError(
            "\n\nDriver covariance is not positive semidefinite.\n"
            f"    smallest eigenvalue: {values[0]!r}\n"
            f"    largest eigenvalue : {values[-1]!r}\n"
            "Cholesky failed with every diagonal jitter up to "
            f"{JITTERS[-1]!r}."
        )
    logging.warning(
        "Driver covariance factorized by eigendecomposition; smallest "
        "eigenvalue %r.",
        values[0],
    )
    return vectors * np.sqrt(np.clip(values, 0.0, None))


def build_driver_covariance(model, grid, rel_tol=1e-10):
    """Build and factorize the joint covariance of the Gaussian drivers.

    Parameters
    ----------
    model : :class:`~svexpansion.model.spec.ModelSpec`
    grid : :class:`SimGrid`
        Must end at the model horizon.
    rel_tol : float
        Relative accuracy of every covariance entry.

    Returns
    -------
    DriverCovariance
    """
    if not np.isclose(grid.horizon, model.horizon, rtol=1e-12, atol=0):
        raise DomainError(
            f"Grid ends at {grid.horizon!r} but the model horizon is "
            f"{model.horizon!r}."
        )
    n = grid.n_steps
    size = 2 * n + 1
    matrix = np.zeros((model.n_factors * size, model.n_factors * size))
    for i, f in enumerate(model.factors):
        lo = i * size
        matrix[lo : lo + size, lo : lo + size] = _factor_block(
            f.kernel, grid, rel_tol
        )
    active = np.flatnonzero(np.diag(matrix) > 0)
    diagonal = np.diag(matrix)
    variances = np.stack(
        [diagonal[lo : lo + n + 1] for lo in range(0, diagonal.size, size)]
    )
    logging.debug(
        "Driver covariance of dimension %d built for %d factors.",
        matrix.shape[0],
        model.n_factors,
    )
    factor = _factorize(matrix[np.ix_(active, active)])
    return DriverCovariance(matrix, factor, active, variances, n)


def _evolve(model, grid, covariance, draws, orthogonal, eps):
    """Terminal log-price and integrated variance of one block of draws."""
    n, h = grid.n_steps, grid.step
    size = 2 * n + 1
    base = model.curve.value(grid.times)[:, None]
    exponent = np.zeros_like(draws[: n + 1])
    bm = np.zeros((n, draws.shape[1]))
    for i, f in enumerate(model.factors):
        lo = i * size
        exponent += eps * draws[lo : lo + n + 1] - (
            0.5 * eps**2 * covariance.variances[i][:, None]
        )
        bm += f.rho * draws[lo + n + 1 : lo + size]
    variance = base * np.exp(exponent)
    bm += sqrt(1.0 - model.rho**2) * orthogonal
    left = variance[:-1]
    log_price = log(model.spot) + np.sum(
        -0.5 * left * h + np.sqrt(left) * bm, axis=0
    )
    integrated = h * (
        0.5 * variance[0] + variance[1:-1].sum(axis=0) + 0.5 * variance[-1]
    )
    return log_price, integrated


class PathSimulator:
    """Path generator for one model and grid, reusable across ``eps``.

    The driver covariance is built lazily on first use. Use :meth:`dump`
    and :meth:`restore` to skip rebuilding it for later studies on the
    same model and grid.

    Parameters
    ----------
    model : :class:`~svexpansion.model.spec.ModelSpec`
        Factors, curve and horizon are used; ``eps`` is the default for
        :meth:`simulate`.
    grid : :class:`SimGrid`
    antithetic : bool
        Mirror every Gaussian draw, on by default.
    block_size : int
        Independent draws per random stream.
    workers : int, optional
        Threads simulating blocks concurrently; `None` runs serially.

    Examples
    --------
    >>> from svexpansion.model import Flat, ModelSpec, Power
    >>> model = ModelSpec(100.0, 1.0, 0.0, [(-0.7, Power(1.0, 0.1))],
    ...                   Flat(0.04))
    >>> sim = PathSimulator(model, SimGrid.uniform(1.0, 4))
    >>> bundle = sim.simulate(10, seed=1)
    >>> bundle.terminal_log_price.shape
    (10, 2)
    >>> sim.dump()  # doctest: +ELLIPSIS
    'Attributes dumped to:...
    >>> sim = PathSimulator(model, SimGrid.uniform(1.0, 4))
    >>> sim.restore()  # doctest: +ELLIPSIS
    'Attributes restored from:...
    """

    signals = {}
    """Blinker signals emitted by simulators.

    The `simulate_block` signal is sent after each block of paths with
    the simulator as sender and the keyword arguments `block`,
    `n_blocks` and `size`.
    """

    def __init__(
        self, model, grid, antithetic=True, block_size=BLOCK_SIZE, workers=None
    ):
        if not block_size >= 1:
            raise DomainError(f"block_size must be >= 1, got {block_size!r}")
        self.model = model
        self.grid = grid
        self.antithetic = antithetic
        self.block_size = int(block_size)
        self.workers = workers
        self._covariance = None

    def build(self):
        """Build the driver covariance unless it exists, and return it."""
        if self._covariance is None:
            self._covariance = build_driver_covariance(self.model, self.grid)
        return self._covariance

    @property
    def covariance(self):
        return self.build()

    def simulate_block(self, block, size, seed, eps_values, n_blocks=1):
        """Simulate block number `block` for every value in `eps_values`."""
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(block,))
        )
        z = rng.standard_normal((self.covariance.factor.shape[1], size))
        orthogonal = np.sqrt(self.grid.step) * rng.standard_normal(
            (self.grid.n_steps, size)
        )
        draws = self.covariance.expand(z)
        signs = (1.0, -1.0) if self.antithetic else (1.0,)
        results = []
        for eps in eps_values:
            paths = [
                _evolve(
                    self.model,
                    self.grid,
                    self.covariance,
                    sign * draws,
                    sign * orthogonal,
                    eps,
                )
                for sign in signs
            ]
            results.append(
                PathBundle(
                    np.stack([p[0] for p in paths], axis=1),
                    np.stack([p[1] for p in paths], axis=1),
                )
            )
        self.signals[type(self).simulate_block].send(
            self, block=block, n_blocks=n_blocks, size=size
        )
        return results

    signals[simulate_block] = blinker.signal(simulate_block)

    def simulate_crn(self, n_paths, seed, eps_values):
        """One :class:`PathBundle` per ``eps``, all from the same draws."""
        if not n_paths >= 1:
            raise DomainError(f"n_paths must be >= 1, got {n_paths!r}")
        eps_values = [float(e) for e in eps_values]
        self.build()
        n_blocks = ceil(n_paths / self.block_size)
        sizes = [
            min(self.block_size, n_paths - b * self.block_size)
            for b in range(n_blocks)
        ]

        def run(block):
            return self.simulate_block(
                block, sizes[block], seed, eps_values, n_blocks=n_blocks
            )

        if self.workers and self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                blocks = list(pool.map(run, range(n_blocks)))
        else:
            blocks = [run(b) for b in range(n_blocks)]
        return [
            PathBundle(
                np.concatenate([b[k].terminal_log_price for b in blocks]),
                np.concatenate([b[k].integrated_variance for b in blocks]),
            )
            for k in range(len(eps_values))
        ]

    def simulate(self, n_paths, seed, eps=None):
        if eps is None:
            eps = self.model.eps
        return self.simulate_crn(n_paths, seed, [eps])[0]

    def dump(self, dpath=None, filename=None):
        r"""Dump the simulator state, including the factorized covariance."""
        if dpath is None:
            bpath = os.path.join(os.path.expanduser("~"), ".svexpansion")
            if not os.path.isdir(bpath):
                os.mkdir(bpath)
            dpath = os.path.join(bpath, "dumps")
            if not os.path.isdir(dpath):
                os.mkdir(dpath)

        if filename is None:
            filename = "simulator.dump"

        self.build()
        with open(os.path.join(dpath, filename), "wb") as f:
            pickle.dump(self.__dict__, f)

        msg = "Attributes dumped to: {0}".format(os.path.join(dpath, filename))
        logging.debug(msg)
        return msg

    def restore(self, dpath=None, filename=None):
        r"""Restore a simulator state written by :meth:`dump`."""
        logging.info(
            "Restoring attributes will overwrite existing attributes."
        )
        if dpath is None:
            dpath = os.path.join(
                os.path.expanduser("~"), ".svexpansion", "dumps"
            )

        if filename is None:
            filename = "simulator.dump"

        with open(os.path.join(dpath, filename), "rb") as f:
            self.__dict__ = pickle.load(f)

        msg = "Attributes restored from: {0}".format(
            os.path.join(dpath, filename)
        )
        logging.debug(msg)
        return msg


def simulate_paths(model, grid, n_paths, seed, antithetic=True, workers=None):
    """Simulate `n_paths` independent draws of `model` on `grid`."""
    simulator = PathSimulator(
        model, grid, antithetic=antithetic, workers=workers
    )
    return simulator.simulate(n_paths, seed)


def _estimate(samples, seed):
    """Mean and standard error over independent draws (rows)."""
    draws = samples.mean(axis=1)
    n = draws.shape[0]
    std_error = float(np.std(draws, ddof=1) / sqrt(n)) if n > 1 else np.inf
    return McEstimate(float(np.mean(draws)), std_error, n, seed)


def _simulator(model, grid, simulator):
    if simulator is None:
        return PathSimulator(model, grid)
    return simulator


def put_estimate(bundle, strike, seed):
    """:class:`McEstimate` of the put price from simulated paths."""
    payoff = np.maximum(strike - np.exp(bundle.terminal_log_price), 0.0)
    return _estimate(payoff, seed)


def mc_put(model, strike, grid, n_paths, seed, simulator=None):
    """Monte Carlo put price ``E[(K - S_T)_+]``.

    A simulator passed in is used as is; its ``eps`` default is replaced
    by ``model.eps``.
    """
    bundle = _simulator(model, grid, simulator).simulate(
        n_paths, seed, eps=model.eps
    )
    return put_estimate(bundle, strike, seed)


def mc_digital(model, strike, grid, n_paths, seed, simulator=None):
    """Monte Carlo estimate of ``P[S_T < K]``."""
    bundle = _simulator(model, grid, simulator).simulate(
        n_paths, seed, eps=model.eps
    )
    indicator = (bundle.terminal_log_price < log(strike)).astype(float)
    return _estimate(indicator, seed)


def mc_forward(model, grid, n_paths, seed, simulator=None):
    """Monte Carlo mean of ``S_T``, which should equal ``S_0``."""
    bundle = _simulator(model, grid, simulator).simulate(
        n_paths, seed, eps=model.eps
    )
    return _estimate(np.exp(bundle.terminal_log_price), seed)


def implied_variance_estimate(put, spot, strike):
    """Invert a put :class:`McEstimate`; delta method for the error.

    Raises
    ------
    ArbitrageBoundsError
        If Monte Carlo noise pushed the price outside the bounds.
    """
    t = implied_total_variance(put.mean, spot, strike)
    slope = dp_dt(BsQuote(spot, strike, t))
    return McEstimate(t, put.std_error / slope, put.n_paths, put.seed)


def mc_implied_variance(model, strike, grid, n_paths, seed, simulator=None):
    """Implied total variance of :func:`mc_put`."""
    put = mc_put(model, strike, grid, n_paths, seed, simulator=simulator)
    return implied_variance_estimate(put, model.spot, strike)


def convergence_study(
    model, strike, eps_list, grid, n_paths, seed, simulator=None
):
    """Compare Monte Carlo and expansion put prices over decreasing ``eps``.

    The same draws are used for every ``eps``.

    Returns
    -------
    pandas.DataFrame
        Columns ``eps, p_mc, se, p_exp, err, err_over_eps, ratio``;
        ``err_over_eps`` is empty at ``eps = 0`` and ``ratio`` (error over
        the previous row's error) in the first row.
    """
    eps_list = [float(e) for e in eps_list]
    if any(e < 0 for e in eps_list) or any(
        a <= b for a, b in zip(eps_list[:-1], eps_list[1:])
    ):
        raise DomainError(
            "eps_list must be nonnegative and strictly decreasing, got "
            f"{eps_list!r}."
        )
    simulator = _simulator(model, grid, simulator)
    inputs = expansion_inputs(model)
    bundles = simulator.simulate_crn(n_paths, seed, eps_list)
    rows = []
    for eps, bundle in zip(eps_list, bundles):
        estimate = put_estimate(bundle, strike, seed)
        shifted = inputs.with_eps(eps)
        p_exp = put_expansion(
            shifted, shifted.conditional_mean(), strike
        ).form_a
        err = abs(estimate.mean - p_exp)
        rows.append(
            {
                "eps": eps,
                "p_mc": estimate.mean,
                "se": estimate.std_error,
                "p_exp": p_exp,
                "err": err,
                "err_over_eps": err / eps if eps > 0 else np.nan,
            }
        )
        logging.info(
            "eps=%r: MC %r +/- %r, expansion %r.",
            eps,
            estimate.mean,
            estimate.std_error,
            p_exp,
        )
    table = pd.DataFrame(rows)
    table["ratio"] = table["err"] / table["err"].shift(1)
    return table[
        ["eps", "p_mc", "se", "p_exp", "err", "err_over_eps", "ratio"]
    ]


class KernelRegression:
    """Nadaraya-Watson regression with a Gaussian kernel.

    The estimate at ``x`` is ``sum_i w_i y_i / sum_i w_i`` with weights
    ``w_i = exp(-((x - x_i) / bandwidth)**2 / 2)``.

    Parameters
    ----------
    bandwidth : float, optional
        Kernel width; `None` selects Silverman's rule
        ``1.06 * std(x) * n**(-1/5)`` on :meth:`fit`.

    Examples
    --------
    >>> reg = KernelRegression(bandwidth=1e6).fit([0.0, 1.0], [2.0, 4.0])
    >>> round(float(reg.predict(0.3)), 12)
    3.0
    """

    def __init__(self, bandwidth=None):
        if bandwidth is not None and not bandwidth > 0:
            raise DomainError(f"bandwidth must be positive, got {bandwidth!r}")
        self.bandwidth = bandwidth
        self.parameters = {"x": None, "y": None}

    def fit(self, x, y):
        x = np.ravel(np.asarray(x, dtype=float))
        y = np.ravel(np.asarray(y, dtype=float))
        if x.shape != y.shape or x.size < 2:
            raise DomainError(
                "KernelRegression needs matching samples, at least two, "
                f"got shapes {x.shape} and {y.shape}."
            )
        if self.bandwidth is None:
            self.bandwidth = 1.06 * float(np.std(x, ddof=1)) * x.size ** -0.2
            if not self.bandwidth > 0:
                raise DomainError(
                    "Silverman bandwidth vanishes for constant samples."
                )
        self.parameters = {"x": x, "y": y}
        return self

    def _weights(self, at):
        u = (self.parameters["x"] - at) / self.bandwidth
        log_w = -0.5 * u * u
        return np.exp(log_w - log_w.max())

    def predict(self, x):
        """Regression estimate at each point of `x`."""
        x = np.asarray(x, dtype=float)
        values = [
            np.dot(w, self.parameters["y"]) / w.sum()
            for w in map(self._weights, np.ravel(x))
        ]
        return np.reshape(values, x.shape)

    def effective_sample_size(self, x):
        """Kish effective sample size ``(sum w)**2 / sum w**2``."""
        x = np.asarray(x, dtype=float)
        sizes = [
            w.sum() ** 2 / np.dot(w, w)
            for w in map(self._weights, np.ravel(x))
        ]
        return np.reshape(sizes, x.shape)


def conditional_iv_experiment(
    model, strikes, grid, n_paths, seed, bandwidth=None, simulator=None
):
    """Regress integrated variance on the terminal log-price.

    At every strike the estimate of ``E[int_0^T V_t dt | S_T = K]`` is
    reported next to the Monte Carlo implied total variance and the
    expansion. This is a report for a conjectured relation; nothing is
    asserted.

    Returns
    -------
    pandas.DataFrame
        Columns ``strike, regression_iv, mc_iv, expansion_iv, flag``.
        `flag` is ``sparse`` below 100 effective samples and
        ``arbitrage`` where the Monte Carlo price has no implied
        variance; both are joined by ``;``.
    """
    warnings.warn(
        "The conditional expectation formula for the implied variance is "
        "conjectural; the experiment is informational only.",
        debugging.ExperimentalFeatureWarning,
    )
    simulator = _simulator(model, grid, simulator)
    bundle = simulator.simulate(n_paths, seed, eps=model.eps)
    regression = KernelRegression(bandwidth).fit(
        bundle.terminal_log_price, bundle.integrated_variance
    )
    logging.info(
        "Conditional variance regression with bandwidth %r.",
        regression.bandwidth,
    )
    inputs = expansion_inputs(model)
    cond_mean = inputs.conditional_mean()
    rows = []
    for strike in strikes:
        flags = []
        at = log(strike)
        if regression.effective_sample_size(at) < MIN_EFFECTIVE_SAMPLES:
            flags.append("sparse")
        try:
            mc_iv = implied_variance_estimate(
                put_estimate(bundle, strike, seed),
                model.spot,
                strike,
            ).mean
        except ArbitrageBoundsError:
            mc_iv = np.nan
            flags.append("arbitrage")
        rows.append(
            {
                "strike": float(strike),
                "regression_iv": float(regression.predict(at)),
                "mc_iv": mc_iv,
                "expansion_iv": implied_variance_expansion(
                    inputs, cond_mean, strike
                ).implied_total_variance,
                "flag": ";".join(flags),
            }
        )
    return pd.DataFrame(
        rows,
        columns=["strike", "regression_iv", "mc_iv", "expansion_iv", "flag"],
    )
