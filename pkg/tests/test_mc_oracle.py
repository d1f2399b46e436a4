# -*- coding: utf-8 -

"""Tests of the Monte Carlo oracle.

Statistical assertions use four standard errors. The desk-scale
convergence study is marked ``slow`` and deselected by default; run it
with ``pytest -m slow``.

SPDX-License-Identifier: MIT
"""

from math import exp
from math import sqrt

import numpy as np
import pytest
from oemof.tools import debugging
from scipy import special

from svexpansion import mc_oracle
from svexpansion.bs_core import BsQuote
from svexpansion.bs_core import put_price
from svexpansion.cli import passes
from svexpansion.errors import ArbitrageBoundsError
from svexpansion.errors import DomainError
from svexpansion.errors import NumericalError
from svexpansion.mc_oracle import KernelRegression
from svexpansion.mc_oracle import PathSimulator
from svexpansion.mc_oracle import SimGrid
from svexpansion.model import Exponential
from svexpansion.model import Flat
from svexpansion.model import ModelSpec
from svexpansion.model import Power

SPOT = 100.0


def rough_model(eps=0.4):
    return ModelSpec(SPOT, 1.0, eps, [(-0.7, Power(1.0, 0.1))], Flat(0.04))


def two_factor_model(eps=0.4):
    return ModelSpec(
        SPOT,
        1.0,
        eps,
        [(-0.5, Exponential(1.5, 2.0)), (0.3, Power(0.8, 0.3))],
        Flat(0.04),
    )


def within(estimate, expected, sigmas=4.0):
    return abs(estimate.mean - expected) <= sigmas * estimate.std_error


class TestsDriverCovariance:
    def setup_method(self):
        self.grid = SimGrid.uniform(1.0, 8)
        self.times = self.grid.times

    def build(self, kernel):
        model = ModelSpec(SPOT, 1.0, 0.2, [(-0.5, kernel)], Flat(0.04))
        return mc_oracle.build_driver_covariance(model, self.grid)

    def test_exponential_entries(self):
        a, b = 1.5, 2.0
        cov = self.build(Exponential(a, b))
        n = self.grid.n_steps
        for j in range(1, n + 1):
            for i in range(1, j + 1):
                s, t = self.times[i], self.times[j]
                expected = (
                    a**2 * exp(-b * (t - s)) * -np.expm1(-2 * b * s) / (2 * b)
                )
                assert cov.matrix[
                    cov.index_m(0, i), cov.index_m(0, j)
                ] == pytest.approx(expected, rel=1e-9)
            for ell in range(1, j + 1):
                t, lo, hi = self.times[j], self.times[ell - 1], self.times[ell]
                expected = a * (exp(-b * (t - hi)) - exp(-b * (t - lo))) / b
                assert cov.matrix[
                    cov.index_m(0, j), cov.index_dw(0, ell)
                ] == pytest.approx(expected, rel=1e-9)
            for ell in range(j + 1, n + 1):
                assert cov.matrix[cov.index_m(0, j), cov.index_dw(0, ell)] == 0

    def test_power_entries(self):
        H = 0.1
        cov = self.build(Power(1.0, H))
        n = self.grid.n_steps
        for j in range(1, n + 1):
            t = self.times[j]
            assert cov.variances[0, j] == pytest.approx(
                t ** (2 * H) / (2 * H), rel=1e-9
            )
            for i in range(1, j):
                s = self.times[i]
                expected = (
                    s ** (H + 0.5)
                    * t ** (H - 0.5)
                    * special.hyp2f1(1.0, 0.5 - H, 1.5 + H, s / t)
                    / (H + 0.5)
                )
                assert cov.matrix[
                    cov.index_m(0, i), cov.index_m(0, j)
                ] == pytest.approx(expected, rel=1e-9)
            for ell in range(1, j + 1):
                lo, hi = self.times[ell - 1], self.times[ell]
                expected = (
                    (t - lo) ** (H + 0.5) - (t - hi) ** (H + 0.5)
                ) / (H + 0.5)
                assert cov.matrix[
                    cov.index_m(0, j), cov.index_dw(0, ell)
                ] == pytest.approx(expected, rel=1e-9)

    def test_structure(self):
        cov = self.build(Power(1.0, 0.1))
        assert np.array_equal(cov.matrix, cov.matrix.T)
        assert cov.variances[0, 0] == 0.0
        assert cov.index_m(0, 0) not in cov.active
        n = self.grid.n_steps
        increments = cov.matrix[n + 1 :, n + 1 :]
        assert np.allclose(increments, self.grid.step * np.eye(n))
        restricted = cov.matrix[np.ix_(cov.active, cov.active)]
        assert np.allclose(cov.factor @ cov.factor.T, restricted, atol=1e-12)

    def test_brownian_kernel_is_degenerate_but_factorized(self):
        # M_t = a W_t is a sum of the increments
        cov = self.build(Power(1.0, 0.5))
        restricted = cov.matrix[np.ix_(cov.active, cov.active)]
        assert np.allclose(cov.factor @ cov.factor.T, restricted, atol=1e-10)

    def test_factorize_rejects_indefinite_matrix(self):
        with pytest.raises(NumericalError, match="semidefinite"):
            mc_oracle._factorize(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_grid_must_end_at_horizon(self):
        model = rough_model()
        with pytest.raises(DomainError, match="horizon"):
            mc_oracle.build_driver_covariance(model, SimGrid.uniform(2.0, 8))


class TestsSimulator:
    def setup_method(self):
        self.grid = SimGrid.uniform(1.0, 4)

    def test_grid_needs_two_steps(self):
        with pytest.raises(DomainError, match="n_steps"):
            SimGrid.uniform(1.0, 1)

    def test_shapes(self):
        sim = PathSimulator(rough_model(), self.grid)
        bundle = sim.simulate(25, seed=3)
        assert bundle.terminal_log_price.shape == (25, 2)
        plain = PathSimulator(rough_model(), self.grid, antithetic=False)
        assert plain.simulate(25, seed=3).integrated_variance.shape == (25, 1)

    def test_reproducible_for_any_number_of_workers(self):
        model = two_factor_model()
        serial = PathSimulator(model, self.grid, block_size=7)
        threaded = PathSimulator(model, self.grid, block_size=7, workers=3)
        first = serial.simulate(30, seed=11)
        second = threaded.simulate(30, seed=11)
        assert np.array_equal(
            first.terminal_log_price, second.terminal_log_price
        )
        assert np.array_equal(
            first.integrated_variance, second.integrated_variance
        )
        other = serial.simulate(30, seed=12)
        assert not np.array_equal(
            first.terminal_log_price, other.terminal_log_price
        )

    def test_antithetic_columns_mirror_the_draws(self):
        sim = PathSimulator(rough_model(eps=0.0), self.grid)
        bundle = sim.simulate(50, seed=5)
        drift = np.log(SPOT) - 0.5 * 0.04
        centred = bundle.terminal_log_price - drift
        assert np.allclose(centred[:, 0], -centred[:, 1], atol=1e-12)

    def test_common_random_numbers(self):
        sim = PathSimulator(rough_model(), self.grid)
        crn = sim.simulate_crn(40, 9, [0.4, 0.1])
        assert np.array_equal(
            crn[1].terminal_log_price,
            sim.simulate(40, 9, eps=0.1).terminal_log_price,
        )

    def test_block_signal(self):
        sim = PathSimulator(rough_model(), self.grid, block_size=10)
        seen = []

        def receiver(sender, block, n_blocks, size):
            seen.append((block, n_blocks, size))

        signal = PathSimulator.signals[PathSimulator.simulate_block]
        signal.connect(receiver, sender=sim)
        try:
            sim.simulate(25, seed=1)
        finally:
            signal.disconnect(receiver, sender=sim)
        assert sorted(seen) == [(0, 3, 10), (1, 3, 10), (2, 3, 5)]

    def test_dump_and_restore(self, tmp_path):
        sim = PathSimulator(rough_model(), self.grid)
        msg = sim.dump(dpath=str(tmp_path))
        assert msg.startswith("Attributes dumped to:")
        other = PathSimulator(rough_model(eps=0.1), SimGrid.uniform(1.0, 2))
        other.restore(dpath=str(tmp_path))
        assert other.grid.n_steps == 4
        assert np.array_equal(other.covariance.matrix, sim.covariance.matrix)
        assert np.array_equal(
            other.simulate(10, 2).terminal_log_price,
            sim.simulate(10, 2).terminal_log_price,
        )

    def test_invalid_block_size(self):
        with pytest.raises(DomainError, match="block_size"):
            PathSimulator(rough_model(), self.grid, block_size=0)


class TestsEstimators:
    def setup_method(self):
        self.grid = SimGrid.uniform(1.0, 4)
        self.fine_grid = SimGrid.uniform(1.0, 16)

    def test_black_scholes_limit(self):
        model = rough_model(eps=0.0)
        sim = PathSimulator(model, self.grid)
        bundle = sim.simulate(20000, seed=2024)
        assert np.allclose(bundle.integrated_variance, 0.04, atol=1e-15)
        for strike in (80.0, 90.0, 100.0, 110.0, 120.0):
            estimate = mc_oracle.put_estimate(bundle, strike, 2024)
            expected = put_price(BsQuote(SPOT, strike, 0.04))
            assert within(estimate, expected), "K={}: {} vs {}".format(
                strike, estimate, expected
            )

    def test_martingale(self):
        for model in (rough_model(), two_factor_model()):
            forward = mc_oracle.mc_forward(model, self.fine_grid, 20000, 7)
            assert within(forward, SPOT), repr(forward)

    def test_variance_compensator(self):
        sim = PathSimulator(rough_model(), self.fine_grid)
        bundle = sim.simulate(20000, seed=8)
        estimate = mc_oracle._estimate(bundle.integrated_variance, 8)
        assert within(estimate, 0.04)

    def test_antithetic_reduces_put_error(self):
        model = rough_model()
        plain = PathSimulator(model, self.grid, antithetic=False)
        mirrored = PathSimulator(model, self.grid)
        se_plain = mc_oracle.mc_put(
            model, 90.0, self.grid, 20000, 4, simulator=plain
        ).std_error
        se_mirrored = mc_oracle.mc_put(
            model, 90.0, self.grid, 20000, 4, simulator=mirrored
        ).std_error
        assert se_mirrored < se_plain

    def test_antithetic_keeps_the_mean(self):
        model = rough_model()
        plain = PathSimulator(model, self.grid, antithetic=False)
        mirrored = PathSimulator(model, self.grid)
        for strike in (90.0, 100.0, 110.0):
            a = mc_oracle.mc_put(
                model, strike, self.grid, 20000, 21, simulator=plain
            )
            b = mc_oracle.mc_put(
                model, strike, self.grid, 20000, 22, simulator=mirrored
            )
            band = 4.0 * sqrt(a.std_error**2 + b.std_error**2)
            assert abs(a.mean - b.mean) <= band, "K={}: {} vs {}".format(
                strike, a, b
            )

    def test_digital_and_implied_variance(self):
        model = rough_model(eps=0.0)
        sim = PathSimulator(model, self.grid)
        digital = mc_oracle.mc_digital(
            model, 100.0, self.grid, 20000, 6, simulator=sim
        )
        assert within(digital, special.ndtr(0.1))
        iv = mc_oracle.mc_implied_variance(
            model, 100.0, self.grid, 20000, 6, simulator=sim
        )
        assert within(iv, 0.04)

    def test_estimate_records_run(self):
        estimate = mc_oracle.mc_put(rough_model(), 100.0, self.grid, 100, 13)
        assert estimate.n_paths == 100
        assert estimate.seed == 13

    def test_far_strikes(self):
        model = rough_model(eps=0.0)
        sim = PathSimulator(model, self.grid)
        tiny = mc_oracle.mc_put(model, 1e-6, self.grid, 1000, 1, simulator=sim)
        assert tiny.mean == 0.0
        with pytest.raises(ArbitrageBoundsError):
            mc_oracle.mc_implied_variance(
                model, SPOT / 4, self.grid, 1000, 1, simulator=sim
            )


class TestsConvergenceStudy:
    def setup_method(self):
        self.grid = SimGrid.uniform(1.0, 8)
        self.model = rough_model()
        self.sim = PathSimulator(self.model, self.grid)

    def test_table(self):
        table = mc_oracle.convergence_study(
            self.model,
            SPOT,
            [0.4, 0.2, 0.0],
            self.grid,
            5000,
            3,
            simulator=self.sim,
        )
        assert list(table.columns) == [
            "eps",
            "p_mc",
            "se",
            "p_exp",
            "err",
            "err_over_eps",
            "ratio",
        ]
        assert table["eps"].tolist() == [0.4, 0.2, 0.0]
        assert np.isnan(table["ratio"].iloc[0])
        assert np.isnan(table["err_over_eps"].iloc[2])
        last = table.iloc[2]
        assert last["err"] <= 4.0 * last["se"]
        assert last["p_exp"] == put_price(BsQuote(SPOT, SPOT, 0.04))

    def test_rows_share_draws_with_single_runs(self):
        table = mc_oracle.convergence_study(
            self.model,
            95.0,
            [0.4, 0.2],
            self.grid,
            2000,
            21,
            simulator=self.sim,
        )
        single = mc_oracle.mc_put(
            self.model.with_eps(0.2),
            95.0,
            self.grid,
            2000,
            21,
            simulator=self.sim,
        )
        assert table["p_mc"].iloc[1] == pytest.approx(single.mean, rel=1e-14)

    def test_eps_list_must_decrease(self):
        with pytest.raises(DomainError, match="strictly decreasing"):
            mc_oracle.convergence_study(
                self.model, SPOT, [0.1, 0.2], self.grid, 100, 1
            )


class TestsKernelRegression:
    def setup_method(self):
        rng = np.random.default_rng(1)
        self.x = rng.standard_normal(2000)
        self.y = 2.0 * self.x + 1.0

    def test_silverman_bandwidth(self):
        reg = KernelRegression().fit(self.x, self.y)
        expected = 1.06 * np.std(self.x, ddof=1) * 2000 ** (-0.2)
        assert reg.bandwidth == pytest.approx(expected, rel=1e-14)

    def test_linear_trend(self):
        reg = KernelRegression().fit(self.x, self.y)
        assert float(reg.predict(0.0)) == pytest.approx(1.0, abs=0.1)
        assert reg.predict([0.0, 0.5]).shape == (2,)

    def test_infinite_bandwidth_gives_sample_mean(self):
        reg = KernelRegression(bandwidth=1e8).fit(self.x, self.y)
        assert float(reg.predict(3.0)) == pytest.approx(np.mean(self.y))
        assert float(reg.effective_sample_size(3.0)) == pytest.approx(2000)

    def test_far_point_stays_finite(self):
        reg = KernelRegression(bandwidth=0.01).fit(self.x, self.y)
        assert np.isfinite(reg.predict(50.0))
        assert float(reg.effective_sample_size(50.0)) == pytest.approx(1.0)

    def test_invalid_input(self):
        with pytest.raises(DomainError):
            KernelRegression(bandwidth=0.0)
        with pytest.raises(DomainError, match="matching"):
            KernelRegression().fit([1.0, 2.0], [1.0])
        with pytest.raises(DomainError, match="constant"):
            KernelRegression().fit([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


class TestsConditionalExperiment:
    def test_constant_variance(self):
        model = rough_model(eps=0.0)
        grid = SimGrid.uniform(1.0, 4)
        with pytest.warns(debugging.ExperimentalFeatureWarning):
            table = mc_oracle.conditional_iv_experiment(
                model, [100.0, 50.0], grid, 4000, 17
            )
        assert list(table.columns) == [
            "strike",
            "regression_iv",
            "mc_iv",
            "expansion_iv",
            "flag",
        ]
        assert np.allclose(table["regression_iv"], 0.04, atol=1e-14)
        assert table["expansion_iv"].tolist() == [0.04, 0.04]
        assert table["flag"].iloc[0] == ""
        assert "sparse" in table["flag"].iloc[1]


@pytest.mark.slow
class TestsReferenceConvergence:
    """Desk-scale runs on the reference rough model."""

    def setup_method(self):
        self.model = rough_model(eps=0.2)

    def test_error_shrinks_faster_than_eps(self):
        grid = SimGrid.uniform(1.0, 200)
        sim = PathSimulator(self.model, grid, workers=4)
        table = mc_oracle.convergence_study(
            self.model,
            SPOT,
            [0.4, 0.2, 0.1, 0.05],
            grid,
            1000000,
            20240101,
            simulator=sim,
        )
        ok, reason = passes(table)
        assert ok, "{}\n{}".format(reason, table)

    def test_grid_refinement_bias(self):
        prices = []
        for n_steps in (200, 400):
            grid = SimGrid.uniform(1.0, n_steps)
            prices.append(
                mc_oracle.mc_put(
                    self.model,
                    SPOT,
                    grid,
                    200000,
                    20240101,
                    simulator=PathSimulator(self.model, grid, workers=4),
                )
            )
        coarse, fine = prices
        spread = sqrt(coarse.std_error**2 + fine.std_error**2)
        assert abs(coarse.mean - fine.mean) <= 3.0 * spread
