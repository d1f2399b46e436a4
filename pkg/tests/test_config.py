# -*- coding: utf-8 -

"""Tests of the JSON configuration layer.

SPDX-License-Identifier: MIT
"""

import copy
import json
import os

import pytest

from svexpansion import config
from svexpansion.errors import ConfigError
from svexpansion.model import Custom
from svexpansion.model import Power

REFERENCE = os.path.join(
    os.path.dirname(__file__), os.pardir, "configs", "reference.json"
)


class TestsLoadConfig:
    def setup_method(self):
        with open(REFERENCE) as f:
            self.document = json.load(f)

    def load(self, document, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(document))
        return config.load_config(str(path))

    def test_reference(self):
        cfg = config.load_config(REFERENCE)
        assert cfg.model.spot == 100.0
        assert cfg.model.factors[0].kernel == Power(1.0, 0.1)
        assert cfg.model.factors[0].rho == -0.7
        assert cfg.run.strikes[3] == 100.0
        assert cfg.run.n_steps == 200
        assert cfg.run.antithetic is True
        assert cfg.run.workers is None
        assert cfg.conditional_mean is None

    def test_model_round_trip(self):
        model = config.model_from_dict(self.document["model"])
        assert config.model_to_dict(model) == self.document["model"]

    def test_run_defaults(self):
        del self.document["run"]
        cfg = config.config_from_dict(self.document)
        assert cfg.run.strikes == [100.0]
        assert cfg.run.eps_list == [0.4, 0.2, 0.1, 0.05]
        assert cfg.run.seed == 42
        assert cfg.run.bandwidth is None

    def test_missing_kernel_parameter(self):
        del self.document["model"]["factors"][0]["kernel"]["H"]
        with pytest.raises(ConfigError) as info:
            config.config_from_dict(self.document)
        assert info.value.key == "model.factors[0].kernel.H"
        assert str(info.value) == "model.factors[0].kernel.H: missing"

    def test_out_of_range_parameter_names_the_object(self):
        self.document["model"]["factors"][0]["kernel"]["H"] = 0.7
        with pytest.raises(ConfigError, match="H must lie in") as info:
            config.config_from_dict(self.document)
        assert info.value.key == "model.factors[0].kernel"

    def test_unknown_kernel_type(self):
        self.document["model"]["factors"][0]["kernel"]["type"] = "gamma"
        with pytest.raises(ConfigError) as info:
            config.config_from_dict(self.document)
        assert info.value.key == "model.factors[0].kernel.type"

    def test_non_numeric_values(self):
        for key, value in (("eps", "0.2"), ("spot", True)):
            document = copy.deepcopy(self.document)
            document["model"][key] = value
            with pytest.raises(ConfigError, match="expected a number") as e:
                config.config_from_dict(document)
            assert e.value.key == "model.{}".format(key)

    def test_model_level_violation(self):
        self.document["model"]["factors"].append(
            {"rho": 0.8, "kernel": {"type": "exponential", "a": 1, "b": 1}}
        )
        with pytest.raises(ConfigError, match="aggregate correlation") as e:
            config.config_from_dict(self.document)
        assert e.value.key == "model"

    def test_run_validation(self):
        for key, value, where in (
            ("eps_list", [0.1, 0.2], "run.eps_list"),
            ("n_paths", 1, "run.n_paths"),
            ("n_steps", 10.5, "run.n_steps"),
            ("strikes", [100.0, -5.0], "run.strikes[1]"),
            ("antithetic", "yes", "run.antithetic"),
            ("bandwidth", 0.0, "run.bandwidth"),
            ("colour", "red", "run.colour"),
        ):
            document = copy.deepcopy(self.document)
            document["run"][key] = value
            with pytest.raises(ConfigError) as info:
                config.config_from_dict(document)
            assert info.value.key == where, "{}={!r}".format(key, value)

    def test_piecewise_curve_and_tabulated_kernel(self):
        self.document["model"]["curve"] = {
            "type": "piecewise_constant",
            "breakpoints": [0.0, 0.5, 1.0],
            "values": [0.04, 0.09],
        }
        self.document["model"]["factors"][0]["kernel"] = {
            "type": "tabulated",
            "times": [0.0, 0.5, 1.0],
            "values": [1.0, 0.6, 0.4],
        }
        model = config.config_from_dict(self.document).model
        assert model.curve.integral(0.0, 1.0) == pytest.approx(0.065)
        assert config.model_to_dict(model) == self.document["model"]

    def test_affine_override(self):
        self.document["model"]["conditional_mean"] = {
            "type": "affine",
            "exy": -0.03,
        }
        cfg = config.config_from_dict(self.document)
        assert cfg.conditional_mean.exy == -0.03

    def test_polynomial_conditional_mean(self):
        self.document["model"]["conditional_mean"] = {
            "type": "polynomial",
            "coefficients": [-0.01, -0.03, 0.01],
        }
        cond_mean = config.config_from_dict(self.document).conditional_mean
        assert isinstance(cond_mean, Custom)
        assert float(cond_mean.m(2.0)) == pytest.approx(-0.01 - 0.06 + 0.04)
        assert float(cond_mean.dm(2.0)) == pytest.approx(-0.03 + 0.04)
        assert float(cond_mean.d2m(2.0)) == pytest.approx(0.02)

    def test_unreadable_files(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read") as info:
            config.load_config(str(tmp_path / "missing.json"))
        assert info.value.key == "config"
        broken = tmp_path / "broken.json"
        broken.write_text("{ not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            config.load_config(str(broken))

    def test_load_from_file(self, tmp_path):
        self.document["run"]["workers"] = 2
        cfg = self.load(self.document, tmp_path)
        assert cfg.run.workers == 2
