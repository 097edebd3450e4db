# -*- coding: utf-8 -*-
"""
Configuration manager tests
"""

import json
import os

import pytest

from core.config_manager import AppConfig, ConfigManager, THREADS_ENV
from core.errors import ConfigurationError
from core.solvers.base import BetaBackend, Engine

TEMPLATE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                        "configs", "solver_config_template.yaml")


@pytest.fixture(autouse=True)
def no_thread_cap(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)


def load(path):
    manager = ConfigManager(str(path))
    config = manager.load_config()
    return manager, config


class TestLoading:
    """YAML, INI and JSON files"""

    def test_template(self):
        manager, config = load(TEMPLATE)
        assert manager.validate_config()
        assert config.engine is Engine.DUAL
        assert config.admm.beta_update_backend is BetaBackend.FACTORIZATION
        assert config.dual.tol == pytest.approx(1e-6)
        assert config.benchmark.sizes == [10, 20, 40]
        assert "FKTF-admm-chol" in config.benchmark.estimators

    def test_yaml(self, tmp_path):
        path = tmp_path / "solver.yaml"
        path.write_text("solver:\n  engine: admm\nadmm:\n  rho1: 2.5\n  beta_update_backend: cg\n"
                        "logging:\n  level: debug\nruntime:\n  threads: 4\n")
        manager, config = load(path)
        assert config.engine is Engine.ADMM
        assert config.admm.rho1 == 2.5
        assert config.admm.rho2 == 1.0
        assert config.admm.beta_update_backend is BetaBackend.CG
        assert config.logging_level == "DEBUG"
        assert config.threads == 4
        assert manager.validate_config()

    def test_ini_values_are_coerced(self, tmp_path):
        path = tmp_path / "solver.ini"
        path.write_text("[admm]\neps_abs = 1e-5\nmax_iter = 500\ncg_max_iter = 40\n\n"
                        "[dual]\npolish = false\n\n"
                        "[benchmark]\nsizes = 8, 16\nestimators = FGTF-dual, FKTF-dual\n")
        _, config = load(path)
        assert config.admm.eps_abs == pytest.approx(1e-5)
        assert config.admm.max_iter == 500
        assert config.admm.cg_max_iter == 40
        assert config.dual.polish is False
        assert config.benchmark.sizes == [8, 16]
        assert config.benchmark.estimators == ["FGTF-dual", "FKTF-dual"]

    def test_json(self, tmp_path):
        path = tmp_path / "solver.json"
        path.write_text(json.dumps({"dual": {"tol": 1e-9, "max_iter": 20}, "solver": {"engine": "dual"}}))
        _, config = load(path)
        assert config.dual.tol == pytest.approx(1e-9)
        assert config.dual.max_iter == 20

    def test_unknown_keys_ignored(self, tmp_path):
        path = tmp_path / "solver.yaml"
        path.write_text("admm:\n  momentum: 0.9\n")
        _, config = load(path)
        assert config.admm == AppConfig().admm

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "solver.yaml"
        path.write_text("")
        _, config = load(path)
        assert config == AppConfig()


class TestErrors:
    """Bad files and values"""

    def test_explicit_missing_path(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ConfigManager(str(tmp_path / "absent.yaml")).load_config()

    def test_unsupported_extension(self, tmp_path):
        path = tmp_path / "solver.toml"
        path.write_text("x = 1\n")
        with pytest.raises(ConfigurationError):
            load(path)

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "solver.yaml"
        path.write_text("admm: [1, 2\n")
        with pytest.raises(ConfigurationError):
            load(path)

    @pytest.mark.parametrize("text", ["admm:\n  rho1: -1\n", "dual:\n  tol: 0\n",
                                      "solver:\n  engine: simplex\n", "admm:\n  max_iter: many\n"])
    def test_invalid_values(self, tmp_path, text):
        path = tmp_path / "solver.yaml"
        path.write_text(text)
        with pytest.raises(ConfigurationError):
            load(path)

    @pytest.mark.parametrize("text", ["benchmark:\n  sizes: []\n",
                                      "benchmark:\n  lambda_low: 5\n  lambda_high: 1\n",
                                      "logging:\n  level: chatty\n",
                                      "runtime:\n  threads: 0\n"])
    def test_validation_failures(self, tmp_path, text):
        path = tmp_path / "solver.yaml"
        path.write_text(text)
        manager, _ = load(path)
        assert not manager.validate_config()

    def test_validate_before_load(self):
        assert not ConfigManager(TEMPLATE).validate_config()


class TestEnvironment:
    """GTF_THREADS overrides the thread count"""

    def test_override(self, tmp_path, monkeypatch):
        path = tmp_path / "solver.yaml"
        path.write_text("runtime:\n  threads: 8\n")
        monkeypatch.setenv(THREADS_ENV, "3")
        _, config = load(path)
        assert config.threads == 3

    def test_invalid_override(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "lots")
        with pytest.raises(ConfigurationError):
            ConfigManager(TEMPLATE).load_config()
