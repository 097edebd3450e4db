"""
Configuration manager

Solver, benchmark and logging settings from INI, YAML or JSON files
"""

import configparser
import json
import logging
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import yaml

from core.errors import ConfigurationError
from core.solvers.base import AdmmConfig, BetaBackend, DualConfig, Engine

logger = logging.getLogger(__name__)

THREADS_ENV = "GTF_THREADS"


@dataclass
class BenchmarkSettings:
    """Benchmark defaults"""
    sizes: List[int] = field(default_factory=lambda: [10, 20, 40])
    seeds: int = 10
    lambda_low: float = 0.0
    lambda_high: float = 20.0
    signal: str = "bisigmoid"
    estimators: List[str] = field(default_factory=lambda: [
        "FGTF-dual", "FKTF-dual", "FGTF-admm-cg", "FKTF-admm-cg", "FGTF-admm-chol", "FKTF-admm-chol",
    ])


@dataclass
class AppConfig:
    """Application configuration"""
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    dual: DualConfig = field(default_factory=DualConfig)
    benchmark: BenchmarkSettings = field(default_factory=BenchmarkSettings)
    engine: Engine = Engine.DUAL
    logging_level: str = "INFO"
    threads: int = 1


class ConfigManager:
    """Loads AppConfig from the first config file found"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Args:
            config_path: Configuration file; None searches the configs/ directory
        """
        self.explicit = config_path is not None
        self.config_path = config_path or self._find_config_file()
        self.config: Optional[AppConfig] = None

    def _find_config_file(self) -> Optional[str]:
        """First existing file among the known names in configs/"""
        config_dir = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'configs')

        search_paths = [
            os.path.join(config_dir, 'solver_config.yaml'),
            os.path.join(config_dir, 'solver_config.yml'),
            os.path.join(config_dir, 'config.yaml'),
            os.path.join(config_dir, 'config.yml'),
            os.path.join(config_dir, 'solver_config.ini'),
            os.path.join(config_dir, 'solver_config.json'),
        ]

        for path in search_paths:
            if os.path.exists(path):
                logger.info(f"found config file: {path}")
                return path

        logger.debug("no config file found, using defaults")
        return None

    def load_config(self) -> AppConfig:
        """Load and parse the configuration; defaults when no file was found"""
        if self.config_path is None:
            raw_config: Dict[str, Any] = {}
        elif not os.path.exists(self.config_path):
            if self.explicit:
                raise ConfigurationError(f"config file does not exist: {self.config_path}")
            raw_config = {}
        else:
            file_ext = os.path.splitext(self.config_path)[1].lower()
            try:
                if file_ext in ['.yaml', '.yml']:
                    raw_config = self._load_yaml_config()
                elif file_ext == '.ini':
                    raw_config = self._load_ini_config()
                elif file_ext == '.json':
                    raw_config = self._load_json_config()
                else:
                    raise ConfigurationError(f"unsupported config format: {file_ext}")
            except (yaml.YAMLError, json.JSONDecodeError, configparser.Error) as e:
                logger.error(f"failed to load config file: {e}")
                raise ConfigurationError(f"cannot parse {self.config_path}: {e}") from e

        self.config = self._parse_config(raw_config or {})
        self._apply_environment(self.config)
        if self.config_path:
            logger.info(f"loaded config: {self.config_path}")
        return self.config

    def _load_yaml_config(self) -> Dict[str, Any]:
        with open(self.config_path, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f)

    def _load_ini_config(self) -> Dict[str, Any]:
        config = configparser.ConfigParser()
        config.read(self.config_path, encoding='utf-8')

        result = {}
        for section in config.sections():
            result[section] = dict(config.items(section))

        return result

    def _load_json_config(self) -> Dict[str, Any]:
        with open(self.config_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def _parse_config(self, raw_config: Dict[str, Any]) -> AppConfig:
        """Parse the raw dictionary into dataclasses; INI strings are coerced by field type"""
        solver = raw_config.get('solver', {}) or {}
        runtime = raw_config.get('runtime', {}) or {}
        try:
            return AppConfig(
                admm=_build(AdmmConfig, raw_config.get('admm', {})),
                dual=_build(DualConfig, raw_config.get('dual', {})),
                benchmark=_build(BenchmarkSettings, raw_config.get('benchmark', {})),
                engine=Engine(solver.get('engine', Engine.DUAL.value)),
                logging_level=str((raw_config.get('logging', {}) or {}).get('level', 'INFO')).upper(),
                threads=int(runtime.get('threads', raw_config.get('threads', 1))),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid configuration value: {e}") from e

    def _apply_environment(self, config: AppConfig) -> None:
        cap = os.environ.get(THREADS_ENV)
        if cap:
            try:
                config.threads = max(int(cap), 1)
            except ValueError as e:
                raise ConfigurationError(f"{THREADS_ENV} must be an integer, got '{cap}'") from e

    def validate_config(self) -> bool:
        """Range checks on the loaded configuration"""
        try:
            config = self.config
            if config is None:
                logger.error("configuration not loaded")
                return False

            admm = config.admm
            if admm.rho1 <= 0 or admm.rho2 <= 0:
                logger.error("rho1 and rho2 must be positive")
                return False
            if admm.eps_abs <= 0 or admm.eps_rel <= 0:
                logger.error("eps_abs and eps_rel must be positive")
                return False
            if admm.max_iter < 1 or config.dual.max_iter < 1:
                logger.error("max_iter must be at least 1")
                return False
            if admm.beta_update_backend not in (BetaBackend.CG, BetaBackend.FACTORIZATION):
                logger.error(f"unknown beta-update backend {admm.beta_update_backend}")
                return False

            bench = config.benchmark
            if not bench.sizes or min(bench.sizes) < 2:
                logger.error("benchmark sizes must be non-empty and >= 2")
                return False
            if not 0 <= bench.lambda_low <= bench.lambda_high:
                logger.error("benchmark lambda range must satisfy 0 <= low <= high")
                return False

            if config.logging_level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
                logger.error(f"unknown logging level {config.logging_level}")
                return False
            if config.threads < 1:
                logger.error("threads must be at least 1")
                return False

            logger.debug("configuration valid")
            return True

        except Exception as e:
            logger.error(f"configuration validation failed: {e}")
            return False


def _build(cls, data: Optional[Dict[str, Any]]):
    """Instantiate a config dataclass from a section, ignoring unknown keys"""
    data = data or {}
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            logger.warning(f"ignoring unknown {cls.__name__} key '{key}'")
            continue
        kwargs[key] = _coerce(value, known[key].default, known[key].default_factory)
    return cls(**kwargs)


def _coerce(value: Any, default: Any, default_factory: Any) -> Any:
    """Convert INI strings to the type of the field's default"""
    if not isinstance(value, str):
        return value
    reference = default_factory() if callable(default_factory) else default
    if isinstance(reference, bool):
        return value.strip().lower() in ('1', 'true', 'yes', 'on')
    if isinstance(reference, int):
        return int(value)
    if isinstance(reference, float):
        return float(value)
    if isinstance(reference, list):
        items = [item.strip() for item in value.split(',') if item.strip()]
        if reference and isinstance(reference[0], int):
            return [int(item) for item in items]
        return items
    if reference is None and value.strip().lower() in ('', 'none', 'null'):
        return None
    if reference is None:
        return int(value)
    return value
