#!/usr/bin/env python3
"""
Simulation Configuration Module
Numerical tolerances and the JSON configuration layer shared by every command
"""

import json
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from logger import get_logger

DEFAULT_CONFIG_FILE = Path(__file__).parent.parent / 'config' / 'simulation_config.json'


@dataclass(frozen=True)
class Tolerances:
    """Every numerical threshold used by the solver, the builders and validation"""

    density: float = 1e-12
    negativity: float = 1e-8
    hermitization: float = 1e-8
    steady_residual: float = 1e-10
    condition: float = 1e12
    resonance: float = 1e-9
    trace_annihilation: float = 1e-12
    rtol: float = 1e-10
    atol: float = 1e-12

    def override(self, **values):
        """Copy with the given (non-None) thresholds replaced"""
        known = {f.name for f in fields(self)}
        updates = {k: float(v) for k, v in values.items() if v is not None and k in known}
        return replace(self, **updates)


DEFAULT_TOLERANCES = Tolerances()

DEFAULT_CONFIG = {
    'gamma1': 1.0,
    'gamma2': 1.0,
    'rabi0': 15.0,
    'delta0': 15.0,
    'deltaL': 0.0,
    'kr12': math.pi / 2,
    'cos2eta': 1.0 / 3.0,
    'model': 'full',
    'variant': 'mutual',
    'dephasing': 'quarter',
    'points': None,
    'threads': 0,
    'log_level': 'INFO',
}
for _tol in fields(Tolerances):
    DEFAULT_CONFIG[f"tol_{_tol.name}"] = _tol.default


def load_config(config_file=None):
    """Load the JSON configuration merged over the defaults"""
    logger = get_logger()
    if config_file is None:
        config_file = DEFAULT_CONFIG_FILE

    config = dict(DEFAULT_CONFIG)
    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            loaded = json.load(f)
        logger.info(f"Configuration loaded from {config_file}",
                    component="Config", operation="Load")
    except FileNotFoundError:
        logger.warning(f"Config file not found: {config_file}. Using defaults.",
                       component="Config", operation="Load")
        return config
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in config file: {e}",
                     component="Config", operation="Load")
        return config

    if not isinstance(loaded, dict):
        logger.error(f"Config root must be an object, got {type(loaded).__name__}. Using defaults.",
                     component="Config", operation="Load")
        return config

    for key, value in loaded.items():
        if key.startswith('_'):
            continue
        if key not in DEFAULT_CONFIG:
            logger.warning(f"Unknown config key ignored: {key}",
                           component="Config", operation="Load")
            continue
        config[key] = value
    return config


def tolerances_from_config(config):
    """Build Tolerances from the tol_* keys of a config dict"""
    values = {}
    for tol in fields(Tolerances):
        key = f"tol_{tol.name}"
        if config.get(key) is not None:
            values[tol.name] = config[key]
    return DEFAULT_TOLERANCES.override(**values)
