"""Level-set estimation on compact manifolds: Python facade over the C++ core."""

import json as _json

from ._core import (
    ConfigError,
    DomainError,
    kernel_m0,
    mvm_density,
    mvm_normalizer,
    preset_json,
    preset_names,
    run_experiment,
    run_replication,
    sample,
    validate_config,
    version,
    vmf_density,
    wishart_density,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "kernel_m0",
    "load_preset",
    "mvm_density",
    "mvm_normalizer",
    "preset_json",
    "preset_names",
    "run",
    "run_experiment",
    "run_replication",
    "sample",
    "validate_config",
    "version",
    "vmf_density",
    "wishart_density",
]


def load_preset(name):
    """Return a shipped preset as a plain config dict."""
    return _json.loads(preset_json(name))


def run(config, **overrides):
    """Run an experiment from a preset name, a config dict, or config JSON."""
    if isinstance(config, str):
        config = load_preset(config) if not config.lstrip().startswith("{") else _json.loads(config)
    config = dict(config)
    config.update(overrides)
    return run_experiment(_json.dumps(config))
