"""Experiment harness: configs, registered figure datasets and the CLI."""

from .config import ExperimentConfig, Finding, load_config, parse_angular, resolve, validate_config
from .figures import REGISTRY, build_spec, scheduling_drop
from .runner import RunResult, run_experiment

__all__ = [
    "ExperimentConfig",
    "Finding",
    "REGISTRY",
    "RunResult",
    "build_spec",
    "load_config",
    "parse_angular",
    "resolve",
    "run_experiment",
    "scheduling_drop",
    "validate_config",
]
