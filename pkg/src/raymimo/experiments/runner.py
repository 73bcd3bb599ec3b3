"""Run a resolved experiment and write its manifest."""

import hashlib
import json
import platform
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .figures import REGISTRY, Output

__all__ = ["RunResult", "run_experiment"]


@dataclass(frozen=True)
class RunResult:
    directory: Path
    files: tuple
    manifest: Path


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_experiment(config, out_dir=None):
    """Execute ``config`` and write its CSVs plus ``manifest.json``.

    CSV content depends only on the config (including the seed), so reruns
    are byte-identical; the manifest also records wall-clock time.
    """
    directory = Path(out_dir or config.get("out") or f"results/{config.experiment}")
    directory.mkdir(parents=True, exist_ok=True)
    out = Output(directory)
    start = time.perf_counter()
    REGISTRY[config.experiment].runner(config, out)
    elapsed = time.perf_counter() - start
    manifest = {
        "experiment": config.experiment,
        "seed": config.seed,
        "config": {k: v for k, v in config.params.items() if k != "out"},
        "files": {name: _digest(directory / name) for name in out.files},
        "wall_clock_seconds": round(elapsed, 3),
        "numpy": np.__version__,
        "python": platform.python_version(),
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return RunResult(directory, tuple(out.files), path)
