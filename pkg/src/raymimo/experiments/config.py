"""Experiment configuration: YAML schema, parsing and validation.

A config file is a YAML mapping. Every angle is in degrees; conversion to
radians happens here. Example::

    experiment: fig1
    seed: 7
    drops: 200
    n: [64, 128, 256]

Figure experiments accept overrides of their own defaults only. The
``custom`` experiment describes a single curve in full::

    experiment: custom
    metric: eta              # ch_fp | eta | zeta | mu_ula | mu_upa | rayleigh
    geometry: {kind: ULA, d: 0.5}
    coefficient_model: random_phase
    rays: 20
    azimuth: {type: uniform, lo: 0, hi: 360}
    alpha: 2
    n: [16, 32, 64]

Angular model mappings take ``type`` plus parameters:
``uniform (lo, hi)``, ``von_mises (mu, kappa)``,
``wrapped_gaussian (mean, sigma)``, ``laplacian (mean, scale | std)`` and
``clustered (central, offset, clusters, subrays)``.
"""

import math
from dataclasses import dataclass, field

import yaml

from ..angular import Clustered, Laplacian, Uniform, VonMises, WrappedGaussian
from ..array import UPA, ULA, CoefficientModel
from ..errors import ConfigurationError

__all__ = [
    "Finding",
    "ExperimentConfig",
    "load_config",
    "parse_angular",
    "parse_geometry",
    "validate_config",
    "MAX_DESK_N",
    "MAX_DESK_DROPS",
]

MAX_DESK_N = 100_000
MAX_DESK_DROPS = 10_000
CUSTOM_METRICS = ("ch_fp", "eta", "zeta", "mu_ula", "mu_upa", "rayleigh")


@dataclass(frozen=True)
class Finding:
    level: str  # "error" or "warning"
    field: str
    message: str

    def __str__(self):
        return f"{self.level}: {self.field}: {self.message}"


@dataclass
class ExperimentConfig:
    """Resolved experiment settings (registry defaults plus file overrides)."""

    experiment: str
    params: dict = field(default_factory=dict)

    @property
    def seed(self):
        return int(self.params.get("seed", 0))

    def get(self, key, default=None):
        return self.params.get(key, default)


def _rad(x):
    return math.radians(float(x))


def parse_angular(spec, where="model"):
    """Build an angular model from a mapping with angles in degrees."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigurationError(f"{where}: expected a mapping with a 'type' key")
    kind = spec["type"]
    try:
        if kind == "uniform":
            return Uniform(_rad(spec.get("lo", 0.0)), _rad(spec.get("hi", 360.0)))
        if kind == "von_mises":
            return VonMises(_rad(spec.get("mu", 0.0)), float(spec["kappa"]))
        if kind == "wrapped_gaussian":
            return WrappedGaussian(_rad(spec.get("mean", 0.0)), _rad(spec["sigma"]))
        if kind == "laplacian":
            mean = _rad(spec.get("mean", 0.0))
            if "std" in spec and "scale" in spec:
                raise ConfigurationError(f"{where}: give either std or scale, not both")
            if "std" in spec:
                return Laplacian.from_std(mean, _rad(spec["std"]))
            return Laplacian(mean, _rad(spec["scale"]))
        if kind == "clustered":
            return Clustered(parse_angular(spec["central"], where + ".central"),
                             parse_angular(spec["offset"], where + ".offset"),
                             int(spec.get("clusters", 20)), int(spec.get("subrays", 20)))
    except KeyError as exc:
        raise ConfigurationError(f"{where}: missing parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{where}: {exc}") from None
    raise ConfigurationError(f"{where}: unknown angular model type {kind!r}")


def parse_geometry(spec, n):
    """Geometry with ``n`` elements; a UPA of ``n`` elements is square."""
    kind = spec.get("kind", "ULA")
    if kind == "ULA":
        return ULA(int(n), float(spec.get("d", 0.5)))
    if kind == "UPA":
        side = math.isqrt(int(n))
        if side * side != int(n):
            raise ConfigurationError(f"geometry: UPA sweep value {n} is not a perfect square")
        return UPA(side, side, float(spec.get("dx", 0.5)), float(spec.get("dy", 0.5)))
    raise ConfigurationError(f"geometry: unknown kind {kind!r}")


def load_config(path):
    """Read a YAML config file into a raw mapping."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a mapping")
    return raw


def _check_models(raw, findings):
    models = {}
    for key in ("azimuth", "elevation"):
        if raw.get(key) is not None:
            try:
                models[key] = parse_angular(raw[key], key)
            except ConfigurationError as exc:
                findings.append(Finding("error", key, str(exc)))
    return models


def validate_config(raw, registry=None):
    """Pure validation of a raw config mapping.

    Returns
    -------
    list of Finding
        Errors make the config unusable; warnings flag runs beyond desk
        scale (``N > 1e5`` or more than ``1e4`` drops).
    """
    from .figures import REGISTRY  # late import: figures imports this module

    registry = REGISTRY if registry is None else registry
    findings = []
    name = raw.get("experiment")
    if name not in registry:
        findings.append(Finding("error", "experiment",
                                f"unknown experiment {name!r}; see 'list'"))
        return findings
    allowed = set(registry[name].defaults) | {"experiment", "out"}
    for key in raw:
        if key not in allowed:
            findings.append(Finding("error", key, f"not a setting of {name}"))

    merged = dict(registry[name].defaults)
    merged.update({k: v for k, v in raw.items() if k != "experiment"})

    if merged.get("users") is not None and merged.get("alpha") is not None:
        findings.append(Finding("error", "alpha", "alpha and users are mutually exclusive"))
    if merged.get("alpha") is not None and not float(merged["alpha"]) > 0:
        findings.append(Finding("error", "alpha", "must be positive"))
    if merged.get("users") is not None and int(merged["users"]) < 1:
        findings.append(Finding("error", "users", "must be >= 1"))

    n = merged.get("n")
    if n is not None:
        if not isinstance(n, list) or not n or not all(isinstance(x, int) for x in n):
            findings.append(Finding("error", "n", "must be a non-empty list of integers"))
        else:
            if any(b <= a for a, b in zip(n, n[1:])):
                findings.append(Finding("error", "n", "sweep must be strictly increasing"))
            if n[0] < 1:
                findings.append(Finding("error", "n", "values must be >= 1"))
            if n[-1] > MAX_DESK_N:
                findings.append(Finding("warning", "n",
                                        f"N = {n[-1]} is beyond desk scale ({MAX_DESK_N})"))

    drops = merged.get("drops")
    if drops is not None:
        if int(drops) < 1:
            findings.append(Finding("error", "drops", "must be >= 1"))
        elif int(drops) > MAX_DESK_DROPS:
            findings.append(Finding("warning", "drops",
                                    f"{drops} drops is beyond desk scale ({MAX_DESK_DROPS})"))

    eps = merged.get("epsilon")
    if eps is not None and not 0 <= float(eps) < 2:
        findings.append(Finding("error", "epsilon", "must satisfy 0 <= epsilon < 2"))

    if "seed" in merged and not isinstance(merged["seed"], int):
        findings.append(Finding("error", "seed", "must be an integer"))

    geometry = merged.get("geometry")
    models = _check_models(merged, findings)
    if geometry is not None:
        kind = geometry.get("kind", "ULA") if isinstance(geometry, dict) else None
        if kind not in ("ULA", "UPA"):
            findings.append(Finding("error", "geometry", f"unknown kind {kind!r}"))
        elif kind == "UPA":
            if "elevation" in merged and merged["elevation"] is None:
                findings.append(Finding("error", "elevation",
                                        "UPA geometry requires an elevation model"))
            for x in n or []:
                if isinstance(x, int) and math.isqrt(x) ** 2 != x:
                    findings.append(Finding("error", "n",
                                            f"UPA sweep value {x} is not a perfect square"))
        elif kind == "ULA" and merged.get("elevation") is not None:
            findings.append(Finding("error", "elevation", "ULA geometry takes no elevation model"))

    if name == "custom":
        metric = merged.get("metric")
        if metric not in CUSTOM_METRICS:
            findings.append(Finding("error", "metric", f"must be one of {CUSTOM_METRICS}"))
        if "coefficient_model" in merged:
            try:
                CoefficientModel(merged["coefficient_model"])
            except ValueError:
                findings.append(Finding("error", "coefficient_model",
                                        f"unknown model {merged['coefficient_model']!r}"))
        az = models.get("azimuth")
        if metric in ("ch_fp", "eta", "zeta", "mu_ula", "mu_upa") and merged.get("azimuth") is None:
            findings.append(Finding("error", "azimuth", "required for this metric"))
        if metric in ("eta", "zeta", "rayleigh") and (merged.get("users") is None) == (
                merged.get("alpha") is None):
            findings.append(Finding("error", "alpha", "set exactly one of alpha and users"))
        if metric == "ch_fp" and merged.get("users") is None and merged.get("alpha") is None:
            findings.append(Finding("error", "users", "set users (at least 2) or alpha"))
        if (metric in ("ch_fp", "eta", "zeta") and not isinstance(az, Clustered)
                and az is not None and merged.get("rays") is None):
            findings.append(Finding("error", "rays", "required for a non-clustered azimuth"))
        if isinstance(az, Clustered) and merged.get("rays") not in (None, az.rays):
            findings.append(Finding("error", "rays",
                                    f"clustered azimuth yields {az.rays} rays"))
    return findings


def resolve(raw, registry=None, seed=None, out=None):
    """Validate and merge a raw mapping into an :class:`ExperimentConfig`.

    Raises
    ------
    ConfigurationError
        Listing every error finding.
    """
    from .figures import REGISTRY

    registry = REGISTRY if registry is None else registry
    errors = [f for f in validate_config(raw, registry) if f.level == "error"]
    if errors:
        raise ConfigurationError("; ".join(str(f) for f in errors))
    params = dict(registry[raw["experiment"]].defaults)
    params.update({k: v for k, v in raw.items() if k != "experiment"})
    if seed is not None:
        params["seed"] = int(seed)
    if out is not None:
        params["out"] = str(out)
    return ExperimentConfig(raw["experiment"], params)
