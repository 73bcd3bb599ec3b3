"""Monte Carlo estimators of channel hardening, favorable propagation and
interference metrics.

Each drop draws every user's angles and ray coefficients afresh from its
own :class:`~raymimo.angular.RNGStream`, keyed by ``(seed, N)`` and the drop
index, so results do not depend on evaluation order. Partial results are
merged through :class:`RunningMoments`, whose merge is associative.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .angular import RNGStream
from .array import (
    ULA,
    ChannelRealization,
    RayChannelSpec,
    cross_inner,
    exponential_decay_powers,
    generate_channel,
)
from .errors import ConfigurationError, DegenerateEnsembleError

__all__ = [
    "RunningMoments",
    "MetricRow",
    "MetricSeries",
    "DropConfig",
    "ch_statistic",
    "fp_statistic",
    "eta_i",
    "eta_all",
    "draw_drop",
    "ch_fp_series",
    "eta_series",
    "zeta_lsp",
    "rayleigh_baseline",
    "empirical_quantiles",
]

CSV_HEADER = ("metric", "N", "K", "mean", "stderr", "samples")


@dataclass
class RunningMoments:
    """Streaming ``(sum, sum of squares, count)`` triple."""

    total: float = 0.0
    total_sq: float = 0.0
    count: int = 0

    def add(self, values):
        values = np.asarray(values, dtype=float).ravel()
        self.total += float(values.sum())
        self.total_sq += float(np.dot(values, values))
        self.count += values.size
        return self

    def merge(self, other):
        return RunningMoments(self.total + other.total, self.total_sq + other.total_sq,
                              self.count + other.count)

    @property
    def mean(self):
        return self.total / self.count

    @property
    def variance(self):
        if self.count < 2:
            return 0.0
        var = (self.total_sq - self.total ** 2 / self.count) / (self.count - 1)
        return max(var, 0.0)

    @property
    def stderr(self):
        return math.sqrt(self.variance / self.count) if self.count else 0.0


@dataclass(frozen=True)
class MetricRow:
    metric: str
    N: int
    K: int
    mean: float
    stderr: float
    samples: int

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


@dataclass
class MetricSeries:
    """Rows of ``(metric, N, K, mean, stderr, samples)``; serializes to CSV."""

    rows: list = field(default_factory=list)

    def append(self, row):
        self.rows.append(row)

    def extend(self, other):
        self.rows.extend(other.rows)

    def select(self, metric):
        return MetricSeries([r for r in self.rows if r.metric == metric])

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.metric, r.N, r.K, repr(float(r.mean)), repr(float(r.stderr)),
                             r.samples])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [MetricRow(r["metric"], int(r["N"]), int(r["K"]), float(r["mean"]),
                              float(r["stderr"]), int(r["samples"])) for r in reader]
        return cls(rows)


def _vector(h):
    return h.h if isinstance(h, ChannelRealization) else np.asarray(h)


def ch_statistic(h):
    """Normalized desired-channel power ``h^H h / N``."""
    v = _vector(h)
    return float(np.sum(np.abs(v) ** 2)) / v.shape[0]


def fp_statistic(h_i, h_j):
    """Normalized cross-user magnitude ``|h_i^H h_j| / N``."""
    return abs(cross_inner(h_i, h_j)) / _vector(h_i).shape[0]


def eta_i(target, interferers):
    """Total normalized interference ``sum_j |h_i^H h_j / N|^2``."""
    v = _vector(target)
    n = v.shape[0]
    total = 0.0
    for h in interferers:
        total += abs(cross_inner(v, _vector(h)) / n) ** 2
    return total


def eta_all(H):
    """``eta_i`` for every column of the ``N x K`` channel matrix ``H`` at once."""
    n = H.shape[0]
    gram = np.abs(H.conj().T @ H / n) ** 2
    return gram.sum(axis=1) - np.diag(gram)


def _channel_matrix(channels):
    return np.column_stack([c.h for c in channels])


def _size_of(geom):
    return geom.n if isinstance(geom, ULA) else geom.nx * geom.ny


@dataclass(frozen=True)
class DropConfig:
    """An ensemble of drops at one array size.

    Parameters
    ----------
    spec : RayChannelSpec
        Per-user ray model; its ray powers fix the shape of the power profile,
        they are rescaled to each user's link gain.
    geometry : ULA or UPA
    drops : int
    seed : int
    users : int, optional
        Number of users ``K``. Exactly one of ``users`` and ``alpha`` is set.
    alpha : float, optional
        Antennas per user; ``K = round(N / alpha)``.
    link_gains : {"equal", "decay"}
        ``"decay"`` spreads the gains geometrically so that the weakest user
        has 1/10 of the strongest, normalized to mean 1; the desired user is
        assigned one of them at random each drop.
    """

    spec: RayChannelSpec
    geometry: object
    drops: int = 200
    seed: int = 0
    users: Optional[int] = None
    alpha: Optional[float] = None
    link_gains: str = "equal"

    def __post_init__(self):
        if (self.users is None) == (self.alpha is None):
            raise ConfigurationError("set exactly one of users and alpha")
        if self.alpha is not None and not self.alpha > 0:
            raise ConfigurationError("alpha must be positive")
        if self.drops < 1:
            raise ConfigurationError("drops must be >= 1")
        if self.link_gains not in ("equal", "decay"):
            raise ConfigurationError("link_gains must be 'equal' or 'decay'")
        if self.K < 1:
            raise ConfigurationError("the ensemble needs at least one user")

    @property
    def N(self):
        return _size_of(self.geometry)

    @property
    def K(self):
        if self.users is not None:
            return int(self.users)
        return max(1, int(round(self.N / self.alpha)))

    def gains(self):
        if self.link_gains == "equal":
            return np.ones(self.K)
        return exponential_decay_powers(self.K, total=self.K)

    def stream(self, drop):
        return RNGStream(self.seed, self.N).child(drop)


def draw_drop(config, drop):
    """All users' channels for one drop.

    Returns
    -------
    channels : list of ChannelRealization
    desired : int
        Index of the desired user, drawn uniformly so that it receives a
        random one of the link gains.
    """
    rng = config.stream(drop)
    gains = config.gains()
    channels = [generate_channel(config.spec.with_link_gain(g), config.geometry, rng)
                for g in gains]
    desired = int(rng.generator.integers(config.K))
    return channels, desired


def ch_fp_series(config, metric_prefix=""):
    """Per-drop CH statistic ``S = h_1^H h_1 / N`` and FP statistic ``I = |h_1^H h_2| / N``.

    Returns the summary rows and the raw per-drop ``S`` samples (used for
    empirical CDFs).
    """
    if config.K < 2:
        raise ConfigurationError("ch_fp_series needs at least two users")
    s = np.empty(config.drops)
    fp = np.empty(config.drops)
    for drop in range(config.drops):
        channels, _ = draw_drop(config, drop)
        s[drop] = ch_statistic(channels[0])
        fp[drop] = fp_statistic(channels[0], channels[1])
    series = MetricSeries()
    for name, values in ((metric_prefix + "S", s), (metric_prefix + "I", fp)):
        m = RunningMoments().add(values)
        series.append(MetricRow(name, config.N, config.K, m.mean, m.stderr, m.count))
    return series, s


def _drop_eta(config, drop, desired_only):
    channels, desired = draw_drop(config, drop)
    H = _channel_matrix(channels)
    if desired_only:
        h = H[:, desired]
        n = H.shape[0]
        cross = np.abs(h.conj() @ H / n) ** 2
        own = cross[desired]
        return own, cross.sum() - own
    n = H.shape[0]
    gram = np.abs(H.conj().T @ H / n) ** 2
    own = np.diag(gram).copy()
    return own, gram.sum(axis=1) - own


def eta_series(config, metric="eta", desired_only=False):
    """Monte Carlo ``E[eta_i]`` at one array size.

    With ``desired_only=False`` every user of a drop serves in turn as the
    desired user and the per-drop average is one sample; this has the same
    expectation as a randomly allocated desired user.
    """
    moments = RunningMoments()
    for drop in range(config.drops):
        _, eta = _drop_eta(config, drop, desired_only)
        moments.add(np.mean(eta))
    return MetricRow(metric, config.N, config.K, moments.mean, moments.stderr, moments.count)


def _jackknife_ratio(num, den):
    n = num.size
    total_num = num.sum()
    total_den = den.sum()
    if total_den == 0:
        raise DegenerateEnsembleError("zero interference estimate")
    ratio = total_num / total_den
    if n < 2:
        return ratio, 0.0
    loo_den = total_den - den
    if np.any(loo_den == 0):
        raise DegenerateEnsembleError("zero leave-one-out interference estimate")
    loo = (total_num - num) / loo_den
    se = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return ratio, se


def zeta_lsp(config, desired_only=False):
    """Ratio-of-means estimate of ``E[|h_i^H h_i|^2] / sum_j E[|h_i^H h_j|^2]``.

    Numerator and denominator (both normalized by ``N^2``) are averaged over
    drops separately and then divided. The stderr is a jackknife over drops.

    Returns
    -------
    MetricSeries
        Rows ``zeta`` (with jackknife stderr), ``zeta_num`` and ``zeta_den``.

    Raises
    ------
    DegenerateEnsembleError
        If the denominator estimate is zero (e.g. a single user).
    """
    num = np.empty(config.drops)
    den = np.empty(config.drops)
    for drop in range(config.drops):
        own, eta = _drop_eta(config, drop, desired_only)
        num[drop] = np.mean(own)
        den[drop] = np.mean(eta)
    ratio, se = _jackknife_ratio(num, den)
    series = MetricSeries()
    series.append(MetricRow("zeta", config.N, config.K, float(ratio), float(se), config.drops))
    for name, values in (("zeta_num", num), ("zeta_den", den)):
        m = RunningMoments().add(values)
        series.append(MetricRow(name, config.N, config.K, m.mean, m.stderr, m.count))
    return series


def rayleigh_baseline(n, k, drops, rng, method="projected"):
    """``eta_i`` for i.i.d. CN(0, 1) channels with unit gains.

    Parameters
    ----------
    n, k : int
        Antennas and users.
    drops : int
    rng : RNGStream
    method : {"projected", "direct"}
        ``"direct"`` draws the full ``N x K`` matrix. ``"projected"`` uses
        that, given ``h_i``, each ``h_i^H h_j / |h_i|`` is CN(0, 1) and
        independent over ``j``, so ``eta_i = G_N G_{K-1} / N^2`` with
        independent unit-scale Gamma variables. Both are exact in law.

    Returns
    -------
    MetricSeries
        One ``eta_rayleigh`` row; its mean converges to ``(K - 1) / N``.
    """
    gen = rng.generator
    if k == 1:
        return MetricSeries([MetricRow("eta_rayleigh", n, k, 0.0, 0.0, drops)])
    if method == "projected":
        own = gen.gamma(n, 1.0, drops)
        others = gen.gamma(k - 1, 1.0, drops)
        samples = own * others / n ** 2
    elif method == "direct":
        samples = np.empty(drops)
        scale = 1.0 / math.sqrt(2.0)
        for t in range(drops):
            H = scale * (gen.standard_normal((n, k)) + 1j * gen.standard_normal((n, k)))
            cross = np.abs(H[:, 0].conj() @ H[:, 1:] / n) ** 2
            samples[t] = cross.sum()
    else:
        raise ValueError(f"unknown method {method!r}")
    m = RunningMoments().add(samples)
    return MetricSeries([MetricRow("eta_rayleigh", n, k, m.mean, m.stderr, m.count)])


def empirical_quantiles(samples, count=200):
    """``count`` evenly spaced empirical quantiles (for CDF curves)."""
    probs = (np.arange(count) + 0.5) / count
    return probs, np.quantile(np.asarray(samples, dtype=float), probs)
