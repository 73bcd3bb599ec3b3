"""Semi-analytic interference predictors.

The per-ray-pair interference kernel ``mu = (1/N) E|a_r^H a_s|^2`` for two
independent rays is computed here in several ways:

* as the lag series ``1 + 2 sum_q (1 - q/N) |E[exp(-j q 2 pi d sin phi)]|^2``
  for a ULA, with exact (uniform, von Mises) or quadrature characteristic
  values;
* as the planar double series over lags ``(v, w)`` with
  ``M_vw = E[exp(-j 2 pi nu sin(theta) cos(phi - Delta))]`` for a UPA;
* by Monte Carlo over sampled ray pairs, using the Dirichlet kernel.

Growth in ``N`` is logarithmic when the angular density is non-zero at
end-fire; :func:`fit_log_slope` fits ``mu`` against ``ln N``.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .angular import (
    Clustered,
    Uniform,
    VonMises,
    breakpoints,
    charfn_exact_vm,
    charfn_oracle,
    endfire_density,
    pdf,
    sample,
    support,
)
from .errors import UnsupportedVariantError
from .specialfn import (
    bessel_j0,
    dirichlet_cross,
    gauss_legendre_panels,
)

__all__ = [
    "MuRow",
    "MuSeries",
    "SlopeFit",
    "MonteCarloEstimate",
    "charfn_values",
    "mu_ula",
    "mu_ula_series",
    "mu_ula_monte_carlo",
    "charfn_asymptotic",
    "m_slope",
    "expected_eta",
    "m_vw",
    "mu_upa",
    "mu_upa_uniform_closed",
    "mu_upa_monte_carlo",
    "polar_bound",
    "fit_log_slope",
]

METHODS = ("exact-series", "quadrature-series", "monte-carlo", "asymptotic")


@dataclass(frozen=True)
class MuRow:
    N: int
    mu: float
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class MuSeries:
    """Rows of ``(N, mu, method)``; serializes to CSV ``N,mu,method``."""

    rows: list = field(default_factory=list)

    def append(self, row):
        self.rows.append(row)

    @property
    def n(self):
        return np.array([r.N for r in self.rows], dtype=float)

    @property
    def mu(self):
        return np.array([r.mu for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("N", "mu", "method"))
        for r in self.rows:
            writer.writerow([r.N, repr(float(r.mu)), r.method])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit ``mu ~ slope * ln N + intercept``."""

    slope: float
    intercept: float
    r_squared: float
    n_lo: int
    n_hi: int

    def __post_init__(self):
        if not self.n_lo < self.n_hi:
            raise ValueError("n_lo must be below n_hi")

    def to_json(self):
        return json.dumps({"slope": self.slope, "intercept": self.intercept,
                           "r_squared": self.r_squared, "n_lo": self.n_lo,
                           "n_hi": self.n_hi}, sort_keys=True)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int


def _is_full_uniform(model):
    return isinstance(model, Uniform) and model.hi - model.lo >= 2.0 * np.pi - 1e-12


# ---------------------------------------------------------------- ULA ----

def charfn_values(model, d, q_max, method="exact-series", spec=None):
    """``E[exp(-j q 2 pi d sin phi)]`` for ``q = 0 .. q_max``.

    ``"exact-series"`` uses ``J0(2 pi d q)`` for a full-circle uniform model
    and the complex-Bessel form for von Mises; ``"quadrature-series"`` uses
    the quadrature oracle for any model with a density.
    """
    q = np.arange(q_max + 1)
    if method == "exact-series":
        if _is_full_uniform(model):
            return bessel_j0(2.0 * np.pi * d * q).astype(complex)
        if isinstance(model, VonMises):
            return np.asarray(charfn_exact_vm(model.mu, model.kappa, q, d), dtype=complex)
        raise UnsupportedVariantError(
            f"no exact characteristic function for {type(model).__name__}")
    if method == "quadrature-series":
        return np.array([charfn_oracle(model, int(k), d, spec) for k in q])
    raise ValueError(f"unknown method {method!r}")


def _series_from_charfn(power, ns):
    """``1 + 2 sum_{q<N} (1 - q/N) power[q]`` for every ``N`` in ``ns``."""
    q = np.arange(power.size)
    s0 = np.cumsum(power)
    s1 = np.cumsum(q * power)
    out = []
    for n in ns:
        if n == 1:
            out.append(1.0)
            continue
        # terms q = 1 .. n-1
        a = s0[n - 1] - s0[0]
        b = s1[n - 1] - s1[0]
        out.append(1.0 + 2.0 * (a - b / n))
    return np.array(out)


def mu_ula(model, d, n, method="exact-series", spec=None, rng=None, pairs=100_000):
    """Interference kernel ``mu_ULA`` at ``n`` antennas.

    Parameters
    ----------
    model : AngularModel
    d : float
        Spacing in wavelengths.
    n : int
    method : {"exact-series", "quadrature-series", "monte-carlo"}
        The Monte Carlo method needs ``rng`` and returns a
        :class:`MonteCarloEstimate`; the series methods return a float.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "monte-carlo":
        if rng is None:
            raise ValueError("monte-carlo needs an rng")
        return mu_ula_monte_carlo(model, d, n, rng, pairs)
    if n == 1:
        return 1.0
    power = np.abs(charfn_values(model, d, n - 1, method, spec)) ** 2
    return float(_series_from_charfn(power, [n])[0])


def mu_ula_series(model, d, ns, method="exact-series", spec=None):
    """:class:`MuSeries` over increasing ``ns``, sharing one set of characteristic values."""
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    power = np.abs(charfn_values(model, d, max(ns[-1] - 1, 0), method, spec)) ** 2
    mus = _series_from_charfn(power, ns)
    return MuSeries([MuRow(n, float(m), method) for n, m in zip(ns, mus)])


def _sample_rays(model, rng, count):
    """``count`` ray angles. For a clustered model rays of one draw-group are
    correlated, so whole groups are drawn and concatenated."""
    if isinstance(model, Clustered):
        groups = -(-count // model.rays)
        return np.concatenate([sample(model, rng, 1) for _ in range(groups)])[:count]
    return sample(model, rng, count)


def _batch_estimate(values, batches):
    """Mean and stderr, the latter over contiguous batches (robust to
    correlation between rays of one clustered draw-group)."""
    mean = float(values.mean())
    parts = np.array_split(values, batches)
    means = np.array([p.mean() for p in parts])
    stderr = float(means.std(ddof=1) / math.sqrt(batches))
    return MonteCarloEstimate(mean, stderr, values.size)


def mu_ula_monte_carlo(model, d, n, rng, pairs=100_000):
    """Monte Carlo ``(1/N) E|a(phi)^H a(phi')|^2 = N E[D^2]`` over independent ray pairs.

    ``D`` is the normalized Dirichlet kernel at ``tau = 2 pi d (sin phi' - sin phi)``.
    The two rays of a pair come from independent streams so that a
    clustered model never pairs rays of the same draw-group.
    """
    phi_a = _sample_rays(model, rng.child(0), pairs)
    phi_b = _sample_rays(model, rng.child(1), pairs)
    tau = 2.0 * np.pi * d * (np.sin(phi_b) - np.sin(phi_a))
    values = n * dirichlet_cross(tau, n) ** 2
    return _batch_estimate(values, 100)


def charfn_asymptotic(model, d, q):
    """Two-term large-``q`` expansion of ``E[exp(-j q 2 pi d sin phi)]``.

    ``(f(-pi/2) exp(j(2 pi d q - pi/4)) + f(pi/2) exp(-j(2 pi d q - pi/4))) / sqrt(d q)``,
    which decays as ``q^{-1/2}`` and vanishes when the density is zero at
    both end-fire directions.
    """
    f_plus, f_minus = endfire_density(model)
    q = np.asarray(q, dtype=float)
    chi = 2.0 * np.pi * d * q - np.pi / 4.0
    out = (f_minus * np.exp(1j * chi) + f_plus * np.exp(-1j * chi)) / np.sqrt(d * q)
    return complex(out) if out.ndim == 0 else out


def m_slope(model, d):
    """Growth rate of ``mu_ULA`` per unit ``ln N``: ``2 (f(pi/2)^2 + f(-pi/2)^2) / d``."""
    f_plus, f_minus = endfire_density(model)
    return 2.0 * (f_plus ** 2 + f_minus ** 2) / d


def expected_eta(beta_i, beta_bar, alpha, mu):
    """Large-system mean interference ``beta_i * beta_bar * mu / alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return beta_i * beta_bar * mu / alpha


# ---------------------------------------------------------------- UPA ----

_M_CACHE = {}
_GL_ORDER = 16


def _nodes(model, panels):
    lo, hi = support(model)
    x, w = gauss_legendre_panels(lo, hi, panels, _GL_ORDER, points=breakpoints(model))
    return x, w * pdf(model, x)


def _panels_for(nu):
    # each Gauss-Legendre panel sees at most about one oscillation
    return max(8, int(math.ceil(4.0 * nu)))


def _lag_geometry(v, w, dx, dy):
    nu = math.hypot(v * dx, w * dy)
    delta = math.atan2(w * dy, v * dx)
    return nu, delta


def m_vw(az, el, v, w, dx, dy):
    """``M_vw = E[exp(-j 2 pi nu sin(theta) cos(phi - Delta))]`` by tensor Gauss-Legendre quadrature.

    ``nu = sqrt(v^2 dx^2 + w^2 dy^2)`` and ``Delta = atan2(w dy, v dx)``;
    ``az`` is the azimuth law and ``el`` the zenith-angle law. The panel
    count of both axes grows with ``nu``. Results are cached on the models
    and ``(nu, Delta)`` rounded to 1e-12.
    """
    for model in (az, el):
        if isinstance(model, Clustered):
            raise UnsupportedVariantError("clustered models have no density; use monte-carlo")
    if v == 0 and w == 0:
        return 1.0 + 0.0j
    nu, delta = _lag_geometry(v, w, dx, dy)
    key = (az, el, round(nu, 12), round(delta, 12))
    hit = _M_CACHE.get(key)
    if hit is not None:
        return hit
    panels = _panels_for(nu)
    phi, wphi = _nodes(az, panels)
    theta, wtheta = _nodes(el, panels)
    z = 2.0 * np.pi * nu * np.sin(theta)
    inner = np.exp(-1j * np.multiply.outer(z, np.cos(phi - delta))) @ wphi
    value = complex(np.dot(wtheta, inner))
    _M_CACHE[key] = value
    return value


def _triangular(n):
    lags = np.arange(1 - n, n)
    return lags, 1.0 - np.abs(lags) / n


def mu_upa(az, el, nx, ny, dx, dy, method="quadrature-series", rng=None, pairs=100_000):
    """Planar interference kernel ``mu_UPA``.

    ``sum_{v,w} (1 - |v|/nx)(1 - |w|/ny) |M_vw|^2`` over all lags without
    truncation. ``method`` is ``"quadrature-series"`` (general densities),
    ``"exact-series"`` (uniform azimuth and elevation, closed form) or
    ``"monte-carlo"`` (any model, returns a :class:`MonteCarloEstimate`).
    """
    if method == "monte-carlo":
        if rng is None:
            raise ValueError("monte-carlo needs an rng")
        return mu_upa_monte_carlo(az, el, nx, ny, dx, dy, rng, pairs)
    if method == "exact-series":
        if not (_is_full_uniform(az) and isinstance(el, Uniform)
                and abs((el.hi - el.lo) - np.pi) < 1e-12):
            raise UnsupportedVariantError(
                "closed form needs uniform azimuth over the circle and elevation over a half-turn")
        return mu_upa_uniform_closed(nx, ny, dx, dy)
    if method != "quadrature-series":
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for v in range(0, nx):
        wv = 1.0 - v / nx
        for w in range(1 - ny, ny):
            if v == 0 and w < 0:
                continue  # |M_{-v,-w}| = |M_{v,w}|
            ww = 1.0 - abs(w) / ny
            mult = 1.0 if (v == 0 and w == 0) else 2.0
            total += mult * wv * ww * abs(m_vw(az, el, v, w, dx, dy)) ** 2
    return total


def mu_upa_uniform_closed(nx, ny, dx, dy):
    """Closed form for uniform azimuth and elevation, where ``M_vw = J0^2(pi nu)``.

    ``sum_{m,n} (1 - |m|/ny)(1 - |n|/nx) J0^4(pi sqrt(m^2 dy^2 + n^2 dx^2))``.
    """
    vx, tx = _triangular(nx)
    vy, ty = _triangular(ny)
    arg = np.pi * np.sqrt(np.add.outer((vx * dx) ** 2, (vy * dy) ** 2))
    j4 = bessel_j0(arg.ravel()).reshape(arg.shape) ** 4
    return float(tx @ j4 @ ty)


def mu_upa_monte_carlo(az, el, nx, ny, dx, dy, rng, pairs=100_000):
    """Monte Carlo ``(1/N) E|a^H a'|^2 = N E[D_x^2 D_y^2]`` over independent ray pairs."""
    phi_a = _sample_rays(az, rng.child(0), pairs)
    th_a = _sample_rays(el, rng.child(1), pairs)
    phi_b = _sample_rays(az, rng.child(2), pairs)
    th_b = _sample_rays(el, rng.child(3), pairs)
    tx = 2.0 * np.pi * dx * (np.sin(th_b) * np.cos(phi_b) - np.sin(th_a) * np.cos(phi_a))
    ty = 2.0 * np.pi * dy * (np.sin(th_b) * np.sin(phi_b) - np.sin(th_a) * np.sin(phi_a))
    values = nx * ny * (dirichlet_cross(tx, nx) * dirichlet_cross(ty, ny)) ** 2
    return _batch_estimate(values, 100)


def polar_bound(nx, ny, dx, dy):
    """Polar-coordinate envelope ``(pi/2)(ln rho_max - ln rho_min)`` of the planar lag sum.

    ``rho_min = min(dx, dy)`` and ``rho_max = sqrt(2) max((nx-1) dx, (ny-1) dy)``.
    It bounds the growing part of ``mu_UPA`` for uniform angles up to an
    additive constant.
    """
    rho_min = min(dx, dy)
    rho_max = math.sqrt(2.0) * max((nx - 1) * dx, (ny - 1) * dy)
    return 0.5 * math.pi * (math.log(rho_max) - math.log(rho_min))


def fit_log_slope(series, n_lo, n_hi):
    """Least-squares fit of ``mu`` against natural-log ``N`` over ``[n_lo, n_hi]``.

    Raises
    ------
    ValueError
        If fewer than five rows fall inside the range.
    """
    n = series.n
    mu = series.mu
    sel = (n >= n_lo) & (n <= n_hi)
    if sel.sum() < 5:
        raise ValueError("need at least five rows inside the fit range")
    x = np.log(n[sel])
    y = mu[sel]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0), int(n_lo), int(n_hi))
