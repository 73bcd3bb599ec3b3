"""Angular distributions for ray arrival angles.

Models are small frozen dataclasses; the operations on them are module
functions (``pdf``, ``sample``, ``charfn_oracle`` ...) so that new variants
only need a branch in each function. All angles are radians.

The characteristic value used throughout is

    E[exp(-j q 2 pi d sin(phi))]

i.e. the Fourier coefficient of the sine-projected angle that drives the
per-ray-pair interference of a ULA with spacing ``d`` wavelengths.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError, QuadratureAccuracyError, UnsupportedVariantError
from .specialfn import QuadratureSpec, bessel_i0e_complex, integrate_1d

__all__ = [
    "Uniform",
    "VonMises",
    "WrappedGaussian",
    "Laplacian",
    "Clustered",
    "AngularModel",
    "RNGStream",
    "wrap_angle",
    "pdf",
    "sample",
    "support",
    "breakpoints",
    "charfn_oracle",
    "charfn_exact_vm",
    "endfire_density",
]

TWO_PI = 2.0 * np.pi
WRAP_TERMS = 10


@dataclass(frozen=True)
class Uniform:
    """Uniform on ``[lo, hi]`` (interpreted on the circle)."""

    lo: float = 0.0
    hi: float = TWO_PI

    def __post_init__(self):
        width = self.hi - self.lo
        if not 0 < width <= TWO_PI + 1e-12:
            raise ConfigurationError("Uniform requires 0 < hi - lo <= 2*pi")


@dataclass(frozen=True)
class VonMises:
    """Von Mises with location ``mu`` and concentration ``kappa``."""

    mu: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ConfigurationError("VonMises requires kappa >= 0")


@dataclass(frozen=True)
class WrappedGaussian:
    mean: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("WrappedGaussian requires sigma > 0")


@dataclass(frozen=True)
class Laplacian:
    """Wrapped Laplacian with density ``exp(-|x - mean| / scale) / (2 scale)``.

    The standard deviation of the unwrapped law is ``sqrt(2) * scale``.
    """

    mean: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ConfigurationError("Laplacian requires scale > 0")

    @classmethod
    def from_std(cls, mean, std):
        return cls(mean, std / math.sqrt(2.0))


@dataclass(frozen=True)
class Clustered:
    """``clusters`` central angles, each with ``subrays`` offset angles.

    Only sampling is supported: the density conditional on a drop depends
    on the random central angles.
    """

    central: "AngularModel"
    offset: "AngularModel"
    clusters: int = 20
    subrays: int = 20

    def __post_init__(self):
        if self.clusters < 1 or self.subrays < 1:
            raise ConfigurationError("Clustered requires clusters >= 1 and subrays >= 1")
        if isinstance(self.central, Clustered) or isinstance(self.offset, Clustered):
            raise ConfigurationError("Clustered models cannot be nested")

    @property
    def rays(self):
        return self.clusters * self.subrays


AngularModel = Union[Uniform, VonMises, WrappedGaussian, Laplacian, Clustered]


class RNGStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Two streams built from the same pair produce identical sequences.
    Each worker (or each drop) should own its own stream.
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self):
        return f"RNGStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, index):
        """Independent sub-stream, deterministic in ``index``."""
        sequence = np.random.SeedSequence(
            self.seed, spawn_key=(self.stream_id, int(index)))
        out = RNGStream.__new__(RNGStream)
        out.seed = self.seed
        out.stream_id = self.stream_id
        out.generator = np.random.Generator(np.random.PCG64(sequence))
        return out


def wrap_angle(x):
    """Wrap onto ``(-pi, pi]``."""
    return np.pi - np.remainder(np.pi - np.asarray(x, dtype=float), TWO_PI)


def _require_density(model, what):
    if isinstance(model, Clustered):
        raise UnsupportedVariantError(
            f"{what} is undefined for Clustered models (their density is drop-conditional)")


def pdf(model, x):
    """Density of ``model`` at angle(s) ``x`` (wrapped onto the circle first)."""
    _require_density(model, "pdf")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if isinstance(model, Uniform):
        rel = np.remainder(x - model.lo, TWO_PI)
        width = model.hi - model.lo
        inside = rel <= width + 1e-15
        out = np.where(inside, 1.0 / width, 0.0)
    elif isinstance(model, VonMises):
        norm = TWO_PI * bessel_i0e_complex(model.kappa).real
        out = np.exp(model.kappa * (np.cos(x - model.mu) - 1.0)) / norm
    elif isinstance(model, WrappedGaussian):
        base = wrap_angle(x - model.mean)
        k = np.arange(-WRAP_TERMS, WRAP_TERMS + 1)
        shifted = base[..., None] + TWO_PI * k
        out = np.exp(-0.5 * (shifted / model.sigma) ** 2).sum(axis=-1)
        out = out / (model.sigma * math.sqrt(TWO_PI))
    elif isinstance(model, Laplacian):
        base = wrap_angle(x - model.mean)
        k = np.arange(-WRAP_TERMS, WRAP_TERMS + 1)
        shifted = base[..., None] + TWO_PI * k
        out = np.exp(-np.abs(shifted) / model.scale).sum(axis=-1) / (2.0 * model.scale)
    else:
        raise UnsupportedVariantError(f"unknown angular model {model!r}")
    return out.item() if scalar else out


def support(model):
    """A ``(lo, hi)`` interval carrying all of the probability mass."""
    _require_density(model, "support")
    if isinstance(model, Uniform):
        return float(model.lo), float(model.hi)
    centre = model.mu if isinstance(model, VonMises) else model.mean
    return float(centre - np.pi), float(centre + np.pi)


def breakpoints(model):
    """Interior points of ``support(model)`` where the density is not smooth."""
    _require_density(model, "breakpoints")
    if isinstance(model, Laplacian):
        return [float(model.mean)]
    return []


def _vonmises_best_fisher(gen, mu, kappa, count):
    if kappa < 1e-8:
        return gen.uniform(-np.pi, np.pi, count)
    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)
    out = np.empty(count)
    filled = 0
    while filled < count:
        need = count - filled
        batch = int(need * 1.3) + 16
        u1, u2, u3 = gen.random((3, batch))
        z = np.cos(np.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        theta = np.sign(u3 - 0.5) * np.arccos(np.clip(f, -1.0, 1.0))
        theta = theta[accept][:need]
        out[filled:filled + theta.size] = theta
        filled += theta.size
    return wrap_angle(out + mu)


def sample(model, rng, count):
    """Draw i.i.d. angles.

    Parameters
    ----------
    model : AngularModel
    rng : RNGStream
    count : int
        Number of draws. For ``Clustered`` models this is the number of
        draw-groups; each group contributes ``clusters * subrays`` angles,
        cluster-major.

    Returns
    -------
    ndarray of float
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng.generator
    if isinstance(model, Uniform):
        return gen.uniform(model.lo, model.hi, count)
    if isinstance(model, VonMises):
        return _vonmises_best_fisher(gen, model.mu, model.kappa, count)
    if isinstance(model, WrappedGaussian):
        return wrap_angle(model.mean + model.sigma * gen.standard_normal(count))
    if isinstance(model, Laplacian):
        return wrap_angle(model.mean + gen.laplace(0.0, model.scale, count))
    if isinstance(model, Clustered):
        centres = sample(model.central, rng, count * model.clusters)
        offsets = sample(model.offset, rng, count * model.clusters * model.subrays)
        angles = np.repeat(centres, model.subrays) + offsets
        return wrap_angle(angles)
    raise UnsupportedVariantError(f"unknown angular model {model!r}")


def _oscillation_panels(q, d):
    # 4*d*q oscillations of exp(-j q 2 pi d sin phi) over one turn
    return max(8, int(q), int(math.ceil(8.0 * d * q)))


def _charfn_direct(model, q, d, spec):
    lo, hi = support(model)
    phase = TWO_PI * d * q

    def integrand(phi):
        return pdf(model, phi) * np.exp(-1j * phase * np.sin(phi))

    return integrate_1d(integrand, lo, hi, spec, points=breakpoints(model),
                        min_panels=_oscillation_panels(q, d))


def _charfn_transformed(model, q, d, spec):
    # density of x = l sin(phi) is p(x) / sqrt(l^2 - x^2) on [-l, l];
    # x = -l + t^2 and x = l - t^2 remove the endpoint singularities
    ell = TWO_PI * d

    def p_of_x(x):
        s = np.arcsin(np.clip(x / ell, -1.0, 1.0))
        return pdf(model, s) + pdf(model, np.pi - s)

    def upper(t):
        x = ell - t * t
        return 2.0 * p_of_x(x) * np.exp(-1j * q * x) / np.sqrt(2.0 * ell - t * t)

    def lower(t):
        x = -ell + t * t
        return 2.0 * p_of_x(x) * np.exp(-1j * q * x) / np.sqrt(2.0 * ell - t * t)

    kinks = list(breakpoints(model))
    if isinstance(model, Uniform) and model.hi - model.lo < TWO_PI:
        kinks += [model.lo, model.hi]
    xs = [ell * math.sin(k) for k in kinks]
    root = math.sqrt(ell)
    upper_pts = [math.sqrt(ell - x) for x in xs if 0.0 < x < ell]
    lower_pts = [math.sqrt(x + ell) for x in xs if -ell < x < 0.0]
    panels = _oscillation_panels(q, d)
    return (integrate_1d(upper, 0.0, root, spec, points=upper_pts, min_panels=panels)
            + integrate_1d(lower, 0.0, root, spec, points=lower_pts, min_panels=panels))


def charfn_oracle(model, q, d, spec=None, route="direct", agreement=1e-7):
    """Quadrature value of ``E[exp(-j q 2 pi d sin phi)]``.

    Parameters
    ----------
    model : AngularModel
        Any variant with a density.
    q : int
        Lag, ``q >= 0``.
    d : float
        Element spacing in wavelengths.
    spec : QuadratureSpec, optional
    route : {"direct", "transformed", "both"}
        ``"direct"`` integrates over the angle; ``"transformed"`` over the
        density of ``2 pi d sin(phi)``; ``"both"`` computes the two and
        raises if they differ by more than ``agreement``.

    Returns
    -------
    complex
    """
    _require_density(model, "charfn_oracle")
    if q < 0:
        raise ValueError("q must be >= 0")
    if not d > 0:
        raise ValueError("d must be positive")
    if q == 0:
        return 1.0 + 0.0j
    spec = spec or QuadratureSpec()
    if route == "direct":
        return _charfn_direct(model, q, d, spec)
    if route == "transformed":
        return _charfn_transformed(model, q, d, spec)
    if route == "both":
        a = _charfn_direct(model, q, d, spec)
        b = _charfn_transformed(model, q, d, spec)
        if abs(a - b) > agreement:
            raise QuadratureAccuracyError(
                f"quadrature routes disagree by {abs(a - b):.3g}", a, abs(a - b))
        return a
    raise ValueError(f"unknown route {route!r}")


def charfn_exact_vm(mu, kappa, q, d):
    """Closed-form ``E[exp(-j q 2 pi d sin phi)]`` for ``phi ~ VonMises(mu, kappa)``.

    Equals ``I0(sqrt(kappa^2 cos^2 mu + (kappa sin mu - j 2 pi d q)^2)) / I0(kappa)``.
    Vectorized over ``q``.
    """
    if not kappa >= 0:
        raise ValueError("kappa must be >= 0")
    scalar = np.ndim(q) == 0
    q = np.asarray(q, dtype=float)
    x = TWO_PI * d * q
    arg = np.sqrt((kappa * math.cos(mu)) ** 2 + (kappa * math.sin(mu) - 1j * x) ** 2 + 0j)
    scaled = np.asarray(bessel_i0e_complex(arg))
    out = scaled / bessel_i0e_complex(kappa).real * np.exp(np.abs(arg.real) - kappa)
    return complex(out) if scalar else out


def endfire_density(model):
    """``(f(pi/2), f(-pi/2))``, the densities at the two ULA end-fire directions."""
    _require_density(model, "endfire_density")
    return float(pdf(model, np.pi / 2)), float(pdf(model, -np.pi / 2))
