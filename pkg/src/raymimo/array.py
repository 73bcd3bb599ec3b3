"""Array geometries, steering vectors and ray-based channel synthesis.

A channel is a superposition of ``P`` plane-wave rays,

    h = sum_r gamma_r a(angles_r),

where ``a`` is the steering vector of the array. Elements have
omnidirectional gain.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .angular import Clustered, RNGStream, sample
from .errors import ConfigurationError, DimensionError

__all__ = [
    "ULA",
    "UPA",
    "ArrayGeometry",
    "CoefficientModel",
    "RayChannelSpec",
    "ChannelRealization",
    "steering_ula",
    "steering_upa",
    "steering",
    "exponential_decay_powers",
    "response_sum",
    "generate_channel",
    "cross_inner",
]


@dataclass(frozen=True)
class ULA:
    n: int
    d: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError("ULA requires n >= 1")
        if not self.d > 0:
            raise ConfigurationError("ULA requires d > 0")

    @property
    def size(self):
        return self.n


@dataclass(frozen=True)
class UPA:
    nx: int
    ny: int
    dx: float = 0.5
    dy: float = 0.5

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigurationError("UPA requires nx, ny >= 1")
        if not (self.dx > 0 and self.dy > 0):
            raise ConfigurationError("UPA requires dx, dy > 0")

    @property
    def size(self):
        return self.nx * self.ny


ArrayGeometry = Union[ULA, UPA]


class CoefficientModel(str, enum.Enum):
    RANDOM_PHASE = "random_phase"
    COMPLEX_GAUSSIAN = "complex_gaussian"


def steering_ula(n, d, phi):
    """ULA steering vector(s) with elements ``exp(j 2 pi k d sin(phi))``.

    Broadside is ``phi = 0``. A scalar ``phi`` gives shape ``(n,)``; an
    array of ``P`` angles gives an ``(n, P)`` matrix, one column per ray.
    """
    k = np.arange(n)
    phase = 2.0 * np.pi * d * np.sin(np.asarray(phi, dtype=float))
    return np.exp(1j * np.multiply.outer(k, phase))


def steering_upa(nx, ny, dx, dy, theta, phi):
    """UPA steering vector ``a_x (x) a_y`` for zenith angle ``theta`` and azimuth ``phi``.

    Element ``kx * ny + ky`` has phase
    ``2 pi sin(theta) (kx dx cos(phi) + ky dy sin(phi))``.
    Shapes follow :func:`steering_ula`.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ux = 2.0 * np.pi * dx * np.sin(theta) * np.cos(phi)
    uy = 2.0 * np.pi * dy * np.sin(theta) * np.sin(phi)
    ax = np.exp(1j * np.multiply.outer(np.arange(nx), ux))
    ay = np.exp(1j * np.multiply.outer(np.arange(ny), uy))
    if theta.ndim == 0 and phi.ndim == 0:
        return np.kron(ax, ay)
    # column-wise Kronecker product
    return (ax[:, None, ...] * ay[None, :, ...]).reshape((nx * ny,) + ax.shape[1:])


def steering(geom, azimuth, elevation=None):
    if isinstance(geom, ULA):
        return steering_ula(geom.n, geom.d, azimuth)
    return steering_upa(geom.nx, geom.ny, geom.dx, geom.dy, elevation, azimuth)


def response_sum(geom, azimuth, coefficients, elevation=None):
    """``sum_r gamma_r a(angles_r)`` without forming the ``N x P`` steering matrix.

    For a ULA the element index is split as ``k = k1 B + k2`` with
    ``B = ceil(sqrt(N))``, so ``exp(j k u) = exp(j k1 B u) exp(j k2 u)`` and
    the sum becomes one ``(N/B x P) @ (P x B)`` product needing only about
    ``2 sqrt(N) P`` complex exponentials. A UPA factorizes the same way into
    its x and y responses.
    """
    azimuth = np.asarray(azimuth, dtype=float)
    coefficients = np.asarray(coefficients)
    if isinstance(geom, ULA):
        n = geom.n
        block = max(1, math.isqrt(n - 1) + 1)
        rows = -(-n // block)
        u = 2.0 * np.pi * geom.d * np.sin(azimuth)
        coarse = np.exp(1j * np.multiply.outer(np.arange(rows) * block, u))
        fine = np.exp(1j * np.multiply.outer(np.arange(block), u))
        return ((coarse * coefficients) @ fine.T).ravel()[:n]
    s = np.sin(np.asarray(elevation, dtype=float))
    ax = np.exp(1j * np.multiply.outer(np.arange(geom.nx), 2.0 * np.pi * geom.dx * s * np.cos(azimuth)))
    ay = np.exp(1j * np.multiply.outer(np.arange(geom.ny), 2.0 * np.pi * geom.dy * s * np.sin(azimuth)))
    return ((ax * coefficients) @ ay.T).ravel()


def exponential_decay_powers(count, total=1.0, ratio=10.0):
    """Deterministic powers decaying geometrically so that ``p[-1] = p[0] / ratio``.

    ``p_k = p_1 * ratio ** (-(k - 1) / (count - 1))``, normalized to sum to ``total``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return np.array([float(total)])
    p = ratio ** (-np.arange(count) / (count - 1))
    return total * p / p.sum()


@dataclass(frozen=True)
class RayChannelSpec:
    """How one user's rays are drawn.

    Parameters
    ----------
    rays : int
        Number of rays ``P``.
    ray_powers : tuple of float
        Mean power of each ray; their sum is the link gain.
    coefficient_model : CoefficientModel
    azimuth : AngularModel
    elevation : AngularModel, optional
        Required for UPA geometries, forbidden for ULA.
    """

    rays: int
    ray_powers: tuple
    coefficient_model: CoefficientModel
    azimuth: object
    elevation: Optional[object] = None

    def __post_init__(self):
        powers = tuple(float(p) for p in self.ray_powers)
        object.__setattr__(self, "ray_powers", powers)
        object.__setattr__(self, "coefficient_model", CoefficientModel(self.coefficient_model))
        if self.rays < 1:
            raise ConfigurationError("rays must be >= 1")
        if len(powers) != self.rays:
            raise ConfigurationError(f"expected {self.rays} ray powers, got {len(powers)}")
        if any(p < 0 for p in powers):
            raise ConfigurationError("ray powers must be non-negative")
        for model in (self.azimuth, self.elevation):
            if isinstance(model, Clustered) and model.rays != self.rays:
                raise ConfigurationError(
                    f"clustered model yields {model.rays} rays but rays={self.rays}")

    @classmethod
    def equal_power(cls, rays, coefficient_model, azimuth, elevation=None, link_gain=1.0):
        return cls(rays, (link_gain / rays,) * rays, coefficient_model, azimuth, elevation)

    @property
    def link_gain(self):
        return float(sum(self.ray_powers))

    def with_link_gain(self, link_gain):
        """Copy with ray powers rescaled to sum to ``link_gain``."""
        scale = link_gain / self.link_gain
        return RayChannelSpec(self.rays, tuple(p * scale for p in self.ray_powers),
                              self.coefficient_model, self.azimuth, self.elevation)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One user's channel in one drop, with the rays that produced it."""

    h: np.ndarray
    azimuth: np.ndarray
    coefficients: np.ndarray
    geometry: object
    elevation: Optional[np.ndarray] = None

    def __post_init__(self):
        for arr in (self.h, self.azimuth, self.coefficients, self.elevation):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def angles(self):
        """List of ``(phi, theta)`` per ray; ``theta`` is ``None`` for a ULA."""
        if self.elevation is None:
            return [(float(p), None) for p in self.azimuth]
        return [(float(p), float(t)) for p, t in zip(self.azimuth, self.elevation)]

    @property
    def size(self):
        return self.h.shape[0]

    def reconstruct(self):
        """Recompute ``sum_r gamma_r a(angles_r)`` from the stored rays."""
        return steering(self.geometry, self.azimuth, self.elevation) @ self.coefficients


def _draw_angles(model, rng, rays):
    if isinstance(model, Clustered):
        return sample(model, rng, 1)
    return sample(model, rng, rays)


def _draw_coefficients(spec, rng):
    gen = rng.generator
    amp = np.sqrt(np.asarray(spec.ray_powers))
    if spec.coefficient_model is CoefficientModel.RANDOM_PHASE:
        return amp * np.exp(1j * gen.uniform(0.0, 2.0 * np.pi, spec.rays))
    u = (gen.standard_normal(spec.rays) + 1j * gen.standard_normal(spec.rays)) / np.sqrt(2.0)
    return amp * u


def generate_channel(spec, geom, rng):
    """Draw one ray-based channel realization.

    Parameters
    ----------
    spec : RayChannelSpec
    geom : ULA or UPA
    rng : RNGStream

    Returns
    -------
    ChannelRealization

    Raises
    ------
    ConfigurationError
        If an elevation model is given for a ULA or missing for a UPA.
    """
    if isinstance(geom, UPA) and spec.elevation is None:
        raise ConfigurationError("UPA geometry requires an elevation model")
    if isinstance(geom, ULA) and spec.elevation is not None:
        raise ConfigurationError("ULA geometry does not take an elevation model")
    if not isinstance(rng, RNGStream):
        raise TypeError("rng must be an RNGStream")
    azimuth = _draw_angles(spec.azimuth, rng, spec.rays)
    elevation = None
    if spec.elevation is not None:
        elevation = _draw_angles(spec.elevation, rng, spec.rays)
    coefficients = _draw_coefficients(spec, rng)
    h = response_sum(geom, azimuth, coefficients, elevation)
    return ChannelRealization(h, azimuth, coefficients, geom, elevation)


def cross_inner(h_i, h_j):
    """``h_i^H h_j`` (conjugate-linear in the first argument)."""
    a = h_i.h if isinstance(h_i, ChannelRealization) else np.asarray(h_i)
    b = h_j.h if isinstance(h_j, ChannelRealization) else np.asarray(h_j)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape} vs {b.shape}")
    # np.sum uses pairwise summation, limiting cancellation error at large N
    return complex(np.sum(np.conj(a) * b))
