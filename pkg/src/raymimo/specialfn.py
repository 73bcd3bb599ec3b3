"""Special functions and quadrature primitives.

Everything here works on scalars or numpy arrays and is pure: no module
state is mutated, so concurrent callers need no locking.

Bessel functions
----------------
``bessel_j0`` and ``bessel_i0_complex`` use two branches each:

* ``|z| < BESSEL_SWITCH_RADIUS``: the integral representations
  ``J0(x) = (1/pi) int_0^pi cos(x sin t) dt`` and
  ``I0(z) = (1/pi) int_0^pi exp(z cos t) dt`` evaluated with the periodic
  trapezoid rule on ``BESSEL_TRAPEZOID_POINTS`` nodes. The aliasing error is
  ``2 I_M(z)``, below 1e-19 relative for ``M = 64`` and ``|z| < 25``. Unlike
  the Taylor series this branch does not lose digits to cancellation on the
  imaginary axis.
* ``|z| >= BESSEL_SWITCH_RADIUS``: Hankel-type asymptotic expansions with
  ``BESSEL_ASYMPTOTIC_TERMS`` terms, whose truncation error is ~exp(-2|z|).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BesselOverflowError, DomainError, QuadratureAccuracyError

__all__ = [
    "BESSEL_SWITCH_RADIUS",
    "QuadratureSpec",
    "bessel_j0",
    "bessel_i0_complex",
    "bessel_i0e_complex",
    "dirichlet_cross",
    "integrate_1d",
    "gauss_legendre_panels",
]

BESSEL_SWITCH_RADIUS = 25.0
BESSEL_TRAPEZOID_POINTS = 64
BESSEL_ASYMPTOTIC_TERMS = 30

# b_k = (1^2 3^2 ... (2k-1)^2) / (k! 8^k); all asymptotic series below use these.
_HANKEL_B = np.empty(BESSEL_ASYMPTOTIC_TERMS)
_HANKEL_B[0] = 1.0
for _k in range(1, BESSEL_ASYMPTOTIC_TERMS):
    _HANKEL_B[_k] = _HANKEL_B[_k - 1] * (2 * _k - 1) ** 2 / (8.0 * _k)
del _k

_TRAP_T = 2.0 * np.pi * np.arange(BESSEL_TRAPEZOID_POINTS) / BESSEL_TRAPEZOID_POINTS
_TRAP_COS = np.cos(_TRAP_T)
_TRAP_SIN = np.sin(_TRAP_T)


def _as_output(values, scalar):
    return values.reshape(()).item() if scalar else values


def bessel_j0(x):
    """Bessel function of the first kind, order zero, for real ``x``.

    Parameters
    ----------
    x : float or array_like
        Real argument(s).

    Returns
    -------
    float or ndarray
        ``J0(x)``, accurate to about 1e-13 absolute for ``|x| <= 1e4``.

    Raises
    ------
    DomainError
        If any element of ``x`` is not finite.
    """
    scalar = np.ndim(x) == 0
    x = np.abs(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("bessel_j0 requires finite arguments")
    flat = x.ravel()
    out = np.empty_like(flat)

    small = flat < BESSEL_SWITCH_RADIUS
    if np.any(small):
        xs = flat[small]
        out[small] = np.cos(np.outer(xs, _TRAP_SIN)).mean(axis=1)

    large = ~small
    if np.any(large):
        xl = flat[large]
        inv = 1.0 / xl
        # P = sum (-1)^k b_{2k} x^{-2k}, Q = sum (-1)^{k+1} b_{2k+1} x^{-(2k+1)}
        p = np.zeros_like(xl)
        q = np.zeros_like(xl)
        power = np.ones_like(xl)
        for k in range(BESSEL_ASYMPTOTIC_TERMS):
            term = _HANKEL_B[k] * power
            if k % 2 == 0:
                p += term if (k // 2) % 2 == 0 else -term
            else:
                q += -term if (k // 2) % 2 == 0 else term
            power = power * inv
        chi = xl - 0.25 * np.pi
        out[large] = np.sqrt(2.0 / (np.pi * xl)) * (p * np.cos(chi) - q * np.sin(chi))

    return _as_output(out.reshape(x.shape), scalar)


def bessel_i0e_complex(z):
    """Exponentially scaled ``I0(z) * exp(-|Re z|)`` for complex ``z``.

    Never overflows; used wherever ratios of ``I0`` values are needed.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("bessel_i0_complex requires finite arguments")
    # I0 is even: fold onto Re z >= 0 so the principal sqrt is continuous.
    z = np.where(z.real < 0, -z, z)
    flat = z.ravel()
    out = np.empty_like(flat)

    small = np.abs(flat) < BESSEL_SWITCH_RADIUS
    if np.any(small):
        zs = flat[small]
        expo = np.outer(zs, _TRAP_COS) - zs.real[:, None]
        out[small] = np.exp(expo).mean(axis=1)

    large = ~small
    if np.any(large):
        zl = flat[large]
        inv = 1.0 / zl
        s_plus = np.zeros_like(zl)
        s_alt = np.zeros_like(zl)
        power = np.ones_like(zl)
        for k in range(BESSEL_ASYMPTOTIC_TERMS):
            term = _HANKEL_B[k] * power
            s_plus += term
            s_alt += term if k % 2 == 0 else -term
            power = power * inv
        sign = np.where(zl.imag >= 0, 1.0, -1.0)
        re = zl.real
        dominant = np.exp(1j * zl.imag) * s_plus
        recessive = sign * 1j * np.exp(-2.0 * re - 1j * zl.imag) * s_alt
        out[large] = (dominant + recessive) / np.sqrt(2.0 * np.pi * zl)

    return _as_output(out.reshape(z.shape), scalar)


def bessel_i0_complex(z):
    """Modified Bessel function ``I0(z)`` of complex argument.

    Parameters
    ----------
    z : complex or array_like
        Argument(s).

    Returns
    -------
    complex or ndarray
        ``I0(z)``. Relative error is below 1e-10 for ``|z| <= 500``.

    Raises
    ------
    DomainError
        Non-finite input.
    BesselOverflowError
        ``|Re z|`` so large that ``I0(z)`` is not representable.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    scaled = np.asarray(bessel_i0e_complex(z))
    growth = np.abs(z.real)
    with np.errstate(over="ignore", invalid="ignore"):
        out = scaled * np.exp(growth)
    if not np.all(np.isfinite(out)):
        raise BesselOverflowError(
            f"I0 overflows for |Re z| up to {float(np.max(growth)):.6g}")
    return _as_output(out, scalar)


def dirichlet_cross(tau, n):
    """Normalized Dirichlet kernel ``|sin(n tau / 2) / (n sin(tau / 2))|``.

    This is ``|a(phi)^H a(phi')| / n`` for an ``n``-element ULA when
    ``tau = 2 pi d (sin phi' - sin phi)``. The value lies in ``[0, 1]`` and
    equals 1 at ``tau = 2 pi k``.
    """
    if int(n) != n or n < 1:
        raise DomainError("dirichlet_cross requires a positive integer n")
    n = int(n)
    scalar = np.ndim(tau) == 0
    tau = np.asarray(tau, dtype=float)
    delta = np.remainder(tau + np.pi, 2.0 * np.pi) - np.pi
    half = 0.5 * delta
    s = np.sin(half)
    near = np.abs(s) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = np.abs(np.sin(n * half) / (n * s))
    # small-angle form near the coherent points avoids 0/0
    limit = np.abs(np.sinc(n * delta / (2.0 * np.pi)))
    out = np.clip(np.where(near, limit, regular), 0.0, 1.0)
    return _as_output(out, scalar)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate_1d`.

    The integral is accepted once the estimated absolute error is below
    ``max(abs_tol, rel_tol * |I|)``.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 20000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970])
_WG = np.zeros(15)
_WG[1::2] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
             0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
             0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
             0.129484966168869693270611432679082]


def _gk15(f, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _XK[None, :]
    fx = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    kron = half * (fx @ _WK)
    gauss = half * (fx @ _WG)
    return kron, np.abs(kron - gauss)


def integrate_1d(f, a, b, spec=None, points=None, min_panels=1):
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorized integrand: maps a 1-D float array to values of the same
        length (real or complex).
    a, b : float
        Limits, ``a < b``.
    spec : QuadratureSpec, optional
        Tolerances; defaults to ``QuadratureSpec()``.
    points : sequence of float, optional
        Interior break points (kinks, support edges) used as panel edges.
    min_panels : int
        Lower bound on the number of initial equal-width panels. Oscillatory
        integrands should pass at least the number of oscillations.

    Returns
    -------
    complex

    Raises
    ------
    QuadratureAccuracyError
        If the tolerance is not met within ``spec.max_subdivisions`` panel
        bisections. The best estimate is carried on the exception.
    """
    spec = spec or QuadratureSpec()
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError("integrate_1d requires a < b")
    edges = {a, b}
    for p in points or ():
        if a < p < b:
            edges.add(float(p))
    edges = np.array(sorted(edges))
    panels = max(int(min_panels), 1)
    lo = []
    hi = []
    total = b - a
    for e0, e1 in zip(edges[:-1], edges[1:]):
        k = max(1, math.ceil(panels * (e1 - e0) / total))
        grid = np.linspace(e0, e1, k + 1)
        lo.append(grid[:-1])
        hi.append(grid[1:])
    lo = np.concatenate(lo)
    hi = np.concatenate(hi)
    val, err = _gk15(f, lo, hi)

    done_val = 0.0 + 0.0j
    done_err = 0.0
    subdivisions = 0
    while True:
        estimate = done_val + val.sum()
        error = done_err + err.sum()
        target = max(spec.abs_tol, spec.rel_tol * abs(estimate))
        if error <= target:
            return complex(estimate)
        # split panels whose error exceeds their length-proportional share
        share = target * (hi - lo) / total
        bad = err > share
        if not np.any(bad):
            bad = err >= err.max()
        subdivisions += int(bad.sum())
        if subdivisions > spec.max_subdivisions:
            raise QuadratureAccuracyError(
                f"integrate_1d did not reach {target:.3g} "
                f"(estimated error {error:.3g}) within {spec.max_subdivisions} subdivisions",
                complex(estimate), float(error))
        done_val += val[~bad].sum()
        done_err += err[~bad].sum()
        blo, bhi = lo[bad], hi[bad]
        bmid = 0.5 * (blo + bhi)
        lo = np.concatenate([blo, bmid])
        hi = np.concatenate([bmid, bhi])
        val, err = _gk15(f, lo, hi)


def gauss_legendre_panels(a, b, panels, order=16, points=None):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``.

    ``panels`` equal-width panels are laid between consecutive break points.
    """
    x0, w0 = np.polynomial.legendre.leggauss(order)
    edges = sorted({float(a), float(b)} | {float(p) for p in (points or ()) if a < p < b})
    nodes = []
    weights = []
    total = b - a
    for e0, e1 in zip(edges[:-1], edges[1:]):
        k = max(1, math.ceil(panels * (e1 - e0) / total))
        grid = np.linspace(e0, e1, k + 1)
        mid = 0.5 * (grid[:-1] + grid[1:])
        half = 0.5 * np.diff(grid)
        nodes.append((mid[:, None] + half[:, None] * x0[None, :]).ravel())
        weights.append((half[:, None] * w0[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)
