"""Epsilon-protection user admission and the interference bounds it implies.

Two users are scheduled together only if the sines of all their ray
angles are separated by more than ``epsilon``. For a ULA, with
``tau = 2 pi d (sin phi_js - sin phi_ir)``, the normalized array factor
obeys ``|a_ir^H a_js| / N <= 1 / (N |sin(tau / 2)|)``, so admission gives

    eta_i <= sum_j (sum_r |gamma_ir|)^2 (sum_s |gamma_js|)^2 / (N^2 sin^2(pi d epsilon)).

A UPA factorizes into an x and a y array factor, giving ``sin^4``.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .array import ULA, UPA, ChannelRealization, response_sum
from .errors import ConfigurationError

__all__ = [
    "ProtectionPolicy",
    "ScheduleResult",
    "ScheduleLog",
    "admissible",
    "greedy_schedule",
    "gamma_sum",
    "eta_bound_ula",
    "eta_bound_upa",
    "realize_on",
]


@dataclass(frozen=True)
class ProtectionPolicy:
    """Sine-domain separation ``epsilon`` for a ``"ULA"`` or ``"UPA"``."""

    epsilon: float
    geometry_kind: str = "ULA"

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 2.0:
            raise ConfigurationError("epsilon must satisfy 0 <= epsilon < 2")
        if self.geometry_kind not in ("ULA", "UPA"):
            raise ConfigurationError("geometry_kind must be 'ULA' or 'UPA'")


def _separated(tau, d, epsilon):
    """``|tau| > 2 pi d eps`` and ``|sin(tau/2)| > sin(pi d eps)``, elementwise.

    The first is the separation rule itself; the second is what the array
    factor bound actually uses and also rejects grating-lobe aliases,
    where ``tau`` is near a non-zero multiple of ``2 pi``.
    """
    half = np.pi * d * epsilon
    return (np.abs(tau) > 2.0 * half) & (np.abs(np.sin(0.5 * tau)) > math.sin(half))


def _projections(ch):
    """Direction cosines ``(sin th cos ph, sin th sin ph)`` of a UPA realization's rays."""
    s = np.sin(ch.elevation)
    return s * np.cos(ch.azimuth), s * np.sin(ch.azimuth)


def _within_ok(u, d, epsilon):
    # distinct ray pairs r' != s' of one user
    tau = 2.0 * np.pi * d * np.subtract.outer(u, u)
    ok = _separated(tau, d, epsilon)
    np.fill_diagonal(ok, True)
    return bool(ok.all())


def admissible(u, v, policy):
    """Whether users ``u`` and ``v`` may be scheduled together.

    ULA: every cross-user ray pair must be separated. UPA: every cross-user
    pair must be separated along both axes, and so must every pair of
    distinct rays within each user. ``epsilon = 0`` always admits.
    """
    if policy.epsilon == 0.0:
        return True
    eps = policy.epsilon
    geom = u.geometry
    if policy.geometry_kind == "ULA":
        if not isinstance(geom, ULA):
            raise ConfigurationError("ULA policy applied to a non-ULA realization")
        tau = 2.0 * np.pi * geom.d * np.subtract.outer(np.sin(v.azimuth), np.sin(u.azimuth))
        return bool(_separated(tau, geom.d, eps).all())
    if not isinstance(geom, UPA):
        raise ConfigurationError("UPA policy applied to a non-UPA realization")
    ux, uy = _projections(u)
    vx, vy = _projections(v)
    tx = 2.0 * np.pi * geom.dx * np.subtract.outer(vx, ux)
    ty = 2.0 * np.pi * geom.dy * np.subtract.outer(vy, uy)
    if not (_separated(tx, geom.dx, eps).all() and _separated(ty, geom.dy, eps).all()):
        return False
    return all(_within_ok(c, dd, eps)
               for c, dd in ((ux, geom.dx), (uy, geom.dy), (vx, geom.dx), (vy, geom.dy)))


@dataclass(frozen=True)
class ScheduleResult:
    selected: tuple
    partial: bool


def greedy_schedule(pool, policy, target_k, anchor="pairwise"):
    """Prefix-greedy selection in pool order.

    A candidate joins if it is admissible with every user already selected
    (``anchor="pairwise"``) or only with the first pool entry, the desired
    user (``anchor="desired"``); the latter is all that the bound on that
    user's interference needs. Stops at ``target_k`` users.

    Returns
    -------
    ScheduleResult
        ``partial`` is set when fewer than ``target_k`` users were found.
    """
    if target_k < 1:
        raise ValueError("target_k must be >= 1")
    if anchor not in ("pairwise", "desired"):
        raise ValueError("anchor must be 'pairwise' or 'desired'")
    selected = []
    for idx, cand in enumerate(pool):
        if len(selected) == target_k:
            break
        peers = selected if anchor == "pairwise" else selected[:1]
        if all(admissible(pool[s], cand, policy) for s in peers):
            selected.append(idx)
    return ScheduleResult(tuple(selected), len(selected) < target_k)


def gamma_sum(target, interferers):
    """``sum_j (sum_r |gamma_ir|)^2 (sum_s |gamma_js|)^2``, the absolute ray-gain sum of the bounds."""
    gi = float(np.sum(np.abs(target.coefficients))) ** 2
    return gi * sum(float(np.sum(np.abs(h.coefficients))) ** 2 for h in interferers)


def _check_bound_args(n, d, epsilon):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    s = math.sin(math.pi * d * epsilon)
    if s == 0.0:
        raise ValueError("sin(pi d epsilon) vanishes")
    return abs(s)


def eta_bound_ula(gammas_sum, n, d, epsilon):
    """``gammas_sum / (N^2 sin^2(pi d epsilon))``."""
    s = _check_bound_args(n, d, epsilon)
    return gammas_sum / (n ** 2 * s ** 2)


def eta_bound_upa(gammas_sum, n, d, epsilon):
    """``gammas_sum / (N^2 sin^4(pi d epsilon))``."""
    s = _check_bound_args(n, d, epsilon)
    return gammas_sum / (n ** 2 * s ** 4)


def realize_on(channel, geom):
    """The same rays and coefficients evaluated on another array geometry.

    Useful to screen candidates cheaply on a tiny array and build the full
    channel vector only for users that get scheduled.
    """
    h = response_sum(geom, channel.azimuth, channel.coefficients, channel.elevation)
    elevation = None if channel.elevation is None else np.array(channel.elevation)
    return ChannelRealization(h, np.array(channel.azimuth), np.array(channel.coefficients),
                              geom, elevation)


class ScheduleLog:
    """Per-drop scheduler records, serialized as CSV ``drop,N,selected_count,eta,bound``."""

    def __init__(self):
        self.rows = []

    def append(self, drop, n, selected_count, eta, bound):
        self.rows.append((int(drop), int(n), int(selected_count), float(eta), float(bound)))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("drop", "N", "selected_count", "eta", "bound"))
        for drop, n, count, eta, bound in self.rows:
            writer.writerow([drop, n, count, repr(eta), repr(bound)])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())
