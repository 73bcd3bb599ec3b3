"""Registered experiments, one per figure-style dataset, plus ``custom``.

Each runner receives an :class:`~raymimo.experiments.config.ExperimentConfig`
and an :class:`Output` sink and writes CSV files only. Defaults are sized
for a desk machine; the largest sweeps use the analytic series.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .. import asymptotics as asym
from ..angular import Clustered, RNGStream
from ..array import ULA, RayChannelSpec, exponential_decay_powers, generate_channel
from ..metrics import (
    DropConfig,
    MetricRow,
    MetricSeries,
    ch_fp_series,
    ch_statistic,
    empirical_quantiles,
    eta_all,
    eta_series,
    rayleigh_baseline,
    zeta_lsp,
)
from ..scheduler import (
    ProtectionPolicy,
    ScheduleLog,
    eta_bound_ula,
    gamma_sum,
    greedy_schedule,
    realize_on,
)
from .config import parse_angular, parse_geometry

__all__ = ["Experiment", "REGISTRY", "Output", "build_spec", "rayleigh_mean_fp"]


# Angular parameter sets, degrees.
THREE_GPP_ULA = {
    "type": "clustered", "clusters": 20, "subrays": 20,
    "central": {"type": "wrapped_gaussian", "mean": 0.0, "sigma": 76.5},
    "offset": {"type": "laplacian", "mean": 0.0, "std": 15.0},
}
SCENARIO_WIDE = {
    "azimuth": {
        "type": "clustered", "clusters": 20, "subrays": 20,
        "central": {"type": "wrapped_gaussian", "mean": 0.0, "sigma": 31.64},
        "offset": {"type": "laplacian", "mean": 0.0, "scale": 24.25},
    },
    "elevation": {
        "type": "clustered", "clusters": 20, "subrays": 20,
        "central": {"type": "laplacian", "mean": 90.0, "scale": 6.12},
        "offset": {"type": "laplacian", "mean": 0.0, "scale": 1.84},
    },
}
SCENARIO_NARROW = {
    "azimuth": {
        "type": "clustered", "clusters": 3, "subrays": 16,
        "central": {"type": "wrapped_gaussian", "mean": 0.0, "sigma": 14.4},
        "offset": {"type": "laplacian", "mean": 0.0, "scale": 6.24},
    },
    "elevation": {
        "type": "clustered", "clusters": 3, "subrays": 16,
        "central": {"type": "laplacian", "mean": 90.0, "scale": 1.5},
        "offset": {"type": "laplacian", "mean": 0.0, "scale": 0.5},
    },
}
UNIFORM_AZ = {"type": "uniform", "lo": 0.0, "hi": 360.0}
UNIFORM_EL = {"type": "uniform", "lo": 0.0, "hi": 180.0}
VM_30 = {"type": "von_mises", "mu": 0.0, "kappa": 4.23}


class Output:
    """Collects CSV/JSON files written by a runner, in write order."""

    def __init__(self, directory):
        self.directory = directory
        self.files = []

    def write(self, name, text):
        path = self.directory / name
        with open(path, "w", newline="") as fh:
            fh.write(text)
        self.files.append(name)
        return path


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    defaults: dict
    runner: object


def _models(params, key):
    return parse_angular(params[key], key) if params.get(key) is not None else None


def build_spec(azimuth, coefficient_model="random_phase", elevation=None, rays=None,
               ray_powers="equal"):
    """Per-user ray spec with unit link gain.

    ``ray_powers="cluster_decay"`` lets cluster powers fall geometrically to
    1/10 across clusters with equal subray powers inside each cluster.
    """
    if isinstance(azimuth, Clustered):
        rays = azimuth.rays
    if rays is None:
        raise ValueError("rays is required for non-clustered models")
    if ray_powers == "equal":
        powers = (1.0 / rays,) * rays
    elif ray_powers == "cluster_decay":
        if not isinstance(azimuth, Clustered):
            raise ValueError("cluster_decay needs a clustered model")
        p = exponential_decay_powers(azimuth.clusters)
        powers = tuple(np.repeat(p / azimuth.subrays, azimuth.subrays))
    else:
        raise ValueError(f"unknown ray power profile {ray_powers!r}")
    return RayChannelSpec(rays, powers, coefficient_model, azimuth, elevation)


def rayleigh_mean_fp(n):
    """``E|h_1^H h_2| / N`` for i.i.d. CN(0, 1) vectors: ``(sqrt(pi)/2) Gamma(N+1/2) / (Gamma(N) N)``."""
    return 0.5 * math.sqrt(math.pi) * math.exp(math.lgamma(n + 0.5) - math.lgamma(n)) / n


def _drop_config(params, spec, n, **overrides):
    kw = dict(spec=spec, geometry=parse_geometry(params["geometry"], n),
              drops=int(params["drops"]), seed=int(params["seed"]),
              users=params.get("users"), alpha=params.get("alpha"),
              link_gains=params.get("link_gains", "equal"))
    kw.update(overrides)
    return DropConfig(**kw)


def _rayleigh_fp_series(ns):
    return MetricSeries([MetricRow("I_rayleigh_analytic", n, 2, rayleigh_mean_fp(n), 0.0, 1)
                         for n in ns])


# ------------------------------------------------------------- runners ----

def _run_ch_fp(cfg, out, prefix):
    p = cfg.params
    spec = build_spec(_models(p, "azimuth"), p["coefficient_model"], _models(p, "elevation"))
    s_rows = MetricSeries()
    i_rows = MetricSeries()
    for n in p["n"]:
        series, _ = ch_fp_series(_drop_config(p, spec, n))
        s_rows.extend(series.select("S"))
        i_rows.extend(series.select("I"))
    out.write(f"{prefix}_S.csv", s_rows.to_csv())
    out.write(f"{prefix}_I.csv", i_rows.to_csv())
    out.write(f"{prefix}_I_rayleigh.csv", _rayleigh_fp_series(p["n"]).to_csv())


def run_fig1(cfg, out):
    _run_ch_fp(cfg, out, "fig1")


def run_fig6(cfg, out):
    _run_ch_fp(cfg, out, "fig6")


def _desired_power_samples(spec, geometry, drops, seed, n):
    stream = RNGStream(seed, n)
    return np.array([ch_statistic(generate_channel(spec, geometry, stream.child(t)))
                     for t in range(drops)])


def run_fig2(cfg, out):
    p = cfg.params
    az = _models(p, "azimuth")
    lines = ["model,N,probability,value"]
    summary = MetricSeries()
    for model in ("complex_gaussian", "random_phase"):
        spec = build_spec(az, model)
        for n in p["n"]:
            s = _desired_power_samples(spec, parse_geometry(p["geometry"], n),
                                       int(p["drops"]), int(p["seed"]), n)
            probs, values = empirical_quantiles(s, int(p["quantiles"]))
            lines.extend(f"{model},{n},{repr(float(a))},{repr(float(b))}"
                         for a, b in zip(probs, values))
            var = float(np.var(s, ddof=1))
            summary.append(MetricRow(f"S_{model}", n, 1, float(s.mean()),
                                     float(s.std(ddof=1) / math.sqrt(s.size)), s.size))
            summary.append(MetricRow(f"S_var_{model}", n, 1, var, 0.0, s.size))
    out.write("fig2_cdf.csv", "\n".join(lines) + "\n")
    out.write("fig2_summary.csv", summary.to_csv())


def _mc_mu_rows(model, d, ns, seed, pairs, alpha, label):
    rows = MetricSeries()
    for n in ns:
        est = asym.mu_ula(model, d, n, "monte-carlo", rng=RNGStream(seed, n), pairs=pairs)
        rows.append(MetricRow(label, n, max(1, round(n / alpha)), est.mean, est.stderr,
                              est.samples))
    return rows


def run_fig3(cfg, out):
    p = cfg.params
    d = float(p["geometry"].get("d", 0.5))
    uniform = parse_angular(UNIFORM_AZ)
    vm = parse_angular(p["von_mises"])
    clustered = parse_angular(p["clustered"])
    for label, model in (("uniform", uniform), ("von_mises", vm)):
        out.write(f"fig3_mu_{label}_analysis.csv",
                  asym.mu_ula_series(model, d, p["n"]).to_csv())
    for label, model in (("uniform", uniform), ("von_mises", vm), ("3gpp", clustered)):
        rows = _mc_mu_rows(model, d, p["n"], int(p["seed"]), int(p["pairs"]),
                           float(p["alpha"]), f"mu_{label}")
        out.write(f"fig3_mu_{label}_simulation.csv", rows.to_csv())


def _fig4_models(p):
    models = [("uniform", parse_angular(UNIFORM_AZ))]
    for spec in p["von_mises"]:
        m = parse_angular(spec)
        models.append((f"vm_mu{spec['mu']:g}_kappa{spec['kappa']:g}", m))
    return models


def run_fig4(cfg, out):
    p = cfg.params
    d = float(p["geometry"].get("d", 0.5))
    ns = p["n"]
    fits = []
    for label, model in _fig4_models(p):
        series = asym.mu_ula_series(model, d, ns)
        out.write(f"fig4_mu_{label}.csv", series.to_csv())
        fit = asym.fit_log_slope(series, *p["fit_range"])
        fits.append({"model": label, "fit": json.loads(fit.to_json()),
                     "m_slope": asym.m_slope(model, d)})
    out.write("fig4_slopes.json", json.dumps(fits, indent=2, sort_keys=True) + "\n")


def run_fig5(cfg, out):
    p = cfg.params
    d = float(p["geometry"].get("d", 0.5))
    alpha = float(p["alpha"])
    for label, model in (("uniform", parse_angular(UNIFORM_AZ)),
                         ("von_mises", parse_angular(p["von_mises"]))):
        mus = asym.mu_ula_series(model, d, p["n"])
        rows = MetricSeries()
        for row in mus:
            k = max(1, round(row.N / alpha))
            # finite-K form: beta_bar over the K-1 interferers, alpha_eff = N / (K - 1)
            eta = asym.expected_eta(1.0, 1.0, row.N / (k - 1), row.mu) if k > 1 else 0.0
            rows.append(MetricRow(f"eta_{label}_analysis", row.N, k, eta, 0.0, 1))
        out.write(f"fig5_eta_{label}_analysis.csv", rows.to_csv())
    spec = build_spec(parse_angular(p["clustered"]), ray_powers="cluster_decay")
    sim = MetricSeries()
    ray = MetricSeries()
    for n in p["n"]:
        sim.append(eta_series(_drop_config(p, spec, n, link_gains="decay"), "eta_3gpp_unequal"))
        ray.extend(rayleigh_baseline(n, max(1, round(n / alpha)), int(p["drops"]),
                                     RNGStream(int(p["seed"]), n)))
    out.write("fig5_eta_3gpp_simulation.csv", sim.to_csv())
    out.write("fig5_eta_rayleigh.csv", ray.to_csv())


def _side(n):
    return math.isqrt(n)


def run_fig7(cfg, out):
    p = cfg.params
    g = p["geometry"]
    dx, dy = float(g.get("dx", 0.5)), float(g.get("dy", 0.5))
    analysis = asym.MuSeries([asym.MuRow(n, asym.mu_upa_uniform_closed(_side(n), _side(n), dx, dy),
                                         "exact-series") for n in p["n"]])
    out.write("fig7_mu_uniform_analysis.csv", analysis.to_csv())
    scenarios = (("uniform", UNIFORM_AZ, UNIFORM_EL),
                 ("wide", SCENARIO_WIDE["azimuth"], SCENARIO_WIDE["elevation"]),
                 ("narrow", SCENARIO_NARROW["azimuth"], SCENARIO_NARROW["elevation"]))
    for label, az, el in scenarios:
        az, el = parse_angular(az), parse_angular(el)
        rows = MetricSeries()
        for n in p["n"]:
            est = asym.mu_upa(az, el, _side(n), _side(n), dx, dy, "monte-carlo",
                              rng=RNGStream(int(p["seed"]), n), pairs=int(p["pairs"]))
            rows.append(MetricRow(f"mu_{label}", n, max(1, round(n / float(p["alpha"]))),
                                  est.mean, est.stderr, est.samples))
        out.write(f"fig7_mu_{label}_simulation.csv", rows.to_csv())


def run_fig8(cfg, out):
    p = cfg.params
    g = p["geometry"]
    dx, dy = float(g.get("dx", 0.5)), float(g.get("dy", 0.5))
    closed = asym.MuSeries()
    bound = asym.MuSeries()
    for n in p["n"]:
        s = _side(n)
        closed.append(asym.MuRow(n, asym.mu_upa_uniform_closed(s, s, dx, dy), "exact-series"))
        if s > 1:
            bound.append(asym.MuRow(n, asym.polar_bound(s, s, dx, dy), "asymptotic"))
    out.write("fig8_mu_uniform.csv", closed.to_csv())
    out.write("fig8_polar_bound.csv", bound.to_csv())
    fits = [json.loads(asym.fit_log_slope(closed, lo, hi).to_json())
            for lo, hi in p["fit_ranges"]]
    out.write("fig8_slopes.json", json.dumps(fits, indent=2, sort_keys=True) + "\n")
    for entry in p["quadrature_models"]:
        az = parse_angular(entry["azimuth"])
        el = parse_angular(entry["elevation"])
        series = asym.MuSeries([asym.MuRow(n, asym.mu_upa(az, el, _side(n), _side(n), dx, dy),
                                           "quadrature-series") for n in p["quadrature_n"]])
        out.write(f"fig8_mu_{entry['label']}.csv", series.to_csv())


def run_fig9(cfg, out):
    p = cfg.params
    for label, scen in (("wide", SCENARIO_WIDE), ("narrow", SCENARIO_NARROW)):
        spec = build_spec(parse_angular(scen["azimuth"]), elevation=parse_angular(scen["elevation"]),
                          ray_powers="cluster_decay")
        for alpha in p["alphas"]:
            rows = MetricSeries()
            for n in p["n"]:
                rows.extend(zeta_lsp(_drop_config(p, spec, n, alpha=float(alpha), users=None,
                                                  link_gains="decay")))
            out.write(f"fig9_{label}_alpha{alpha:g}.csv", rows.to_csv())


def scheduling_drop(spec, n, d, alpha, policy, stream, pool_factor=1, anchor="pairwise"):
    """One drop of the scheduling comparison.

    Candidates are drawn on a one-element array (angles and coefficients
    only) and evaluated on the full array when used. The first candidate is
    the desired user; without scheduling the first ``K`` candidates are
    served, with scheduling the greedy admissible subset of the pool.

    Returns
    -------
    dict with ``eta_unscheduled``, ``eta_scheduled``, ``bound``, ``selected``.
    """
    k = max(1, round(n / alpha))
    probe = ULA(1, d)
    full = ULA(n, d)
    pool = [generate_channel(spec, probe, stream) for _ in range(k * pool_factor)]
    served = [realize_on(c, full) for c in pool[:k]]
    H = np.column_stack([c.h for c in served])
    eta_un = float(eta_all(H)[0]) if k > 1 else 0.0
    result = greedy_schedule(pool, policy, k, anchor=anchor)
    chosen = [served[i] if i < k else realize_on(pool[i], full) for i in result.selected]
    if len(chosen) > 1:
        Hs = np.column_stack([c.h for c in chosen])
        eta_s = float(eta_all(Hs)[0])
        bound = eta_bound_ula(gamma_sum(chosen[0], chosen[1:]), n, d, policy.epsilon)
    else:
        eta_s, bound = 0.0, 0.0
    return {"eta_unscheduled": eta_un, "eta_scheduled": eta_s, "bound": bound,
            "selected": len(chosen)}


def run_fig10(cfg, out):
    p = cfg.params
    d = float(p["geometry"].get("d", 0.5))
    spec = build_spec(parse_angular(p["azimuth"]), rays=int(p["rays"]))
    # unit-power rays
    spec = spec.with_link_gain(float(p["rays"]))
    policy = ProtectionPolicy(float(p["epsilon"]), "ULA")
    unscheduled = ScheduleLog()
    scheduled = ScheduleLog()
    for n in p["n"]:
        base = RNGStream(int(p["seed"]), n)
        k = max(1, round(n / float(p["alpha"])))
        for t in range(int(p["drops"])):
            r = scheduling_drop(spec, n, d, float(p["alpha"]), policy, base.child(t),
                                int(p["pool_factor"]), p["anchor"])
            unscheduled.append(t, n, k, r["eta_unscheduled"], float("nan"))
            scheduled.append(t, n, r["selected"], r["eta_scheduled"], r["bound"])
    out.write("fig10_unscheduled.csv", unscheduled.to_csv())
    out.write("fig10_scheduled.csv", scheduled.to_csv())


def run_custom(cfg, out):
    p = cfg.params
    metric = p["metric"]
    az = _models(p, "azimuth")
    el = _models(p, "elevation")
    ns = p["n"]
    seed = int(p["seed"])
    geom = p["geometry"]
    if metric in ("ch_fp", "eta", "zeta"):
        spec = build_spec(az, p["coefficient_model"], el, p.get("rays"),
                          p.get("ray_powers") or "equal")
        rows = MetricSeries()
        for n in ns:
            dc = _drop_config(p, spec, n)
            if metric == "ch_fp":
                rows.extend(ch_fp_series(dc)[0])
            elif metric == "eta":
                rows.append(eta_series(dc))
            else:
                rows.extend(zeta_lsp(dc))
        out.write(f"custom_{metric}.csv", rows.to_csv())
    elif metric == "rayleigh":
        rows = MetricSeries()
        for n in ns:
            k = int(p["users"]) if p.get("users") is not None else max(1, round(n / float(p["alpha"])))
            rows.extend(rayleigh_baseline(n, k, int(p["drops"]), RNGStream(seed, n)))
        out.write("custom_rayleigh.csv", rows.to_csv())
    elif metric == "mu_ula":
        method = p.get("method") or "exact-series"
        d = float(geom.get("d", 0.5))
        if method == "monte-carlo":
            rows = asym.MuSeries()
            for n in ns:
                est = asym.mu_ula(az, d, n, method, rng=RNGStream(seed, n), pairs=int(p["pairs"]))
                rows.append(asym.MuRow(n, est.mean, method))
        else:
            rows = asym.mu_ula_series(az, d, ns, method)
        out.write("custom_mu_ula.csv", rows.to_csv())
    elif metric == "mu_upa":
        method = p.get("method") or "quadrature-series"
        dx, dy = float(geom.get("dx", 0.5)), float(geom.get("dy", 0.5))
        rows = asym.MuSeries()
        for n in ns:
            s = _side(n)
            val = asym.mu_upa(az, el, s, s, dx, dy, method, rng=RNGStream(seed, n),
                              pairs=int(p["pairs"]))
            rows.append(asym.MuRow(n, getattr(val, "mean", val), method))
        out.write("custom_mu_upa.csv", rows.to_csv())


# ------------------------------------------------------------ registry ----

_ULA = {"kind": "ULA", "d": 0.5}
_UPA = {"kind": "UPA", "dx": 0.5, "dy": 0.5}

REGISTRY = {
    "fig1": Experiment(
        "fig1", "ULA channel hardening S and favorable propagation I, clustered 3GPP angles, K=2",
        {"seed": 1, "drops": 200, "n": [64, 128, 256, 512, 1024, 1600], "users": 2,
         "geometry": _ULA, "coefficient_model": "random_phase", "azimuth": THREE_GPP_ULA},
        run_fig1),
    "fig2": Experiment(
        "fig2", "CDF of h^H h / N for complex-Gaussian vs random-phase ray gains",
        {"seed": 2, "drops": 1000, "n": [16, 64, 256, 1024], "quantiles": 200,
         "geometry": _ULA, "azimuth": THREE_GPP_ULA},
        run_fig2),
    "fig3": Experiment(
        "fig3", "mu_ULA vs N: series for uniform and von Mises, Monte Carlo for all three models",
        {"seed": 3, "n": [16, 32, 64, 128, 256, 512, 1024], "alpha": 2.0, "pairs": 20000,
         "geometry": _ULA, "von_mises": VM_30, "clustered": THREE_GPP_ULA},
        run_fig3),
    "fig4": Experiment(
        "fig4", "Logarithmic growth of mu_ULA from the exact series, with ln-N slope fits",
        {"seed": 4, "n": sorted({int(round(x)) for x in np.logspace(1, 5, 81)}),
         "fit_range": [1000, 100000], "geometry": _ULA,
         "von_mises": [{"type": "von_mises", "mu": 0.0, "kappa": 4.23},
                       {"type": "von_mises", "mu": 30.0, "kappa": 4.23},
                       {"type": "von_mises", "mu": 0.0, "kappa": 1.49},
                       {"type": "von_mises", "mu": 30.0, "kappa": 1.49}]},
        run_fig4),
    "fig5": Experiment(
        "fig5", "E[eta] vs N at alpha=2: analysis (uniform, von Mises), 3GPP unequal powers, Rayleigh",
        {"seed": 5, "drops": 200, "n": [16, 32, 64, 128, 256], "alpha": 2.0,
         "geometry": _ULA, "von_mises": VM_30, "clustered": THREE_GPP_ULA},
        run_fig5),
    "fig6": Experiment(
        "fig6", "UPA channel hardening and favorable propagation, Scenario Wide, K=2",
        {"seed": 6, "drops": 200, "n": [16, 64, 256, 1024], "users": 2, "geometry": _UPA,
         "coefficient_model": "random_phase", "azimuth": SCENARIO_WIDE["azimuth"],
         "elevation": SCENARIO_WIDE["elevation"]},
        run_fig6),
    "fig7": Experiment(
        "fig7", "mu_UPA vs N: uniform closed form and Monte Carlo for uniform, wide, narrow",
        {"seed": 7, "n": [16, 64, 256, 1024], "alpha": 2.0, "pairs": 20000, "geometry": _UPA},
        run_fig7),
    "fig8": Experiment(
        "fig8", "Logarithmic growth of mu_UPA: uniform closed form, polar envelope, quadrature models",
        {"seed": 8, "n": [s * s for s in range(2, 101)], "fit_ranges": [[100, 1000], [1000, 10000]],
         "geometry": _UPA, "quadrature_n": [4, 16, 64, 144, 256],
         "quadrature_models": [
             {"label": "vm_kappa1.49_band60", "azimuth": {"type": "von_mises", "mu": 0.0, "kappa": 1.49},
              "elevation": {"type": "uniform", "lo": 60.0, "hi": 120.0}},
             {"label": "vm_kappa4.23_band60", "azimuth": VM_30,
              "elevation": {"type": "uniform", "lo": 60.0, "hi": 120.0}}]},
        run_fig8),
    "fig9": Experiment(
        "fig9", "UPA E[eta] and zeta_LSP vs N for Scenario Wide and Narrow, alpha in {2, 4}",
        {"seed": 9, "drops": 200, "n": [16, 64, 144, 256], "alphas": [2.0, 4.0], "geometry": _UPA},
        run_fig9),
    "fig10": Experiment(
        "fig10", "Per-drop eta_i with and without epsilon-protection scheduling",
        {"seed": 10, "drops": 50, "n": [200, 400, 800, 1200, 1600, 2000], "alpha": 10.0,
         "rays": 20, "epsilon": 0.1, "pool_factor": 1, "anchor": "pairwise",
         "geometry": _ULA, "azimuth": UNIFORM_AZ},
        run_fig10),
    "custom": Experiment(
        "custom", "A single user-described curve (see config schema)",
        {"seed": 0, "drops": 200, "n": [16, 32, 64], "metric": "eta", "geometry": _ULA,
         "coefficient_model": "random_phase", "rays": None, "ray_powers": "equal",
         "azimuth": None, "elevation": None, "alpha": None, "users": None,
         "link_gains": "equal", "pairs": 20000, "method": None},
        run_custom),
}
