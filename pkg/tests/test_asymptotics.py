import itertools
import json
import math

import numpy as np
import pytest

from raymimo.angular import Clustered, Laplacian, RNGStream, Uniform, VonMises, WrappedGaussian
from raymimo.asymptotics import (
    MuRow,
    MuSeries,
    SlopeFit,
    charfn_asymptotic,
    charfn_values,
    expected_eta,
    fit_log_slope,
    m_slope,
    m_vw,
    mu_ula,
    mu_ula_series,
    mu_upa,
    mu_upa_uniform_closed,
    polar_bound,
)
from raymimo.errors import UnsupportedVariantError
from raymimo.specialfn import bessel_j0, dirichlet_cross

TRUNCATED = Uniform(-np.pi / 3, np.pi / 3)
HALF = Uniform(0.0, np.pi)


def test_mu_ula_examples():
    for model in (Uniform(), VonMises(0.3, 2.0), TRUNCATED):
        assert mu_ula(model, 0.5, 1) == 1.0
    # n = 2: 1 + 2 (1/2) J0(pi)^2
    assert mu_ula(Uniform(), 0.5, 2) == pytest.approx(1 + bessel_j0(np.pi) ** 2, rel=1e-14)


def test_mu_ula_matches_pair_sum():
    # (1/N) sum_{k,l} |E exp(-j (k - l) 2 pi d sin phi)|^2 by explicit double loop
    for model, method in ((Uniform(), "exact-series"), (VonMises(0.5, 3.0), "exact-series"),
                          (WrappedGaussian(0.1, 0.7), "quadrature-series")):
        n = 12
        c = charfn_values(model, 0.5, n - 1, method)
        brute = sum(abs(c[abs(k - l)]) ** 2 for k in range(n) for l in range(n)) / n
        assert mu_ula(model, 0.5, n, method) == pytest.approx(brute, rel=1e-12)


def test_mu_ula_series_consistent_and_monotone():
    ns = list(range(1, 400, 7))
    for model in (Uniform(), VonMises(0.0, 4.23), VonMises(0.52, 1.49)):
        s = mu_ula_series(model, 0.5, ns)
        assert np.all(s.mu >= 1.0)
        assert np.all(np.diff(s.mu) >= -1e-9)
        assert s.mu[10] == pytest.approx(mu_ula(model, 0.5, ns[10]), rel=1e-12)


def test_mu_ula_concave_in_log_n_for_uniform():
    ns = [2 ** k for k in range(3, 14)]
    mu = mu_ula_series(Uniform(), 0.5, ns).mu
    steps = np.diff(mu)
    assert np.all(steps > 0)
    assert np.all(np.diff(steps) < 0.05)


def test_quadrature_series_matches_exact():
    a = mu_ula(VonMises(0.2, 1.49), 0.5, 64, "quadrature-series")
    b = mu_ula(VonMises(0.2, 1.49), 0.5, 64, "exact-series")
    assert a == pytest.approx(b, rel=1e-8)
    with pytest.raises(UnsupportedVariantError):
        mu_ula(Laplacian(0, 0.3), 0.5, 8, "exact-series")


def test_mu_ula_monte_carlo_clustered():
    model = Clustered(Uniform(), Laplacian.from_std(0, math.radians(15)), 4, 5)
    est = mu_ula(model, 0.5, 32, "monte-carlo", rng=RNGStream(1), pairs=40000)
    # independent rays from the cluster marginal are uniform: compare with the uniform series
    assert abs(est.mean - mu_ula(Uniform(), 0.5, 32)) < 4 * est.stderr


def test_charfn_asymptotic_examples():
    v = charfn_asymptotic(Uniform(), 0.5, 400)
    expected = math.cos(400 * np.pi - np.pi / 4) / (np.pi * math.sqrt(200))
    assert v.real == pytest.approx(expected, rel=1e-12)
    assert abs(v.imag) < 1e-15
    assert charfn_asymptotic(TRUNCATED, 0.5, 123) == 0


def test_m_slope_examples():
    assert m_slope(Uniform(), 0.5) == pytest.approx(2 / np.pi ** 2)
    assert m_slope(Uniform(), 0.25) == pytest.approx(1 / (np.pi ** 2 * 0.25))
    assert m_slope(TRUNCATED, 0.5) == 0.0


def test_expected_eta_examples():
    assert expected_eta(1, 1, 2, 1) == 0.5
    with pytest.raises(ValueError):
        expected_eta(1, 1, 0, 1)


def test_fit_log_slope_synthetic():
    ns = np.arange(10, 200, 10)
    s = MuSeries([MuRow(int(n), 3 * math.log(n) + 1, "asymptotic") for n in ns])
    fit = fit_log_slope(s, 10, 200)
    assert fit.slope == pytest.approx(3)
    assert fit.intercept == pytest.approx(1)
    assert fit.r_squared == pytest.approx(1)
    assert json.loads(fit.to_json())["slope"] == pytest.approx(3)
    with pytest.raises(ValueError):
        fit_log_slope(s, 10, 30)
    with pytest.raises(ValueError):
        SlopeFit(1.0, 0.0, 1.0, 100, 10)


def test_mu_series_csv():
    s = MuSeries([MuRow(4, 1.5, "exact-series")])
    assert s.to_csv().splitlines() == ["N,mu,method", "4,1.5,exact-series"]
    with pytest.raises(ValueError):
        MuRow(4, 1.0, "guess")


def test_m_vw_examples_and_uniform_identity():
    assert m_vw(Uniform(), HALF, 0, 0, 0.5, 0.5) == 1
    for v, w in ((1, 0), (0, 3), (2, -5), (7, 7)):
        nu = math.hypot(v * 0.5, w * 0.5)
        assert abs(m_vw(Uniform(), HALF, v, w, 0.5, 0.5) - bessel_j0(np.pi * nu) ** 2) < 1e-12


def test_m_vw_hermitian():
    az, el = VonMises(0.4, 2.0), Uniform(0.3, 2.5)
    for v, w in ((1, 2), (3, -1), (0, 4), (5, 5)):
        a = m_vw(az, el, v, w, 0.5, 0.4)
        b = m_vw(az, el, -v, -w, 0.5, 0.4)
        assert abs(a - np.conj(b)) < 1e-10


def test_m_vw_rejects_clustered():
    with pytest.raises(UnsupportedVariantError):
        m_vw(Clustered(Uniform(), Uniform(), 2, 2), HALF, 1, 0, 0.5, 0.5)


def _four_fold(nx, ny, dx, dy):
    total = 0.0
    for kx, lx, ky, ly in itertools.product(range(nx), range(nx), range(ny), range(ny)):
        nu = math.hypot((kx - lx) * dx, (ky - ly) * dy)
        total += bessel_j0(np.pi * nu) ** 4
    return total / (nx * ny)


@pytest.mark.parametrize("nx,ny,dx,dy", [(1, 1, 0.5, 0.5), (2, 1, 0.5, 0.5), (3, 4, 0.5, 0.3), (5, 5, 0.7, 0.5)])
def test_closed_form_matches_four_fold_sum(nx, ny, dx, dy):
    assert mu_upa_uniform_closed(nx, ny, dx, dy) == pytest.approx(_four_fold(nx, ny, dx, dy), rel=1e-12)


def test_closed_form_example_two_by_one():
    assert mu_upa_uniform_closed(2, 1, 0.5, 0.5) == pytest.approx(1 + bessel_j0(np.pi / 2) ** 4)


def test_mu_upa_trivial_and_monotone():
    assert mu_upa(VonMises(0, 1), Uniform(0.5, 2.0), 1, 1, 0.5, 0.5) == pytest.approx(1.0)
    vals = [mu_upa_uniform_closed(n, n, 0.5, 0.5) for n in range(1, 40)]
    assert np.all(np.array(vals) >= 1.0)
    assert np.all(np.diff(vals) >= -1e-9)


def test_mu_upa_quadrature_vs_monte_carlo_nonuniform():
    az, el = VonMises(0.3, 1.5), Uniform(np.pi / 3, 2 * np.pi / 3)
    q = mu_upa(az, el, 4, 4, 0.5, 0.5)
    mc = mu_upa(az, el, 4, 4, 0.5, 0.5, method="monte-carlo", rng=RNGStream(3), pairs=200000)
    assert abs(q - mc.mean) < 3 * mc.stderr


def test_mu_upa_exact_method_requires_uniform():
    with pytest.raises(UnsupportedVariantError):
        mu_upa(VonMises(0, 1), HALF, 2, 2, 0.5, 0.5, method="exact-series")


def test_polar_bound_grows_logarithmically():
    assert polar_bound(11, 11, 0.5, 0.5) == pytest.approx(0.5 * np.pi * math.log(10 * math.sqrt(2)))
    b = [polar_bound(n, n, 0.5, 0.5) for n in (100, 1000, 10000)]
    assert b[2] - b[1] == pytest.approx(0.5 * np.pi * math.log(10), rel=0.01)
    assert b[1] - b[0] == pytest.approx(0.5 * np.pi * math.log(10), rel=0.01)


def test_monte_carlo_pair_value_uses_dirichlet_kernel():
    # a single fixed pair: N D^2 equals |a^H a'|^2 / N
    n, d = 16, 0.5
    p, q = 0.3, -1.1
    a = np.exp(1j * 2 * np.pi * d * np.arange(n) * math.sin(p))
    b = np.exp(1j * 2 * np.pi * d * np.arange(n) * math.sin(q))
    tau = 2 * np.pi * d * (math.sin(q) - math.sin(p))
    assert n * dirichlet_cross(tau, n) ** 2 == pytest.approx(abs(np.vdot(a, b)) ** 2 / n)


def test_large_lag_expansion_pairs_endfire_densities_correctly():
    # asymmetric density: f(pi/2) pairs with exp(-j(2 pi d q - pi/4))
    q = np.arange(100, 201)
    exact = np.asarray(charfn_values(VonMises(0.52, 1.49), 0.5, 200))[100:]
    approx = charfn_asymptotic(VonMises(0.52, 1.49), 0.5, q)
    rms = lambda x: math.sqrt(np.mean(np.abs(x) ** 2))  # noqa: E731
    assert rms(exact - approx) < 0.01 * rms(exact)
