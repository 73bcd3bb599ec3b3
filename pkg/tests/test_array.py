import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raymimo.angular import Clustered, Laplacian, RNGStream, Uniform, VonMises
from raymimo.array import (
    UPA,
    ULA,
    CoefficientModel,
    RayChannelSpec,
    cross_inner,
    exponential_decay_powers,
    generate_channel,
    response_sum,
    steering_ula,
    steering_upa,
)
from raymimo.errors import ConfigurationError, DimensionError
from raymimo.specialfn import dirichlet_cross

RP = CoefficientModel.RANDOM_PHASE
CG = CoefficientModel.COMPLEX_GAUSSIAN


def test_steering_ula_examples():
    np.testing.assert_allclose(steering_ula(2, 0.5, 0.0), [1, 1])
    np.testing.assert_allclose(steering_ula(2, 0.5, np.pi / 2), [1, -1], atol=1e-15)
    np.testing.assert_allclose(steering_ula(4, 0.5, np.pi / 6),
                               np.exp(1j * np.pi * np.arange(4) / 2), atol=1e-14)


def test_steering_upa_examples():
    np.testing.assert_array_equal(steering_upa(3, 4, 0.5, 0.5, 0.0, 1.1), np.ones(12))
    theta, phi = 0.7, 0.4
    np.testing.assert_allclose(steering_upa(2, 1, 0.5, 0.5, theta, phi),
                               np.exp(1j * np.pi * np.arange(2) * np.sin(theta) * np.cos(phi)))


def test_steering_unit_modulus():
    gen = np.random.default_rng(0)
    a = steering_ula(37, 0.7, gen.uniform(-np.pi, np.pi, 9))
    np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-14)
    b = steering_upa(5, 6, 0.5, 0.3, gen.uniform(0, np.pi, 9), gen.uniform(-np.pi, np.pi, 9))
    np.testing.assert_allclose(np.abs(b), 1.0, atol=1e-14)


@settings(max_examples=50)
@given(st.floats(0, np.pi), st.floats(-np.pi, np.pi), st.floats(0, np.pi), st.floats(-np.pi, np.pi),
       st.integers(1, 12), st.integers(1, 12))
def test_upa_factorization(t1, p1, t2, p2, nx, ny):
    dx = dy = 0.5
    a = steering_upa(nx, ny, dx, dy, t1, p1)
    b = steering_upa(nx, ny, dx, dy, t2, p2)
    tx = 2 * np.pi * dx * (np.sin(t2) * np.cos(p2) - np.sin(t1) * np.cos(p1))
    ty = 2 * np.pi * dy * (np.sin(t2) * np.sin(p2) - np.sin(t1) * np.sin(p1))
    lhs = abs(np.vdot(a, b)) / (nx * ny)
    assert lhs == pytest.approx(dirichlet_cross(tx, nx) * dirichlet_cross(ty, ny), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 15, 16, 17, 1000, 1601])
def test_response_sum_matches_matrix_product(n):
    gen = np.random.default_rng(n)
    phi = gen.uniform(-np.pi, np.pi, 13)
    g = gen.standard_normal(13) + 1j * gen.standard_normal(13)
    direct = steering_ula(n, 0.5, phi) @ g
    np.testing.assert_allclose(response_sum(ULA(n, 0.5), phi, g), direct, atol=1e-10 * np.sqrt(n))
    theta = gen.uniform(0, np.pi, 13)
    geom = UPA(3, 5, 0.5, 0.4)
    np.testing.assert_allclose(response_sum(geom, phi, g, theta),
                               steering_upa(3, 5, 0.5, 0.4, theta, phi) @ g, atol=1e-12)


def test_single_unit_ray_has_unit_modulus():
    spec = RayChannelSpec.equal_power(1, RP, Uniform())
    ch = generate_channel(spec, ULA(64, 0.5), RNGStream(1, 0))
    np.testing.assert_allclose(np.abs(ch.h), 1.0, atol=1e-12)
    assert cross_inner(ch, ch).real == pytest.approx(64.0)
    assert abs(cross_inner(ch, ch).imag) < 1e-10


def test_reconstruction_invariant():
    specs = [
        (RayChannelSpec.equal_power(7, RP, VonMises(0.3, 2.0)), ULA(200, 0.5)),
        (RayChannelSpec.equal_power(12, CG, Uniform(), Uniform(0.2, 2.9)), UPA(6, 9, 0.5, 0.5)),
        (RayChannelSpec.equal_power(6, CG, Clustered(Uniform(), Laplacian(0, 0.2), 2, 3)), ULA(50, 0.5)),
    ]
    for spec, geom in specs:
        for i in range(5):
            ch = generate_channel(spec, geom, RNGStream(2, i))
            assert np.max(np.abs(ch.h - ch.reconstruct())) < 1e-10
            assert len(ch.angles) == spec.rays


def test_mean_gain_is_one():
    spec = RayChannelSpec.equal_power(20, CG, Uniform())
    geom = ULA(32, 0.5)
    base = RNGStream(5, 0)
    x = np.array([np.vdot(h.h, h.h).real / 32 for h in
                  (generate_channel(spec, geom, base.child(i)) for i in range(10 ** 4))])
    assert abs(x.mean() - 1.0) < 3 * x.std(ddof=1) / np.sqrt(x.size)


def _gain_variance(coef, n, drops=400):
    spec = RayChannelSpec.equal_power(400, coef, Clustered(Uniform(), Laplacian.from_std(0, np.radians(15))))
    base = RNGStream(11, n)
    x = [np.vdot(h.h, h.h).real / n for h in
         (generate_channel(spec, ULA(n, 0.5), base.child(i)) for i in range(drops))]
    return np.var(x, ddof=1)


def test_complex_gaussian_gain_does_not_harden():
    # limiting variance is sum beta_ir^2 = 1/400
    v = _gain_variance(CG, 2048)
    assert v > 0.5 / 400


def test_random_phase_gain_hardens():
    means = []
    for n in (16, 256, 4096):
        spec = RayChannelSpec.equal_power(10, RP, Uniform())
        base = RNGStream(12, n)
        x = [np.vdot(h.h, h.h).real / n for h in
             (generate_channel(spec, ULA(n, 0.5), base.child(i)) for i in range(300))]
        means.append(np.mean(np.abs(np.array(x) - 1.0)))
    assert means[0] > means[1] > means[2]


def test_incompatible_spec_and_geometry():
    with pytest.raises(ConfigurationError):
        generate_channel(RayChannelSpec.equal_power(2, RP, Uniform()), UPA(2, 2), RNGStream(0))
    with pytest.raises(ConfigurationError):
        generate_channel(RayChannelSpec.equal_power(2, RP, Uniform(), Uniform()), ULA(4), RNGStream(0))


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        RayChannelSpec(2, (0.5,), RP, Uniform())
    with pytest.raises(ConfigurationError):
        RayChannelSpec(2, (0.5, -0.1), RP, Uniform())
    with pytest.raises(ConfigurationError):
        RayChannelSpec.equal_power(5, RP, Clustered(Uniform(), Uniform(), 2, 2))
    spec = RayChannelSpec.equal_power(3, RP, Uniform(), link_gain=2.0)
    assert spec.link_gain == pytest.approx(2.0, abs=1e-12)
    assert spec.with_link_gain(6.0).ray_powers == pytest.approx((2.0, 2.0, 2.0))


def test_cross_inner_length_mismatch():
    with pytest.raises(DimensionError):
        cross_inner(np.ones(3), np.ones(4))


def test_realizations_are_immutable():
    ch = generate_channel(RayChannelSpec.equal_power(2, RP, Uniform()), ULA(4), RNGStream(0))
    with pytest.raises(ValueError):
        ch.h[0] = 0


def test_exponential_decay_powers():
    p = exponential_decay_powers(8, total=8.0)
    assert p.sum() == pytest.approx(8.0)
    assert p[-1] == pytest.approx(p[0] / 10)
    assert np.all(np.diff(p) < 0)
    assert exponential_decay_powers(1, 3.0).tolist() == [3.0]
