import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from stitsim import analytic as an
from stitsim.measure import HyperplaneMeasure, axis_parallel, isotropic


def _p_oracle(d, t, x):
    # mixture of exponential edge laws with time density d s^(d-1) / t^d
    g = mp.gamma(mp.mpf(d) / 2) / (mp.gamma(mp.mpf(1) / 2) * mp.gamma(mp.mpf(d + 1) / 2))
    f = lambda s: d * s ** (d - 1) / mp.mpf(t) ** d * g * s * mp.exp(-g * s * x)
    return mp.quad(f, [0, t])


def _p_closed(d, t, x):
    g = mp.gamma(mp.mpf(d) / 2) / (mp.gamma(mp.mpf(1) / 2) * mp.gamma(mp.mpf(d + 1) / 2))
    y = g * t * x
    return d / (g * t) ** d / mp.mpf(x) ** (d + 1) * mp.gammainc(d + 1, 0, y)


def test_gamma1_values():
    assert an.gamma1(2) == pytest.approx(2 / math.pi, rel=1e-15)
    assert an.gamma1(3) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ValueError):
        an.gamma1(0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 20.0), st.floats(0.0, 80.0))
def test_lower_incomplete_gamma_against_scipy(a, x):
    want = special.gammainc(a, x) * special.gamma(a)
    assert an.lower_incomplete_gamma(a, x) == pytest.approx(want, rel=1e-11, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 20.0), st.floats(0.01, 80.0))
def test_upper_plus_lower_is_gamma(a, x):
    total = an.lower_incomplete_gamma(a, x) + an.upper_incomplete_gamma(a, x)
    assert total == pytest.approx(math.gamma(a), rel=1e-12)


def test_incomplete_gamma_domain():
    with pytest.raises(ValueError):
        an.lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        an.lower_incomplete_gamma(1.0, -1.0)
    assert an.lower_incomplete_gamma(2.0, 0.0) == 0.0


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("x", [1e-4, 0.03, 0.7, 2.0, 9.0, 150.0])
def test_density_against_mpmath(d, t, x):
    mp.mp.dps = 30
    got = an.isegment_density(d, t, x)
    assert got == pytest.approx(float(_p_closed(d, t, x)), rel=1e-12)
    assert got == pytest.approx(float(_p_oracle(d, t, x)), rel=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_density_integrates_to_one(d):
    f = lambda x: an.isegment_density(d, 1.0, x)
    total = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, np.inf, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.5, 4.0, 60.0])
def test_cdf_is_integral_of_density(d, x):
    got = an.isegment_cdf(d, 1.3, x)
    want = integrate.quad(lambda v: an.isegment_density(d, 1.3, v), 0, x, limit=200,
                          epsabs=1e-14)[0]
    assert got == pytest.approx(want, rel=1e-8, abs=1e-14)
    assert an.isegment_cdf(d, 1.3, 0.0) == 0.0


def test_moments():
    assert an.isegment_mean(2, 1.0) == pytest.approx(math.pi)
    assert an.isegment_mean(2, 2.0) == pytest.approx(math.pi / 2)
    assert an.isegment_mean(3, 1.0) == pytest.approx(3.0)
    assert an.isegment_moment(3, 1.0, 2) == pytest.approx(24.0)
    assert an.isegment_variance(3, 1.0) == pytest.approx(15.0)
    assert an.isegment_moment(2, 1.0, 2) == math.inf
    assert an.isegment_moment(3, 1.0, 3) == math.inf


@pytest.mark.parametrize("d,m", [(2, 1), (3, 1), (3, 2)])
def test_moments_by_quadrature(d, m):
    mp.mp.dps = 25
    want = mp.quad(lambda x: x ** m * _p_closed(d, 1, x), [0, 1, 10, mp.inf])
    assert an.isegment_moment(d, 1.0, m) == pytest.approx(float(want), rel=1e-9)


@pytest.mark.parametrize("d", [2, 3])
def test_tail_constant(d):
    x = 1e6
    assert x ** (d + 1) * an.isegment_density(d, 1.0, x) == pytest.approx(
        an.tail_constant(d, 1.0), rel=1e-9)
    assert an.tail_constant(2, 1.0) == pytest.approx(math.pi ** 2)
    assert an.tail_constant(3, 1.0) == pytest.approx(144.0)


def test_birth_time_law():
    assert an.birth_time_density(2, 1.0, 0.5) == pytest.approx(1.0)
    assert an.birth_time_density(3, 2.0, 1.0) == pytest.approx(3 / 8)
    assert an.birth_time_density(2, 1.0, 1.5) == 0.0
    assert an.birth_time_mean(2, 1.0) == pytest.approx(2 / 3)
    assert an.birth_time_mean(3, 1.0) == pytest.approx(0.75)
    assert float(an.birth_time_cdf(3, 2.0, 1.0)) == pytest.approx(1 / 8)
    assert integrate.quad(lambda s: an.birth_time_density(3, 2.0, s), 0, 2)[0] == pytest.approx(1)


def test_intensity_and_incidence_coefficients():
    assert an.intensity_coefficient(2, 1) == pytest.approx(0.5)
    assert an.intensity_coefficient(3, 2) == pytest.approx(1 / 3)
    assert an.intensity_coefficient(3, 1) == pytest.approx(4 / 3)
    assert an.incidence_coefficient(3, 1) == 4
    assert an.incidence_coefficient(3, 2) == 1
    assert an.incidence_coefficient(2, 1) == 1
    with pytest.raises(ValueError):
        an.intensity_coefficient(3, 3)


def test_mean_intrinsic_volumes():
    # j = 0 is one for every k; mean length in the plane is pi/t
    assert an.mean_intrinsic_volume_isotropic(0, 1, 2, 1.0) == pytest.approx(1.0)
    assert an.mean_intrinsic_volume_isotropic(1, 1, 2, 1.0) == pytest.approx(math.pi)
    assert an.mean_intrinsic_volume_isotropic(1, 1, 3, 1.0) == pytest.approx(3.0)
    assert an.mean_intrinsic_volume_isotropic(1, 1, 2, 2.0) == pytest.approx(math.pi / 2)
    # plates in space at t = 1: intensity pi/48 and unit surface density give
    # mean area 48/pi; four plates per unit of edge length pi/4 give perimeter 12
    assert an.mean_intrinsic_volume_isotropic(1, 2, 3, 1.0) == pytest.approx(6.0)
    assert an.mean_intrinsic_volume_isotropic(2, 2, 3, 1.0) == pytest.approx(48 / math.pi)


def test_mean_intrinsic_volumes_reject_anisotropic():
    with pytest.raises(an.UnsupportedError):
        an.mean_intrinsic_volume_isotropic(1, 1, 2, 1.0, axis_parallel(2))
    assert an.mean_intrinsic_volume_isotropic(1, 1, 2, 1.0, isotropic(2)) == pytest.approx(
        math.pi)
    with pytest.raises(ValueError):
        an.mean_intrinsic_volume_isotropic(2, 1, 3, 1.0)


def test_dimension_checks():
    with pytest.raises(ValueError):
        an.isegment_density(4, 1.0, 1.0)
    with pytest.raises(ValueError):
        an.isegment_density(2, 0.0, 1.0)
    with pytest.raises(ValueError):
        an.isegment_density(2, 1.0, 0.0)


def test_mixture_time_law():
    rng = np.random.default_rng(0)
    law = an.MixtureLaw(2.0, 3, 1)
    s = np.array([law.sample_time(rng) for _ in range(100_000)])
    assert stats.kstest(s, lambda v: (v / 2.0) ** 3).statistic < 0.01


def test_mixture_sampler_lengths_2d():
    rng = np.random.default_rng(1)
    m = HyperplaneMeasure(isotropic(2))
    draws = [an.sample_typical_mixture(1, 2, 1.0, m, rng) for _ in range(3000)]
    L = np.array([f.measure for f, _ in draws])
    s = np.array([s for _, s in draws])
    assert np.all((s > 0) & (s < 1))
    # the reference point sits at the origin
    for f, _ in draws[:50]:
        assert min(np.hypot(*v) for v in f.vertices) < 1e-6
    p = stats.kstest(L, lambda x: an.isegment_cdf_array(2, 1.0, x)).pvalue
    assert p > 1e-3
    # given s, the rescaled edge is exponential with rate gamma1
    assert stats.kstest(L * s, stats.expon(scale=math.pi / 2).cdf).pvalue > 1e-3


def test_mixture_sampler_axis_parallel():
    rng = np.random.default_rng(2)
    m = HyperplaneMeasure(axis_parallel(2))
    f, s = an.sample_typical_mixture(1, 2, 1.0, m, rng)
    (x0, y0), (x1, y1) = f.vertices
    assert x0 == pytest.approx(x1) or y0 == pytest.approx(y1)
    with pytest.raises(ValueError):
        an.sample_typical_mixture(2, 2, 1.0, m, rng)


@pytest.mark.parametrize("d", [2, 3])
def test_vectorized_cdf_matches_scalar(d):
    x = np.concatenate([np.geomspace(1e-8, 1e4, 2001), [0.0, -1.0]])
    a = an.isegment_cdf_array(d, 1.3, x)
    b = np.array([an.isegment_cdf(d, 1.3, v) for v in x])
    assert np.allclose(a, b, rtol=1e-10, atol=1e-15)
    assert an.isegment_cdf_array(d, 1.0, np.array([[1.0, 2.0]])).shape == (1, 2)
