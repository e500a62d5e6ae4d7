import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xisb import distribution as dist
from xisb.errors import DomainError
from xisb.xi_core import cdf_k1, cdf_series, survival_contour, theta


@pytest.fixture(scope="module", params=[1, 2])
def d(request):
    return dist.build(request.param)


@pytest.fixture(scope="module")
def d1():
    return dist.build(1)


def test_build_invariants(d):
    assert d.norm > 0
    assert np.all(np.diff(d.table_x) > 0) and np.all(np.diff(d.table_F) > 0)
    assert d.table_F[0] < 1e-6 and d.table_F[-1] > 1 - 1e-6
    assert abs(d.norm * d.table_mass - 1.0) < 1e-8


def test_raw_mass_is_one_not_power_of_two():
    for k in (1, 2, 3):
        raw = dist.build(k).raw_mass
        assert abs(raw - 1.0) < 1e-8
        assert abs(raw - 2.0**k) > 0.5


def test_build_rejects_bad_k():
    with pytest.raises(DomainError):
        dist.build(0)


def test_pdf_k1_value(d1):
    assert abs(dist.pdf(d1, 1.0) - 2 * d1.norm * theta(1.0)) < 1e-14


def test_pdf_domain(d1):
    with pytest.raises(DomainError):
        dist.pdf(d1, 0.0)
    with pytest.raises(DomainError):
        dist.cdf(d1, -1.0)


@given(st.floats(0.3, 4.0))
def test_size_bias_change_of_variables(x):
    # size-biased density x pdf(x) equals the density of 1/X, pdf(1/x) / x^2
    d = dist.build(1)
    lhs, rhs = x * dist.pdf(d, x), dist.pdf(d, 1 / x) / x**2
    assert abs(lhs - rhs) <= 1e-12 * (1 + rhs)


def test_cdf_matches_closed_form_k1(d1):
    x = np.geomspace(0.2, 6.0, 40)
    assert np.max(np.abs(dist.cdf(d1, x) - cdf_k1(x))) < 1e-8


def test_cdf_matches_series_k2():
    d = dist.build(2)
    x = np.geomspace(0.15, 8.0, 30)
    assert np.max(np.abs(dist.cdf(d, x) - cdf_series(2, x))) < 1e-10


def test_cdf_tails(d):
    lo, hi = d.table_x[0] / 3, d.table_x[-1] * 2
    assert 0 <= dist.cdf(d, lo) < 1e-6
    assert 1 - 1e-6 < dist.cdf(d, hi) <= 1


def test_cdf_derivative_is_pdf(d):
    for x in (0.7, 1.0, 1.6):
        h = 1e-5
        fd = (dist.cdf(d, x + h) - dist.cdf(d, x - h)) / (2 * h)
        assert abs(fd - dist.pdf(d, x)) < 1e-6


def test_cdf_k3_against_contour():
    d = dist.build(3)
    x = np.array([0.5, 1.0, 2.0])
    assert np.max(np.abs(1 - dist.cdf(d, x) - survival_contour(3, x))) < 1e-9


@pytest.mark.parametrize("k", [1, 2])
def test_moments(k):
    d = dist.build(k)
    assert abs(dist.moment(d, 0.0) - 1) < 1e-8
    assert abs(dist.moment(d, 1.0) - 1) < 1e-8
    for s in (2.0, 3.0, 0.5 + 2j):
        assert abs(dist.moment(d, s) - dist.moment(d, 1 - s)) < 1e-7
        assert abs(dist.moment(d, s) - (2 * complex(__import__("xisb").xi(s))) ** k) < 1e-8


@pytest.mark.parametrize("k", [1, 2, 3])
def test_mean_variance(k):
    d = dist.build(k)
    mean, var = dist.mean_variance(d)
    assert abs(mean - 1) < 1e-8
    assert abs(var - (float(np.real(dist.moment(d, 2.0))) - 1)) < 1e-9
    assert abs(var - ((math.pi / 3) ** k - 1)) < 1e-8


@pytest.mark.parametrize("name,f", [("one", lambda x: np.ones_like(x)), ("x", lambda x: x),
                                    ("exp", lambda x: np.exp(-x)), ("bump", lambda x: 1 / (1 + x * x))])
def test_size_bias_gap(d, name, f):
    assert dist.size_bias_gap(d, f) <= 1e-7


def test_quantile_roundtrip_k1(d1):
    p = cdf_k1(1.0)
    assert abs(dist.quantile(d1, p) - 1.0) < 1e-8
    assert abs(cdf_k1(dist.quantile(d1, 0.5)) - 0.5) < 1e-10


@given(st.floats(1e-4, 1 - 1e-4))
def test_quantile_inverts_cdf(p):
    d = dist.build(2)
    assert abs(dist.cdf(d, dist.quantile(d, p)) - p) <= 1e-10


def test_quantile_monotone_and_domain(d):
    assert dist.quantile(d, 0.25) < dist.quantile(d, 0.75)
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            dist.quantile(d, p)


def test_sample_determinism(d):
    a = dist.sample(d, 1000, dist.SamplerState(7))
    b = dist.sample(d, 1000, dist.SamplerState(7))
    c = dist.sample(d, 1000, dist.SamplerState(8))
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_sample_counter_advances(d1):
    st_ = dist.SamplerState(3)
    a = dist.sample(d1, 10, st_)
    b = dist.sample(d1, 10, st_)
    assert st_.counter == 2 and not np.array_equal(a, b)
    assert np.array_equal(b, dist.sample(d1, 10, dist.SamplerState(3, counter=1)))


def test_spawn_independent_streams():
    kids = dist.SamplerState(11).spawn(3)
    assert len({k.seed for k in kids}) == 3
    assert [k.seed for k in kids] == [k.seed for k in dist.SamplerState(11).spawn(3)]


def test_sample_rejects_bad_n(d1):
    with pytest.raises(DomainError):
        dist.sample(d1, 0, dist.SamplerState(1))


def test_sample_mean_and_ks(d):
    n = 10_000
    xs = dist.sample(d, n, dist.SamplerState(2024))
    assert abs(xs.mean() - 1) < 0.01
    assert dist.ks_statistic(d, xs) <= 1.63 / math.sqrt(n)


def test_sample_quantiles_agree_with_bisection(d):
    # the interpolated inverse and the bisection quantile agree
    p = np.array([0.01, 0.3, 0.5, 0.9, 0.999])
    interp = np.exp(d._inverse(np.log(p) - np.log1p(-p)))
    assert np.max(np.abs(interp - dist.quantile(d, p)) / dist.quantile(d, p)) < 1e-4


def test_ks_statistic_detects_wrong_law(d1):
    xs = dist.sample(dist.build(2), 5000, dist.SamplerState(5))
    assert dist.ks_statistic(d1, xs) > 1.63 / math.sqrt(5000)
