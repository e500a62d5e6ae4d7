import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xisb.errors import DomainError, TruncationError
from xisb.mellin import ContourSpec, mellin_transform
from xisb.specfun import divisor_table, xi
from xisb.xi_core import (
    THETA_FORM,
    VkEval,
    _dk_bessel,
    _dk_gauss,
    cdf_k1,
    cdf_series,
    cdf_theta_prime,
    cdf_w1_prime,
    survival_contour,
    survival_series,
    theta,
    theta_direct,
    theta_prime,
    v1,
    v2,
    v2_direct,
    v2_printed,
    v_contour,
    v_general,
    vk,
    w1,
    w1_prime,
    w2,
    w_contour,
    w_series,
)

positive = st.floats(0.15, 7.0)


def theta_partial(x, terms=60):
    # oracle: the defining series summed in multiprecision
    with mp.workdps(50):
        x = mp.mpf(x)
        return float(2 * x**2 * mp.fsum((2 * mp.pi**2 * n**4 * x**2 - 3 * mp.pi * n**2)
                                        * mp.exp(-mp.pi * n**2 * x**2) for n in range(1, terms)))


@pytest.mark.parametrize("x", [0.4, 0.8, 1.0, 1.7, 3.0])
def test_theta_against_partial_sums(x):
    assert abs(theta(x) - theta_partial(x)) < 1e-14


def test_theta_at_one():
    assert abs(theta(1.0) - 0.8934) < 1e-4


@given(positive)
def test_theta_reciprocity(x):
    assert abs(x * theta(x) - theta(1 / x)) <= 1e-12 * max(theta(1 / x), 1e-300) + 1e-300


def test_theta_mellin_is_xi():
    for s in (0.0, 2.0, 0.5 + 3j):
        assert abs(mellin_transform(theta, s) - xi(s)) < 1e-11


def test_theta_direct_agrees_above_one():
    x = np.array([1.0, 1.5, 2.5])
    assert np.allclose(theta(x), theta_direct(x), rtol=1e-14, atol=0)


@pytest.mark.parametrize("x", [0.6, 1.0, 1.8])
def test_theta_prime_finite_difference(x):
    h = 1e-5
    fd = (theta(x + h) - theta(x - h)) / (2 * h)
    assert abs(theta_prime(x) - fd) < 1e-8


@given(positive)
def test_v1_is_twice_theta(x):
    assert abs(v1(x) - 2 * theta(x)) <= 1e-12 * (1 + abs(theta(x)))


@pytest.mark.parametrize("x", [0.5, 1.0, 1.3, 2.0])
def test_w_series_vs_contour(x):
    assert abs(w1(x) - w_contour(1, x)) < 1e-8
    assert abs(w2(x) - w_contour(2, x)) < 1e-6
    assert w_series(1, x) == w1(x)


def test_w_series_k3_unavailable():
    with pytest.raises(DomainError):
        w_series(3, 1.0)


@given(st.floats(0.3, 3.0))
def test_w1_jacobi(x):
    # Jacobi: (1 + w1(x)) x = 1 + w1(1/x)
    assert abs((1 + w1(x)) * x - (1 + w1(1 / x))) < 1e-13 * (1 + w1(1 / x))


@pytest.mark.parametrize("x", [0.7, 1.0, 2.0])
def test_w1_prime_finite_difference(x):
    h = 1e-5
    assert abs(w1_prime(x) - (w1(x + h) - w1(x - h)) / (2 * h)) < 1e-8


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_v2_series_vs_contour(x):
    assert abs(v2(x) - v_general(2, x)) < 1e-6


def test_v2_operator_coefficients():
    f = _dk_bessel(2)
    # 4 [z^4 K0 + 9 z^2 K0 - 6 z^3 K1]
    assert np.allclose(f.a.coef, [0, 0, 9, 0, 1]) and np.allclose(f.b.coef, [0, 0, 0, -6]) and f.scale == 4.0


def test_v1_operator_is_theta_form():
    # D^1 applied to 2 exp(-y) gives 2 (4 y^2 - 6 y) exp(-y) = 2 Theta-terms
    f = _dk_gauss(1)
    assert np.allclose(f.poly.coef * f.scale, 2 * THETA_FORM.poly.coef)


def test_v2_printed_disagrees():
    x = np.array([0.5, 1.0, 2.0])
    assert np.all(np.abs(v2_printed(x) - v2(x)) > 1e-2 * np.abs(v2(x)))


@given(st.floats(0.25, 4.0))
def test_v2_reciprocity(x):
    assert abs(x * v2(x) - v2(1 / x)) <= 1e-12 * abs(v2(1 / x)) + 1e-300


@pytest.mark.parametrize("x", [1.0, 1.5, 3.0])
def test_v2_direct_matches_multiprecision(x):
    ref = float(_dk_bessel(2).evaluate_mp(x, 30))
    assert abs(v2_direct(x) - ref) < 1e-14 * max(1, abs(ref))


def test_v2_direct_truncation_on_short_table():
    with pytest.raises(TruncationError):
        v2_direct(0.05, divisors=divisor_table(2, 10))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_v_contour_mellin_roundtrip(k):
    # the inverse transform should reproduce the total mass (2 xi(0))^k = 1
    f = lambda x: v_general(k, x)  # noqa: E731
    assert abs(mellin_transform(f, 0.0) - 1.0) < 1e-9


@pytest.mark.parametrize("k", [1, 2])
def test_contour_matches_series(k):
    x = np.array([0.6, 1.0, 1.7])
    assert np.allclose(v_contour(k, x), vk(k, x), rtol=0, atol=1e-12)


def test_v_contour_beyond_cutoff_is_zero():
    assert v_contour(3, 1e6) == 0.0


def test_cdf_k1_limits():
    assert abs(cdf_k1(100.0) - 1.0) < 1e-8
    assert cdf_k1(0.05) < 1e-100


@given(st.floats(0.2, 5.0))
def test_cdf_w1_prime_relation(x):
    assert abs(cdf_w1_prime(x) - cdf_k1(x)) < 1e-12


def test_cdf_theta_prime_relation_fails():
    # the relation with Theta in place of w_1 does not reproduce the closed form
    assert abs(cdf_theta_prime(1.0) - cdf_k1(1.0)) > 0.05


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("x", [0.4, 0.9, 1.0, 1.1, 2.5])
def test_survival_series_vs_contour(k, x):
    assert abs(survival_series(k, x) - survival_contour(k, x)) < 1e-10
    assert abs(cdf_series(k, x) + survival_series(k, x) - 1.0) < 1e-15


@given(st.floats(0.2, 5.0), st.floats(1.01, 2.0))
def test_cdf_series_monotone(x, r):
    for k in (1, 2):
        assert cdf_series(k, x * r) >= cdf_series(k, x) - 1e-15


def test_survival_series_k3_unavailable():
    with pytest.raises(DomainError):
        survival_series(3, 1.0)


def test_vkeval_modes():
    assert VkEval(1).mode == "series" and VkEval(3).mode == "contour"
    with pytest.raises(ValueError):
        VkEval(3, mode="series")
    with pytest.raises(ValueError):
        VkEval(0)
    c = VkEval(2, mode="contour", contour=ContourSpec(2.0, 60.0, 0.1))
    assert abs(c(1.0) - VkEval(2)(1.0)) < 1e-10


@pytest.mark.parametrize("fn", [theta, v1, v2, w1, w2])
def test_domain_errors(fn):
    with pytest.raises(DomainError):
        fn(0.0)
    with pytest.raises(DomainError):
        fn(-1.0)
    with pytest.raises(DomainError):
        fn(np.nan)


def test_vectorised_shapes():
    x = np.geomspace(0.2, 5, 7)
    for fn in (theta, v1, v2, w1, w2, cdf_k1):
        assert np.shape(fn(x)) == (7,)
        assert np.ndim(fn(1.0)) == 0
