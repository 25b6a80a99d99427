"""Gamma and Bessel functions against closed forms, scipy and mpmath."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from edgeheat import specfun as sf
from edgeheat.errors import DomainError

SQRT_PI = math.sqrt(math.pi)


# -- gamma -------------------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(0.5, SQRT_PI), (1.0, 1.0), (-0.5, -2 * SQRT_PI),
                                         (5.0, 24.0), (-1.5, 4 * SQRT_PI / 3)])
def test_gamma_closed_forms(x, expected):
    assert sf.gamma_fn(x) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
def test_gamma_poles_raise(x):
    with pytest.raises(DomainError):
        sf.gamma_fn(x)


@given(st.floats(0.001, 0.999))
def test_gamma_reflection(x):
    assert sf.gamma_fn(x) * sf.gamma_fn(1 - x) == pytest.approx(math.pi / math.sin(math.pi * x),
                                                                rel=1e-11)


# -- I and K -----------------------------------------------------------------

def test_bessel_i_examples():
    assert sf.bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-12)
    assert sf.bessel_i(0.0, 0.1) == pytest.approx(1.00250156, abs=5e-9)
    # small-argument asymptote (r/2)^nu / Gamma(1 + nu)
    r = 1e-6
    assert sf.bessel_i(0.3, r) / ((r / 2) ** 0.3 / math.gamma(1.3)) == pytest.approx(1.0, abs=1e-10)


def test_bessel_k_examples():
    assert sf.bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1.0), rel=1e-12)
    z = 1e-8
    assert sf.bessel_k(0.0, z) + math.log(z) == pytest.approx(math.log(2) - sf.EULER_GAMMA, abs=1e-7)


@pytest.mark.parametrize("z", [0.0, -1.0])
def test_bessel_k_domain(z):
    with pytest.raises(DomainError):
        sf.bessel_k(0.3, z)


@pytest.mark.parametrize("nu", [0.0, 0.1, 0.3, 0.5, 0.7, 0.95])
def test_i_k_against_scipy(nu):
    for x in np.geomspace(1e-4, 600, 60):
        assert sf.bessel_i_scaled(nu, x) == pytest.approx(special.ive(nu, x), rel=1e-12)
        assert sf.bessel_k(nu, x) == pytest.approx(special.kv(nu, x), rel=1e-12)


@given(st.floats(0.0, 0.99), st.floats(0.1, 50.0))
def test_wronskian_i_k(nu, z):
    w = sf.bessel_i(nu, z) * sf.bessel_k_prime(nu, z) - sf.bessel_i_prime(nu, z) * sf.bessel_k(nu, z)
    assert w == pytest.approx(-1.0 / z, rel=1e-10)


@pytest.mark.parametrize("seam", [2.0, 25.0])
@pytest.mark.parametrize("nu", [0.0, 0.3, 0.5, 0.8])
def test_seams_are_continuous(seam, nu):
    lo, hi = seam * (1 - 1e-13), seam * (1 + 1e-13)
    cases = [(f, nu) for f in (sf.bessel_i_scaled, sf.bessel_k, sf.bessel_j, sf.bessel_y)]
    cases.append((sf.bessel_j, -nu or -0.4))
    for f, order in cases:
        a, b = f(order, lo), f(order, hi)
        assert abs(a - b) <= 1e-10 * max(abs(a), abs(b))


# -- J and Y -----------------------------------------------------------------

def test_j_half_integer_zeros():
    assert abs(sf.bessel_j(0.5, math.pi)) < 1e-15
    assert abs(sf.bessel_j(-0.5, math.pi / 2)) < 1e-15
    assert abs(sf.bessel_j(0.0, 2.404826)) < 1e-6


@pytest.mark.parametrize("x", [0.01, 0.7, 3.0, 17.0, 40.0, 300.0])
def test_half_integer_closed_forms(x):
    c = math.sqrt(2 / (math.pi * x))
    assert sf.bessel_j(0.5, x) == pytest.approx(c * math.sin(x), rel=1e-12, abs=1e-15)
    assert sf.bessel_j(-0.5, x) == pytest.approx(c * math.cos(x), rel=1e-12, abs=1e-15)
    assert sf.bessel_y(0.5, x) == pytest.approx(-c * math.cos(x), rel=1e-12, abs=1e-15)
    assert sf.bessel_i(0.5, x) == pytest.approx(c * math.sinh(x), rel=1e-12)
    assert sf.bessel_k(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-12)


@pytest.mark.parametrize("nu", [-0.9, -0.5, -0.3, 0.0, 0.3, 0.5, 0.7])
def test_j_against_mpmath(nu):
    for x in np.geomspace(1e-3, 200, 40):
        ref = float(mpmath.besselj(nu, x))
        assert sf.bessel_j(nu, x) == pytest.approx(ref, rel=1e-10, abs=1e-14)


@given(st.floats(0.05, 0.95), st.floats(0.2, 60.0))
def test_three_term_recurrence(nu, x):
    # J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu with orders nu-1 in (-1, 0) and nu+1 via mpmath
    lhs = sf.bessel_j(nu - 1, x) + float(mpmath.besselj(nu + 1, x))
    rhs = 2 * nu / x * sf.bessel_j(nu, x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * (abs(sf.bessel_j(nu - 1, x)) + 1e-300))


# -- zeros -------------------------------------------------------------------

def test_zero_examples():
    for n in range(1, 30):
        assert sf.bessel_j_zeros(0.5, n) == pytest.approx(n * math.pi, rel=1e-14)
    assert sf.bessel_j_zeros(0.0, 1) == pytest.approx(2.404826, abs=1e-6)


def test_integer_order_zeros_match_scipy():
    np.testing.assert_allclose(sf.bessel_j_zeros(0.0, np.arange(1, 21)), special.jn_zeros(0, 20),
                               rtol=1e-13)


@pytest.mark.parametrize("nu", [-0.7, -0.3, 0.0, 0.3, 0.8])
def test_zeros_are_roots(nu):
    for z in sf.bessel_j_zeros(nu, np.arange(1, 21)):
        assert abs(float(mpmath.besselj(nu, z))) < 1e-12


@given(st.floats(-0.99, 0.99), st.integers(1, 200))
def test_zeros_interlace(nu, n):
    assert sf.bessel_j_zeros(nu, n) < sf.bessel_j_zeros(nu, n + 1)


def test_zeros_below():
    zs = sf.bessel_j_zeros_below(0.5, 10.0)
    np.testing.assert_allclose(zs, [math.pi, 2 * math.pi, 3 * math.pi], rtol=1e-14)
