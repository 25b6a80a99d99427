import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from edgeheat.errors import ConditioningError, DomainError
from edgeheat.model_kernel import (TimeProfile, boundary_kernel, boundary_kernel_laplace, c_nu,
                                   euclid_kernel, extract_boundary_coeffs, fit_window,
                                   friedrichs_kernel, gn_symbol, images_kernel, signaling_solution)

NUS = (0.0, 0.3, 0.5, 0.7)


def _scipy_kernel(nu, t, x, xt):
    r = x * xt / (2 * t)
    return math.sqrt(x * xt) / (2 * t) * special.ive(nu, r) * math.exp(-(x - xt) ** 2 / (4 * t))


def test_half_order_is_images():
    t, x, xt = 1.0, 1.0, 1.0
    exact = -math.expm1(-1.0) / math.sqrt(4 * math.pi)
    assert friedrichs_kernel(0.5, t, x, xt) == pytest.approx(exact, rel=1e-14)
    # the six-digit reference value 0.178319 is within one unit of its last digit
    assert friedrichs_kernel(0.5, t, x, xt) == pytest.approx(0.178319, abs=1.5e-6)
    g = np.meshgrid(np.geomspace(1e-3, 10, 9), np.linspace(0.01, 4, 9), np.linspace(0.01, 4, 9))
    np.testing.assert_allclose(friedrichs_kernel(0.5, *g), images_kernel(*g), rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("nu", NUS)
def test_kernel_against_scipy(nu):
    for t in (0.01, 0.3, 2.0):
        for x in (0.05, 1.0, 3.0):
            for xt in (0.1, 1.5):
                assert friedrichs_kernel(nu, t, x, xt) == pytest.approx(_scipy_kernel(nu, t, x, xt),
                                                                        rel=1e-12)


@given(st.sampled_from(NUS), st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 5))
def test_symmetric_and_positive(nu, t, x, xt):
    a, b = friedrichs_kernel(nu, t, x, xt), friedrichs_kernel(nu, t, xt, x)
    assert a > 0
    assert a == pytest.approx(b, rel=1e-14)


@pytest.mark.parametrize("nu", NUS)
def test_solves_heat_equation(nu):
    h = 1e-4
    for t, x, xt in [(0.5, 1.0, 0.8), (1.0, 0.6, 1.4), (0.2, 0.9, 0.7)]:
        e = lambda tt, xx: friedrichs_kernel(nu, tt, xx, xt)
        dt = (e(t + h, x) - e(t - h, x)) / (2 * h)
        dxx = (e(t, x + h) - 2 * e(t, x) + e(t, x - h)) / h ** 2
        res = dt - dxx + (nu ** 2 - 0.25) / x ** 2 * e(t, x)
        assert abs(res) <= 1e-5


def test_array_input_and_domain():
    out = friedrichs_kernel(0.3, np.array([0.5, 1.0]), 1.0, 1.0)
    assert out.shape == (2,)
    with pytest.raises(DomainError):
        friedrichs_kernel(0.3, -1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        friedrichs_kernel(-0.1, 1.0, 1.0, 1.0)


def test_boundary_kernel_examples():
    assert boundary_kernel(0.0, 1.0, 1.0) == pytest.approx(math.exp(-0.25) / 2, rel=1e-14)
    assert boundary_kernel(0.0, 1.0, 1.0) == pytest.approx(0.3894004, abs=5e-8)
    # nu = 1/2: x e^{-x^2/4t} / (2 sqrt(pi) t^{3/2})
    for t, x in [(0.3, 0.4), (1.0, 2.0), (4.0, 0.1)]:
        expect = x * math.exp(-x * x / (4 * t)) / (2 * math.sqrt(math.pi) * t ** 1.5)
        assert boundary_kernel(0.5, t, x) == pytest.approx(expect, rel=1e-13)


@pytest.mark.parametrize("nu", NUS)
def test_boundary_kernel_is_limit(nu):
    t, x = 0.7, 1.3
    for xt in (1e-4, 1e-6):
        lim = xt ** (-nu - 0.5) * friedrichs_kernel(nu, t, x, xt)
        assert lim == pytest.approx(boundary_kernel(nu, t, x), rel=5 * xt)


@pytest.mark.parametrize("nu", NUS)
def test_boundary_kernel_laplace(nu):
    x, zeta = 0.8, 2.0
    num = integrate.quad(lambda t: boundary_kernel(nu, t, x) * math.exp(-zeta * t), 0, np.inf,
                         epsrel=1e-12, limit=200)[0]
    assert boundary_kernel_laplace(nu, x, zeta) == pytest.approx(num, rel=1e-9)


def test_euclid_kernel():
    assert euclid_kernel(0, 1.0) == 1.0
    assert euclid_kernel(1, 1.0, [0.0]) == pytest.approx(0.2820948, abs=5e-8)
    assert euclid_kernel(2, 0.5, [1.0, 1.0]) == pytest.approx(math.exp(-1) / (2 * math.pi), rel=1e-14)
    with pytest.raises(ValueError):
        euclid_kernel(2, 1.0, [1.0])


def test_c_nu():
    assert c_nu(0.0) == -1.0
    assert c_nu(0.4) == pytest.approx(0.8)


def test_gn_symbol_examples():
    assert gn_symbol(0.0, 4.0) == pytest.approx(0.5772157, abs=5e-8)
    assert gn_symbol(0.5, 4.0) == pytest.approx(-2.0, rel=1e-14)
    with pytest.raises(DomainError):
        gn_symbol(0.3, -1.0)
    # a point on the cut is read as a boundary value on request
    up, down = gn_symbol(0.3, complex(-2.0, 0.0), True), gn_symbol(0.3, complex(-2.0, -0.0), True)
    assert up == pytest.approx(down.conjugate())


@given(st.sampled_from(NUS), st.floats(0.1, 50), st.floats(-3.0, 3.0))
def test_gn_symbol_conjugate_symmetry(nu, r, phi):
    z = cmath.rect(r, phi)
    assert gn_symbol(nu, z.conjugate()) == pytest.approx(gn_symbol(nu, z).conjugate(), rel=1e-13)


@pytest.mark.parametrize("nu", [0.0, 0.3, 0.6])
@pytest.mark.parametrize("zeta", [1.0, 3.0])
def test_symbol_is_outgoing_coefficient(nu, zeta):
    # c_nu * Laplace[NE_nu](x) = x^{-nu+1/2} + G(zeta) x^{nu+1/2} + ... near x = 0
    x = np.geomspace(1e-3, 1e-2, 30)
    u = c_nu(nu) * np.array([boundary_kernel_laplace(nu, xi, zeta) for xi in x])
    c = extract_boundary_coeffs(nu, x, u)
    assert c.cminus == pytest.approx(1.0, rel=1e-6)
    assert c.cplus == pytest.approx(gn_symbol(nu, zeta).real, rel=1e-6)


def test_extract_synthetic():
    x = np.geomspace(0.01, 0.1, 30)
    c = extract_boundary_coeffs(0.3, x, 2 * x ** 0.8 + 3 * x ** 0.2 + x ** 1.5, basis="powers")
    assert (c.cplus, c.cminus) == (pytest.approx(2, abs=1e-6), pytest.approx(3, abs=1e-6))
    c = extract_boundary_coeffs(0.0, x, 2 * np.sqrt(x) + 3 * np.sqrt(x) * np.log(x))
    assert (c.cplus, c.cminus) == (pytest.approx(2, abs=1e-6), pytest.approx(3, abs=1e-6))


@pytest.mark.parametrize("nu", [0.0, 0.4])
def test_friedrichs_slice_has_no_incoming_part(nu):
    t, xt = 0.5, 1.0
    x = fit_window(t)
    c = extract_boundary_coeffs(nu, x, friedrichs_kernel(nu, t, x, xt))
    assert abs(c.cminus) <= 1e-6 * abs(c.cplus)


def test_extract_conditioning():
    x = np.full(30, 0.05) * (1 + 1e-15 * np.arange(30))
    with pytest.raises(ConditioningError):
        extract_boundary_coeffs(0.3, x, x)


def test_signaling_vanishes_initially():
    h = TimeProfile.exponential(1.0)
    vals = [abs(signaling_solution(0.4, 0, h, t, 0.5)) for t in (1e-2, 1e-3, 1e-4)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-100


def test_signaling_edge_coefficients():
    h = TimeProfile.t_exponential(2.0)
    t = 0.8
    x = fit_window(t)
    u = np.array([signaling_solution(0.4, 0, h, t, xi) for xi in x])
    assert extract_boundary_coeffs(0.4, x, u).cminus == pytest.approx(h(t), rel=1e-4)


def test_signaling_b1_gaussian_factor():
    h = TimeProfile.exponential(1.0)
    a = signaling_solution(0.3, 1, h, 1.0, 0.5, y=0.0)
    b = signaling_solution(0.3, 0, h, 1.0, 0.5)
    assert 0 < a < b
