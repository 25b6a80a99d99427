import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from edgeheat.boundary import (BoundaryCoefficients, LagrangianMatrix, NuSpectrum, domain_residual,
                               dump_boundary_json, indicial_roots, is_non_logarithmic,
                               lagrangian_defect, load_boundary_json, nu_squared_from_fiber,
                               omega_form, validate_lagrangian)
from edgeheat.errors import DomainError

nus = st.floats(0.0, 0.99)


def test_omega_examples():
    s = NuSpectrum.from_list([0.0, 0.3])
    assert omega_form(1, "+", 1, "-", s) == pytest.approx(0.6)
    assert omega_form(0, "+", 0, "-", s) == 1.0
    for i in range(2):
        for j in range(2):
            assert omega_form(i, "+", j, "+", s) == 0.0
            assert omega_form(i, "-", j, "-", s) == 0.0
    assert omega_form(0, "+", 1, "-", s) == 0.0


@given(st.lists(nus, min_size=1, max_size=4), st.data())
def test_omega_antisymmetric(values, data):
    s = NuSpectrum.from_list(values)
    i = data.draw(st.integers(0, s.p - 1))
    j = data.draw(st.integers(0, s.p - 1))
    s1, s2 = data.draw(st.sampled_from("+-")), data.draw(st.sampled_from("+-"))
    assert omega_form(i, s1, j, s2, s) == -omega_form(j, s2, i, s1, s)


@given(st.lists(nus, min_size=1, max_size=5))
def test_friedrichs_is_lagrangian(values):
    s = NuSpectrum.from_list(values)
    assert validate_lagrangian(LagrangianMatrix.friedrichs(s.p), s)


@given(nus, st.floats(-50, 50))
def test_single_channel_always_lagrangian(nu, theta):
    assert validate_lagrangian(LagrangianMatrix.mixed([[theta]]), NuSpectrum.from_list([nu]))


def test_asymmetric_pair_not_lagrangian():
    s = NuSpectrum.from_list([0.3, 0.3])
    G = LagrangianMatrix.mixed([[0.0, 1.0], [2.0, 0.0]])
    assert not validate_lagrangian(G, s)
    assert np.max(np.abs(lagrangian_defect(G, s))) == pytest.approx(0.6)


def test_weighted_symmetry_is_lagrangian():
    s = NuSpectrum.from_list([0.0, 0.4])
    assert validate_lagrangian(LagrangianMatrix.mixed([[0.2, 1.0], [0.8, -1.0]]), s)


def test_size_mismatch_raises():
    with pytest.raises(ValueError):
        validate_lagrangian(LagrangianMatrix.friedrichs(2), NuSpectrum.from_list([0.1]))


def test_non_logarithmic():
    assert is_non_logarithmic(LagrangianMatrix.friedrichs(2), NuSpectrum.from_list([0.0, 0.0]))
    assert not is_non_logarithmic(LagrangianMatrix.mixed([[1.0]]), NuSpectrum.from_list([0.0]))
    assert is_non_logarithmic(LagrangianMatrix.mixed([[1.0]]), NuSpectrum.from_list([0.2]))


def test_domain_residual_examples():
    s = NuSpectrum.from_list([0.4])
    G = LagrangianMatrix.mixed([[2.0]])
    np.testing.assert_allclose(domain_residual(G, BoundaryCoefficients((6.0,), (3.0,)), s), [0.0],
                               atol=1e-15)
    np.testing.assert_allclose(domain_residual(G, BoundaryCoefficients((1.0,), (0.0,)), s), [0.8])
    F = LagrangianMatrix.friedrichs(3)
    s3 = NuSpectrum.from_list([0.0, 0.2, 0.7])
    res = domain_residual(F, BoundaryCoefficients((1.0, -2.0, 5.0), (0.0, 0.0, 0.0)), s3)
    np.testing.assert_allclose(res, 0.0)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-3, 3))
def test_domain_residual_linear(a1, a2, b1, b2, lam):
    s = NuSpectrum.from_list([0.0, 0.6])
    G = LagrangianMatrix.mixed([[0.5, 1.2], [1.0, -0.3]])
    c1 = BoundaryCoefficients((a1, a2), (b1, b2))
    c2 = BoundaryCoefficients((b2, a1), (a2, b1))
    mix = BoundaryCoefficients(tuple(np.add(c1.cplus, lam * np.array(c2.cplus))),
                               tuple(np.add(c1.cminus, lam * np.array(c2.cminus))))
    np.testing.assert_allclose(domain_residual(G, mix, s),
                               domain_residual(G, c1, s) + lam * domain_residual(G, c2, s),
                               atol=1e-10)


@pytest.mark.parametrize("nu, roots", [(0.3, (0.8, 0.2)), (0.0, (0.5, 0.5)), (0.5, (1.0, 0.0))])
def test_indicial_roots(nu, roots):
    assert indicial_roots(nu) == pytest.approx(roots)


@given(nus)
def test_indicial_roots_sum(nu):
    assert sum(indicial_roots(nu)) == pytest.approx(1.0)


def test_fiber_examples():
    # circle, l = 1: block [[k^2+1, -2k], [-2k, k^2+1]] has eigenvalues (k -+ 1)^2
    for k in (1, 2, 5):
        block = np.array([[k * k + 1, -2 * k], [-2 * k, k * k + 1]], float)
        assert nu_squared_from_fiber(k * k, 1, 1) == pytest.approx(sorted(np.linalg.eigvalsh(block)))
    assert nu_squared_from_fiber(1.0, 1, 1) == pytest.approx([0.0, 4.0], abs=1e-14)
    assert nu_squared_from_fiber(0.0, 1, 1) == pytest.approx([1.0, 1.0])
    with pytest.raises(DomainError):
        nu_squared_from_fiber(-1.0, 1, 1)


@given(st.floats(0, 100), st.integers(1, 5), st.data())
def test_fiber_values_nonnegative(mu, f, data):
    l = data.draw(st.integers(0, f + 1))
    assert all(v >= 0.0 for v in nu_squared_from_fiber(mu, l, f))


def test_spectrum_validation():
    with pytest.raises(DomainError):
        NuSpectrum.from_list([1.0])
    s = NuSpectrum.from_list([0.3, 0.0, 0.3])
    assert s.nus == (0.0, 0.3, 0.3) and s.q == 1 and s.p == 3
    with pytest.raises(ValueError):
        LagrangianMatrix((0,), ((2.0,),))


def test_json_round_trip():
    s, G = load_boundary_json('{"nus": [0, 0.4], "b": [1, 1], "theta": [[0, 1], [0.8, 0]]}')
    s2, G2 = load_boundary_json(dump_boundary_json(s, G))
    assert (s2, G2) == (s, G)
    s3, G3 = load_boundary_json(json.dumps({"nus": [0.2, 0.5]}))
    assert G3 == LagrangianMatrix.friedrichs(2)
    with pytest.raises(ValueError):
        load_boundary_json('{"nus": [0.5, 0.2]}')
    assert math.isclose(s.symplectic_weight(1), 0.8)


def test_theta_without_b_is_mixed():
    s, G = load_boundary_json({"nus": [0.0], "theta": [[0.5]]})
    assert G.b == (1,)
    with pytest.raises(ValueError):
        load_boundary_json({"nus": [0.0], "b": [1]})
