"""Symbolic order bookkeeping: symbols, inversion, time expansions, index sets."""

from fractions import Fraction as F

import numpy as np
import pytest
import sympy

from edgeheat import asymptotics as asy
from edgeheat.boundary import LagrangianMatrix, NuSpectrum
from edgeheat.errors import (CompositionError, DomainError, SingularSymbolError,
                             UnsupportedReductionError)
from edgeheat.model_kernel import gn_symbol


def setup(nus, theta, b=None):
    s = NuSpectrum.from_list(nus)
    G = LagrangianMatrix(tuple(b or (1,) * len(nus)), tuple(map(tuple, theta)))
    return s, G


def leading_shape(series):
    t = series.leading
    return (t.rho, t.abs_alpha)


# -- exact helpers -------------------------------------------------------------

def test_exact_and_format():
    assert asy.exact(0.3) == F(3, 10)
    assert asy.exact(F(1, 3)) == F(1, 3)
    assert asy.format_exponent(F(1, 5)) == "0.2"
    assert asy.format_exponent(F(-3, 2)) == "-1.5"
    assert asy.format_exponent(F(1, 3)).startswith("0.3333")
    assert asy.simple_rational(0.3 * 0.8 / 0.6) == sympy.Rational(2, 5)


# -- series algebra --------------------------------------------------------------

def test_series_ordering_and_merging():
    s = asy.ZetaSeries({(F(1, 2), (0,)): 2, (F(0), (1,)): 1, (F(0), (2,)): 3}, 1)
    assert [t.key for t in s.terms] == [(F(0), (1,)), (F(0), (2,)), (F(1, 2), (0,))]
    s2 = s + asy.ZetaSeries({(F(0), (1,)): -1}, 1)
    assert len(s2) == 2


def test_series_truncation_box():
    a = asy.ZetaSeries({(F(0), ()): 1, (F(1), ()): 1}, 0, rho_cut=F(1))
    b = asy.ZetaSeries({(F(1, 2), ()): 1}, 0)
    p = a * b
    # a is known up to rho = 1, b starts at 1/2: product known up to 3/2
    assert p.rho_cut == F(3, 2)
    assert p.coefficient(F(3, 2), ()) == 1


def test_series_evaluate_matches_symbol():
    s, G = setup([0.3], [[0.7]])
    M = asy.assemble_gn_matrix(s, G)
    for z in (2.0, 10 + 3j):
        assert M.evaluate(z)[0, 0] == pytest.approx(0.7 - gn_symbol(0.3, z), rel=1e-13)


def test_assemble_examples():
    s, G = setup([0.0], [[0.4]])
    M = asy.assemble_gn_matrix(s, G)
    z = 7.0
    assert M.evaluate(z)[0, 0] == pytest.approx(0.4 - gn_symbol(0.0, z), rel=1e-13)
    assert M.kappas[0] == pytest.approx(2 * (0.5772156649015329 - np.log(2) - 0.4))
    s2, G2 = setup([0.3, 0.5], [[1.0, 0.5], [0.6, 2.0]])
    M2 = asy.assemble_gn_matrix(s2, G2)
    assert M2[0, 1].terms[0].rho == 0 and len(M2[0, 1]) == 1
    assert M2[1, 0].coefficient(0, ()) == sympy.Rational(3, 5)
    # the theta_nu marker appears only at nu = 1/2
    assert {str(v) for v in M2[1, 1].free_symbols()} == {"C_1", "theta_nu_1"}
    assert {str(v) for v in M2[0, 0].free_symbols()} == {"C_0"}


def test_assemble_rejects_friedrichs_rows():
    s, G = setup([0.3, 0.5], [[1.0, 0.0], [0.0, 2.0]], b=(0, 1))
    with pytest.raises(UnsupportedReductionError, match="channel 0"):
        asy.assemble_gn_matrix(s, G)


# -- inversion -------------------------------------------------------------------

LK = [
    ([0.0], [[0.3]]),
    ([0.4], [[1.2]]),
    ([0.0, 0.0], [[0.3, 1.0], [1.0, -0.5]]),
    ([0.0, 0.6], [[0.2, 1.0], [1.2, 0.7]]),
    ([0.3, 0.5], [[0.5, 1.0], [0.6, 2.0]]),
    ([0.3, 0.3], [[1.1, -0.4], [-0.4, 0.9]]),
]


@pytest.mark.parametrize("nus, theta", LK)
def test_inverse_leading_terms_follow_table(nus, theta):
    s, G = setup(nus, theta)
    K = asy.invert_symbol_matrix(asy.assemble_gn_matrix(s, G))
    n = len(nus)
    for i in range(n):
        for j in range(n):
            assert leading_shape(K[i, j]) == asy.lk_leading_shape(nus[i], nus[j], i == j)


def test_reference_inverse_examples():
    s, G = setup([0.3, 0.5], [[0.5, 1.0], [0.6, 2.0]])
    K = asy.invert_symbol_matrix(asy.assemble_gn_matrix(s, G))
    assert K[0, 1].leading.rho == F(4, 5) and K[1, 0].leading.rho == F(4, 5)
    assert K[0, 0].leading.rho == F(3, 10) and K[1, 1].leading.rho == F(1, 2)
    s, G = setup([0.3, 0.5], [[0.5, 0.0], [0.0, 2.0]])
    M = asy.assemble_gn_matrix(s, G)
    K = asy.invert_symbol_matrix(M)
    assert not K[0, 1] and not K[1, 0]
    single = asy.invert_symbol_matrix(asy.assemble_gn_matrix(*setup([0.3], [[0.5]])))
    assert K[0, 0].terms == single[0, 0].terms


def test_single_zero_channel_is_inverse_log():
    s, G = setup([0.0], [[0.3]])
    M = asy.assemble_gn_matrix(s, G)
    K = asy.invert_symbol_matrix(M)
    lead = K[0, 0].leading
    assert (lead.rho, lead.alpha, lead.coefficient) == (0, (1,), -2)
    # numerically: -2 / (log zeta + kappa) exactly
    z = 1e4
    assert K.evaluate(z)[0, 0] == pytest.approx(1 / M.evaluate(z)[0, 0], rel=1e-12)


@pytest.mark.parametrize("nus, theta", LK)
def test_identity_residual_beyond_truncation(nus, theta):
    s, G = setup(nus, theta)
    M = asy.assemble_gn_matrix(s, G)
    K = asy.invert_symbol_matrix(M)
    for row in asy.identity_residual(M, K):
        for r in row:
            assert r.known_terms_vanish()


def test_inverse_numerically_close_at_large_zeta():
    s, G = setup([0.0, 0.4], [[0.2, 1.0], [0.8, -0.6]])
    M = asy.assemble_gn_matrix(s, G)
    K = asy.invert_symbol_matrix(M, truncation=(2, 5))
    z = 1e8
    exact = np.linalg.inv(M.evaluate(z))
    approx = K.evaluate(z)
    assert np.max(np.abs(approx - exact)) <= 1e-3 * np.max(np.abs(exact))


def test_singular_symbol():
    zero = asy.ZetaSeries({(F(0), ()): 0}, 0)
    with pytest.raises(SingularSymbolError):
        asy.invert_symbol_matrix([[zero]])
    m = asy.ZetaSeries({(F(0), ()): 1, (F(-1), ()): 1}, 0)
    # dominant term must divide every other term
    mixed = asy.ZetaSeries({(F(0), (1,)): 1, (F(1, 2), (0,)): 1}, 1)
    with pytest.raises(SingularSymbolError):
        asy.invert_symbol_matrix([[mixed]])
    assert asy.invert_symbol_matrix([[m]])[0][0].leading.rho == 1


# -- time expansions ---------------------------------------------------------------

def test_inverse_laplace_examples():
    e = asy.inverse_laplace_orders(asy.ZetaTerm(1, (1,), 0))
    assert e.leading.order == (-2, 1)
    e = asy.inverse_laplace_orders(asy.ZetaTerm(1, (), F(4, 5)))
    assert e.leading.order == (F(-2, 5), 0)
    assert e.leading.coefficient == 1 / sympy.gamma(sympy.Rational(4, 5))
    e = asy.inverse_laplace_orders(asy.ZetaTerm(1, (1, 1), F(3, 10)))
    assert e.leading.order == (F(-7, 5), 2)
    assert len(e) == 4 and e.remainder == (F(-7, 5), 5)


def test_inverse_laplace_edge_cases():
    assert len(asy.inverse_laplace_orders(asy.ZetaTerm(1, (), 0))) == 0
    with pytest.raises(DomainError):
        asy.inverse_laplace_orders(asy.ZetaTerm(1, (), F(-1, 2)))
    full = asy.inverse_laplace_orders(asy.ZetaTerm(1, (1,), 0))
    resolved = asy.inverse_laplace_orders(asy.ZetaTerm(1, (1,), 0), resolve_vanishing=True)
    assert resolved.leading.order == (-2, 2) and len(resolved) == len(full) - 1


@pytest.mark.parametrize("gamma, ni, nj, a", [(F(4, 5), F(3, 10), F(1, 2), 0), (1, 0, 0, 1),
                                              (F(3, 5), F(3, 10), F(3, 10), 0)])
def test_trace_order_examples(gamma, ni, nj, a):
    assert asy.trace_order(gamma, ni, nj).leading.order == (a, 0)


def test_ght_examples():
    assert asy.ght_trace_order(1, 0, 0, 2, 0).leading.order == (1, 2)
    # the formula gamma - (nu_i + nu_j) + 2 nu_beta gives 1 - 0.6 + 1.2 = 1.6
    assert asy.ght_trace_order(1, F(3, 10), F(3, 10), 0, F(3, 5)).leading.order == (F(8, 5), 0)
    for g, ni, nj, rho in [(0, F(1, 5), F(1, 2), F(1, 3)), (1, 0, F(2, 5), 0)]:
        assert (asy.ght_trace_order(g, ni, nj, 0, rho).orders()
                == asy.trace_order(g + 2 * rho, ni, nj).orders())


def test_main_table():
    rows = [((0, 0, False), (0, 2)), ((0, F(2, 5), False), (F(2, 5), 1)),
            ((0, 0, True), (0, 1)), ((F(3, 10), F(1, 2), False), (F(4, 5), 0)),
            ((F(3, 10), F(3, 10), True), (0, 0))]
    for args, order in rows:
        assert asy.main_leading_order(*args).order == order


def test_render():
    assert asy.TimeTerm(1, 0, 1).render() == "log(t)^-1"
    assert asy.TimeTerm(1, F(2, 5), 1).render() == "t^{0.2} * log(t)^-1"
    assert asy.TimeTerm(3, -2, 0).render() == "3 * t^{-1}"
    assert asy.TimeTerm(1, 0, 0).render() == "1"


# -- predictions -------------------------------------------------------------------

def test_predict_examples():
    assert asy.predict_trace_correction(*setup([0.0], [[0.0]])).leading.render(False) == "log(t)^-1"
    assert asy.predict_trace_correction(*setup([0.5], [[0.0]])).leading.order == (0, 0)
    empty = asy.predict_trace_correction(NuSpectrum.from_list([0.3]), LagrangianMatrix.friedrichs(1))
    assert empty.leading is None and not empty.entries


def test_predict_coupled_zero_and_positive():
    pred = asy.predict_trace_correction(*setup([0.0, 0.4], [[0.0, 1.0], [0.8, 0.0]]))
    rendered = {k: e.leading.render(False) for k, e in pred.entries.items()}
    assert rendered[(0, 1)] == rendered[(1, 0)] == "t^{0.2} * log(t)^-1"
    assert rendered[(0, 0)] == "log(t)^-1"


def test_decoupled_channels_are_union():
    joint = asy.predict_trace_correction(*setup([0.0, 0.3], [[0.5, 0.0], [0.0, -0.7]]))
    a = asy.predict_trace_correction(*setup([0.0], [[0.5]]))
    b = asy.predict_trace_correction(*setup([0.3], [[-0.7]]))
    assert set(joint.entries) == {(0, 0), (1, 1)}
    assert joint.entries[(0, 0)].orders() == a.entries[(0, 0)].orders()
    assert joint.entries[(1, 1)].orders() == b.entries[(0, 0)].orders()


def test_friedrichs_rows_are_dropped():
    s = NuSpectrum.from_list([0.2, 0.5])
    G = LagrangianMatrix((0, 1), ((1.0, 0.0), (0.0, 0.4)))
    pred = asy.predict_trace_correction(s, G)
    assert set(pred.entries) == {(1, 1)}


def test_pipeline_matches_table_on_random_configurations():
    rng = np.random.default_rng(5)
    for nus in ([0.0, 0.25], [0.1, 0.6], [0.0, 0.0], [0.0, 0.3, 0.7]):
        G = asy.random_lagrangian(nus, rng)
        assert asy.all_orders_consistent(NuSpectrum.from_list(nus), G) == []


def test_json_shape():
    doc = asy.predict_trace_correction(*setup([0.0], [[0.0]])).to_json()
    assert doc["leading"] == "log(t)^-1"
    assert doc["entries"][0]["i"] == 0 and doc["terms"][0]["logpower"] == 1


# -- front face ----------------------------------------------------------------------

def test_front_face_examples():
    k = asy.compose_front_face(asy.FrontFaceOrder.from_alpha(1, 1), asy.FrontFaceOrder.from_alpha(2, 1))
    assert k.order == 0 and k.alpha == 3
    with pytest.raises(ValueError):
        asy.compose_front_face(asy.FrontFaceOrder(0, 1), asy.FrontFaceOrder(0, 2))
    assert asy.g_kernel_order(F(3, 10), 1).order == -1 - 1 - F(3, 5)
    assert asy.d_kernel_order(F(3, 10), F(1, 2), False, 1).order == -3 + F(8, 5)
    assert asy.dg_improvement(F(3, 10), F(1, 2), False) == 1 + 2 * F(3, 10)
    assert asy.dg_improvement(F(3, 10), F(3, 10), True) == 1


# -- index sets ----------------------------------------------------------------------

def test_index_compose_examples():
    E = (asy.IndexSet([(1, 0)], 6), asy.IndexSet([(0, 0)], 6))
    Ep = (asy.IndexSet([(3, 0)], 6), asy.IndexSet([(0, 0)], 6))
    p_lf, _ = asy.index_compose(E, Ep, 0, 2)
    assert (3, 0) in p_lf and (3, 1) in p_lf
    disjoint = (asy.IndexSet([(F(1, 2), 0)], 6), asy.IndexSet([(0, 0)], 6))
    p_lf, _ = asy.index_compose(disjoint, Ep, 0, 0)
    assert p_lf.pairs == (asy.IndexSet([(F(1, 2), 0)], 6).pairs | Ep[0].pairs)
    empty = (asy.IndexSet([], 6), asy.IndexSet([(0, 0)], 6))
    p_lf, _ = asy.index_compose(E, empty, 0, 2)
    assert p_lf.pairs == E[0].shift(2).pairs & {x for x in E[0].shift(2).pairs if x[0] <= 6}


def test_index_compose_integrability():
    E = (asy.IndexSet([(-1, 0)]), asy.IndexSet([(0, 0)]))
    Ep = (asy.IndexSet([(0, 0)]), asy.IndexSet([(0, 0)]))
    with pytest.raises(CompositionError):
        asy.index_compose(E, Ep, 0, 0)


def test_index_set_closure():
    s = asy.IndexSet([(F(1, 2), 2)], F(5, 2))
    assert s.is_valid()
    assert (F(3, 2), 0) in s and (F(5, 2), 2) in s and (F(7, 2), 0) not in s
    with pytest.raises(ValueError):
        asy.IndexSet([(0, -1)])
