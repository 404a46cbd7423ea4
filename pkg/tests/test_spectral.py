from __future__ import annotations

import pytest
from hypothesis import assume, given
from mpmath import mp

from hh_cfrac.arith import Poly
from hh_cfrac.bal import element_from_point
from hh_cfrac.cfengine import expand
from hh_cfrac.errors import LeadingVanishes, PreconditionViolated, QuadraticDegenerate, VEqual
from hh_cfrac.spectral import (
    corollary_u_v,
    edge_relations,
    lambda_discriminant,
    lambda_pair_at,
    normal_form_g1,
    normal_form_g2,
    q_coeffs,
    qg_poly,
    qx_build,
    qx_explicit,
    t_roots_at,
    viete_checks,
)
from strategies import close_to, curves, generic_curve, is_square_free, poly_close, tol

QUARTIC = (1, 0, 0, 0, 1)
SEXTIC = (1, 0, 0, 0, 0, 0, 1)


def path_of(X: Poly, t, depth: int):
    h = element_from_point(X, t)
    tree = expand(h, depth, policy="first")
    return h, tree.path_states((1,) * depth)


def test_quartic_basic_polynomial():
    qx = qx_build(Poly.of(*QUARTIC))
    # (1 - lambda^2) s^2 - 2 lambda
    assert poly_close(qx.c0, Poly.of(0, 0, 1))
    assert poly_close(qx.c1, Poly.of(-2, 0, 0))
    assert poly_close(qx.c2, Poly.of(0, 0, -1))


def test_sextic_basic_polynomial():
    qx = qx_build(Poly.of(*SEXTIC))
    lam = mp.mpf("0.3")
    assert poly_close(qx.in_s(lam), Poly.of(-2 * lam, 0, 0, 1 - lam ** 2))


def test_lambda_zero_slice():
    X = generic_curve(1)
    qx = qx_build(X)
    Qg = qg_poly(X, 1)
    expected, _ = (X - Qg * Qg * X[0]).drop_low(2)
    assert poly_close(qx.in_s(0), expected.truncated(3))


@given(curves(1))
def test_explicit_genus_one_table(X):
    assume(is_square_free(X, 1))
    assert qx_build(X).max_diff(qx_explicit(X)) <= tol() * max(mp.mpf(1), X.norm() ** 2)


@given(curves(2))
def test_explicit_genus_two_table(X):
    assume(is_square_free(X, 2))
    assert qx_build(X).max_diff(qx_explicit(X)) <= tol() * max(mp.mpf(1), X.norm() ** 3)


@pytest.mark.parametrize("genus", [1, 2, 3])
def test_construction_identity(genus):
    X = generic_curve(genus)
    qx = qx_build(X)
    Qg = qg_poly(X, genus)
    for lam, s in ((mp.mpf("0.4"), mp.mpc("0.3", "0.9")), (mp.mpc(-1, 2), mp.mpf("-1.7"))):
        lhs = qx(lam, s) * s ** (genus + 1)
        rhs = X(s) - X[0] * (Qg(s) + lam * s ** (genus + 1)) ** 2
        assert close_to(lhs, rhs)


def test_t_roots_quartic():
    roots = t_roots_at(qx_build(Poly.of(*QUARTIC)), mp.sqrt(2) - 1)
    assert sorted(float(r.real) for r in roots) == pytest.approx([-1.0, 1.0])


def test_t_roots_sextic():
    roots = t_roots_at(qx_build(Poly.of(*SEXTIC)), mp.sqrt(2) - 1)
    assert len(roots) == 3
    for r in roots:
        assert close_to(r ** 3, 1)


def test_t_roots_double_zero_at_lambda_zero():
    roots = t_roots_at(qx_build(Poly.of(*QUARTIC)), 0)
    assert all(abs(r) < mp.mpf(10) ** -30 for r in roots)


def test_t_roots_leading_vanishes():
    with pytest.raises(LeadingVanishes):
        t_roots_at(qx_build(Poly.of(*QUARTIC)), 1)


@pytest.mark.parametrize("coeffs", [QUARTIC, SEXTIC])
def test_lambda_pair_at_one(coeffs):
    pair = lambda_pair_at(qx_build(Poly.of(*coeffs)), 1)
    r2 = mp.sqrt(2)
    assert any(close_to(l, r2 - 1) for l in pair)
    assert any(close_to(l, -r2 - 1) for l in pair)


def test_lambda_pair_even_symmetric_point():
    pair = lambda_pair_at(qx_build(Poly.of(1, 0, 0, 0, -1)), 1)
    assert all(close_to(l, -1, mp.mpf(10) ** -30) for l in pair)


def test_lambda_pair_degenerate_at_zero():
    with pytest.raises(QuadraticDegenerate):
        lambda_pair_at(qx_build(Poly.of(*QUARTIC)), 0)


def test_lambda_discriminant_quartic():
    disc = lambda_discriminant(qx_build(Poly.of(*QUARTIC)))
    assert poly_close(disc, Poly.of(0, 8, 0, -8), mp.mpf(10) ** -40)


@pytest.mark.parametrize("genus", [1, 2])
def test_edge_relations_hold(genus):
    h, states = path_of(generic_curve(genus), mp.mpc("0.7", "0.2"), 4)
    report = edge_relations(h, states)
    assert report.passed
    names = {r.name for r in report.relations}
    assert {"Q(lambda_i,t_i)", "Q(lambda_i,t_i+1)", "Q(lambda_i-1,t_i)"} <= names


@pytest.mark.parametrize(
    "coeffs,t",
    [(QUARTIC, 1), (SEXTIC, 1), (None, mp.mpc("0.7", "0.2"))],
)
def test_viete_relations(coeffs, t):
    X = Poly.of(*coeffs) if coeffs else generic_curve(2)
    h, states = path_of(X, t, 4)
    report = viete_checks(h, states)
    assert report.passed
    assert any(r.name == "lambda_sum" and r.checked == 4 for r in report.relations)


def test_normal_form_g1_quartic():
    h, states = path_of(Poly.of(*QUARTIC), 1, 5)
    report = normal_form_g1(h, states)
    assert report.passed
    assert len(report.values) == 5
    # v_(i+1) = (q2 - lambda_i) / 2 with q2 = 0
    lam0 = states[0].lam
    relation = {r.name: r for r in report.relations}
    assert relation["lambda_from_v"].holds
    assert close_to(-lam0 / 2, (q_coeffs(h.X, 3)[2] - lam0) / 2)


def test_normal_form_g1_generic():
    h, states = path_of(generic_curve(1), mp.mpc("0.7", "0.2"), 5)
    report = normal_form_g1(h, states)
    assert report.passed
    assert report.findings


def test_normal_form_g2_sextic():
    h, states = path_of(Poly.of(*SEXTIC), 1, 3)
    report = normal_form_g2(h, states)
    assert report.passed
    relation = {r.name: r for r in report.relations}
    assert relation["u_normal1"].holds
    assert relation["equivalence"].holds


def test_normal_form_g2_generic():
    h, states = path_of(generic_curve(2), mp.mpc("0.7", "0.2"), 4)
    assert normal_form_g2(h, states).passed


def test_normal_form_genus_mismatch():
    h, states = path_of(Poly.of(*QUARTIC), 1, 2)
    with pytest.raises(PreconditionViolated):
        normal_form_g2(h, states)


def test_corollary_needs_distinct_v():
    q = [mp.mpf(0)] * 7
    with pytest.raises(VEqual):
        corollary_u_v(1, mp.mpf("0.5"), mp.mpf("0.5"), q)
