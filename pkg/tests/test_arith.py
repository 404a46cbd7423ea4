from __future__ import annotations

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from mpmath import mp

from hh_cfrac.arith import (
    Poly,
    Series,
    cluster_distinct,
    format_scalar,
    hh_series,
    interpolate,
    is_zero,
    parse_scalar,
    poly_roots,
    recenter,
    root_multiplicities,
    series_sqrt,
    sort_canonical,
    sylvester_resultant,
)
from hh_cfrac.errors import DegreeZero, MalformedInput, SqrtAtRoot, TAtZero
from strategies import close_to, curves, points, poly_close


def test_recenter_binomial():
    assert poly_close(recenter(Poly.of(0, 0, 1), 1), Poly.of(1, 2, 1))
    assert poly_close(recenter(Poly.of(0, 0, 1), 0), Poly.of(0, 0, 1))
    assert poly_close(recenter(Poly.of(1, 0, 0, 0, 1), 0), Poly.of(1, 0, 0, 0, 1))


@given(curves(2), points())
def test_recenter_round_trip(X, eps):
    back = recenter(recenter(X, eps), -eps)
    assert poly_close(back, X, mp.ldexp(1, -((3 * mp.prec) // 4)))
    assert close_to(recenter(X, eps)[0], X(eps))


def test_series_sqrt_examples():
    assert series_sqrt(Poly.of(1), 6).coeffs == tuple(mp.mpc(c) for c in (1, 0, 0, 0, 0, 0))
    S = series_sqrt(Poly.of(1, 2, 1), 6)
    assert poly_close(S.to_poly(), Poly.of(1, 1))
    q = series_sqrt(Poly.of(1, 0, 0, 0, 1), 8)
    assert poly_close(q.to_poly(), Poly.of(1, 0, 0, 0, "0.5"))


@pytest.mark.parametrize("genus", [1, 2, 3, 4])
def test_series_sqrt_squares_back(genus):
    rng = [mp.mpf(k % 7 - 3) / 3 for k in range(1, 2 * genus + 4)]
    X = Poly.of(1, *rng[: 2 * genus + 1], 2)
    order = 3 * genus + 6
    S = series_sqrt(X, order)
    diff = S * S - Series.from_poly(X, order)
    assert diff.norm() <= mp.ldexp(1, -(mp.prec // 2)) * X.norm()


def test_series_sqrt_principal_branch():
    S = series_sqrt(Poly.of(-4, 1, 0, 0, 1), 4)
    assert close_to(S[0], mp.mpc(0, 2))
    S = series_sqrt(Poly.of(4, 1, 0, 0, 1), 4)
    assert close_to(S[0], 2)


def test_series_sqrt_genus_one_q_table():
    p = [mp.mpf(v) for v in ("2", "0.5", "-1.5", "0.25", "3")]
    S = series_sqrt(Poly.of(*p), 4)
    q1 = S[1] / S[0]
    q2 = S[2] / S[0]
    assert close_to(q1, p[1] / (2 * p[0]))
    assert close_to(q2, p[2] / (2 * p[0]) - p[1] ** 2 / (8 * p[0] ** 2))


def test_series_sqrt_rejects_root_at_centre():
    with pytest.raises(SqrtAtRoot):
        series_sqrt(Poly.of(0, 1, 0, 0, 1), 6)


def test_poly_roots_examples():
    r = poly_roots(Poly.of(-1, 0, 1))
    assert sorted(float(z.real) for z in r) == [-1.0, 1.0]
    w = mp.expjpi(mp.mpf(2) / 3)
    r = poly_roots(Poly.of(1, 1, 1))
    assert any(close_to(z, w) for z in r)
    assert any(close_to(z, mp.conj(w)) for z in r)
    c = 2 * mp.sqrt(2) - 2
    r = poly_roots(Poly.of(c, c))
    assert len(r) == 1 and close_to(r[0], -1)


def test_poly_roots_constant():
    with pytest.raises(DegreeZero):
        poly_roots(Poly.of(3))
    with pytest.raises(DegreeZero):
        poly_roots(Poly.of(3, mp.mpf(10) ** -200))


@given(st.lists(points(), min_size=2, max_size=5), points())
def test_poly_roots_rebuild(roots, lead):
    spread = all(abs(a - b) > mp.mpf("0.1") for i, a in enumerate(roots) for b in roots[i + 1 :])
    assume(spread)
    B = Poly.of(lead)
    for r in roots:
        B = B * Poly.linear_factor(r)
    found = poly_roots(B)
    assert len(found) == len(roots)
    rebuilt = Poly.of(lead)
    for r in found:
        rebuilt = rebuilt * Poly.linear_factor(r)
    assert poly_close(rebuilt, B)


def test_canonical_order_is_magnitude_then_phase():
    vals = [mp.mpc(-2), mp.mpc(0, 1), mp.mpc(1), mp.mpc(2)]
    ordered = sort_canonical(vals)
    assert ordered == [mp.mpc(1), mp.mpc(0, 1), mp.mpc(2), mp.mpc(-2)]


def test_hh_series_constant_term():
    X = Poly.of(1, 0, 0, 0, 1)
    r2 = mp.sqrt(2)
    assert close_to(hh_series(X, 1, r2, 6)[0], r2 - 1)
    assert close_to(hh_series(X, -1, r2, 6)[0], 1 - r2)


def test_hh_series_rational_case():
    # X = (1 + s)^2: (1 + s - sqrtY) / (s - t) with sqrtY = 1 + t is exactly 1
    X = Poly.of(1, 2, 1)
    S = hh_series(X, 2, 3, 6)
    assert poly_close(S.to_poly(), Poly.of(1))


def test_hh_series_rejects_t_zero():
    with pytest.raises(TAtZero):
        hh_series(Poly.of(1, 0, 0, 0, 1), 0, 1, 6)


@pytest.mark.parametrize(
    "text,value",
    [
        ("1.5", ("1.5", "0")),
        ("2-3i", ("2", "-3")),
        ("-i", ("0", "-1")),
        ("0.25j", ("0", "0.25")),
        ("1e-3+2i", ("1e-3", "2")),
    ],
)
def test_parse_scalar(text, value):
    assert close_to(parse_scalar(text), mp.mpc(*value))


@pytest.mark.parametrize("text", ["", "abc", "1+xi"])
def test_parse_scalar_malformed(text):
    with pytest.raises(MalformedInput):
        parse_scalar(text)


def test_format_scalar_reparses():
    z = mp.mpc("0.125", "-2.5")
    assert format_scalar(z).endswith("i")
    assert close_to(parse_scalar(format_scalar(z)), z)
    assert "i" not in format_scalar(mp.mpc(3))


def test_degree_is_relative():
    assert Poly.of(1, 2, mp.mpf(10) ** -100).degree() == 1
    assert Poly.of(0, 0).degree() == -1
    assert is_zero(mp.mpf(10) ** -100)


def test_divide_linear():
    q, rem = Poly.of(-1, 0, 1).divide_linear(1)
    assert poly_close(q, Poly.of(1, 1))
    assert rem == 0


def test_sylvester_resultant_linear():
    res = sylvester_resultant(Poly.linear_factor(3), Poly.linear_factor(5))
    assert close_to(res, -2)


def test_interpolate_recovers_poly():
    P = Poly.of(1, -2, 0, 3)
    xs = [mp.mpf(k) for k in range(4)]
    assert poly_close(interpolate(xs, [P(x) for x in xs]), P, mp.ldexp(1, -100))


def test_cluster_and_multiplicities():
    tiny = mp.mpf(10) ** -70
    assert len(cluster_distinct([1, 1 + tiny, 2])) == 2
    assert root_multiplicities([mp.mpc(1), mp.mpc(1) + tiny, mp.mpc(2)]) == [2, 2, 1]
