"""Shared hypothesis strategies and numeric comparisons for the test-suite."""

from __future__ import annotations

from hypothesis import strategies as st
from mpmath import mp

from hh_cfrac.arith import Poly
from hh_cfrac.bal import check_not_square
from hh_cfrac.errors import PerfectSquare


def is_square_free(X: Poly, genus: int) -> bool:
    try:
        check_not_square(X, genus)
    except PerfectSquare:
        return False
    return True


@st.composite
def curves(draw, genus: int) -> Poly:
    """Integer X of degree 2g+2 with p0 and the leading coefficient nonzero."""
    nonzero = st.integers(-6, 6).filter(bool)
    p0 = draw(nonzero)
    middle = draw(st.lists(st.integers(-6, 6), min_size=2 * genus + 1, max_size=2 * genus + 1))
    lead = draw(nonzero)
    return Poly.of(p0, *middle, lead)


@st.composite
def unit_box(draw, floor: float = 0.0):
    """Complex scalar with real and imaginary parts in [-1, 1], modulus at least ``floor``."""
    re = draw(st.integers(-100, 100)) / 100
    im = draw(st.integers(-100, 100)) / 100
    z = mp.mpc(re, im)
    if abs(z) < floor:
        z += mp.mpc(floor, floor)
    return z


@st.composite
def complex_curves(draw, genus: int) -> Poly:
    """X of degree 2g+2 with coefficients in the complex unit box, p0 and the lead kept away from 0."""
    p0 = draw(unit_box(0.2))
    middle = draw(st.lists(unit_box(), min_size=2 * genus + 1, max_size=2 * genus + 1))
    lead = draw(unit_box(0.2))
    return Poly((p0, *middle, lead))


@st.composite
def points(draw):
    """Complex point with modulus between 0.3 and 3."""
    re = draw(st.integers(-20, 20)) / 10
    im = draw(st.integers(-20, 20)) / 10
    z = mp.mpc(re, im)
    if abs(z) < mp.mpf("0.3"):
        z += mp.mpc("0.7", "0.4")
    return z


def tol():
    return mp.ldexp(mp.mpf(1), -(mp.prec // 2))


def close_to(a, b, rel=None) -> bool:
    rel = tol() if rel is None else rel
    a, b = mp.mpc(a), mp.mpc(b)
    return abs(a - b) <= rel * max(mp.mpf(1), abs(a), abs(b))


def poly_close(p: Poly, q: Poly, rel=None) -> bool:
    rel = tol() if rel is None else rel
    n = max(len(p), len(q))
    scale = max(mp.mpf(1), p.norm(), q.norm())
    return all(abs(p[k] - q[k]) <= rel * scale for k in range(n))


def generic_curve(genus: int) -> Poly:
    """Fixed X without extra symmetries, used where 1 + s^(2g+2) degenerates."""
    coeffs = {
        1: ("1", "0.3", "-0.7", "0.45", "1.3"),
        2: ("1", "0.3", "-0.7", "0.45", "1.3", "-0.25", "0.8"),
        3: ("1", "0.3", "-0.7", "0.45", "1.3", "-0.25", "0.8", "0.15", "1.1"),
    }[genus]
    return Poly.of(*coeffs)
