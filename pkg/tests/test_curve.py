from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp

from hh_cfrac.arith import Poly
from hh_cfrac.curve import (
    Curve,
    CurvePoint,
    GrowthLevel,
    commuting_residual,
    divisor_of,
    dynamics_step,
    growth_profile,
    hop,
    index,
    index_limit_oracle,
    index_report,
    lambda_of,
    loglog_slope,
    morphism,
    ramification,
    tau_basic,
    tau_gamma,
)
from hh_cfrac.errors import BranchValue, DenominatorZero, MalformedInput, TAtZero
from strategies import close_to, generic_curve, points

QUARTIC = Poly.of(1, 0, 0, 0, 1)


def test_divisor_over_quartic_value():
    D = divisor_of(Curve.of(QUARTIC), mp.sqrt(2) - 1)
    assert len(D) == 2
    xs = sorted(float(p.x.real) for p in D.points)
    assert xs == pytest.approx([-1.0, 1.0])
    assert all(close_to(p.z, mp.sqrt(2)) for p in D.points)
    assert [float(p.x.real) for p in D.sorted_points()] == pytest.approx([-1.0, 1.0])


def test_lift_and_morphism_are_inverse():
    curve = Curve.of(generic_curve(2))
    t, lam = mp.mpc("0.6", "-0.4"), mp.mpc("1.5", "0.2")
    Q = morphism(curve, curve.lift(t, lam))
    assert close_to(Q.t, t)
    assert close_to(Q.lam, lam)


@pytest.mark.parametrize("genus", [1, 2, 3])
@given(x=points(), branch=st.sampled_from([1, -1]))
def test_involutions_commute(genus, x, branch):
    curve = Curve.of(generic_curve(genus))
    assert commuting_residual(curve, curve.point(x, branch)) < 2.0 ** -100


def test_basic_involution_swaps_lambda_pair():
    curve = Curve.of(QUARTIC)
    P = CurvePoint(mp.mpc(1), mp.sqrt(2))
    Q = tau_basic(curve, morphism(curve, P))
    assert close_to(Q.lam, -1 - mp.sqrt(2))
    assert close_to(lambda_of(curve, tau_gamma(P)), Q.lam)


def test_lambda_undefined_over_zero():
    curve = Curve.of(QUARTIC)
    with pytest.raises(TAtZero):
        lambda_of(curve, CurvePoint(mp.mpc(0), mp.mpc(1)))


def test_branch_value_has_no_divisor():
    with pytest.raises(BranchValue):
        divisor_of(Curve.of(QUARTIC), 0)


@pytest.mark.parametrize(
    "X,genus",
    [
        (QUARTIC, 1),
        (generic_curve(1), 1),
        (generic_curve(2), 2),
        (generic_curve(3), 3),
    ],
)
def test_ramification_counts(X, genus):
    ram = ramification(Curve.of(X))
    assert ram.deg_r_e == 2 * genus + 2
    assert ram.deg_r_or == 4 * genus
    summary = ram.summary(genus)
    assert summary["consistent"]
    assert summary["genus_from_s"] == genus == summary["genus_from_lambda"]


@pytest.mark.parametrize("genus", [1, 2, 3])
def test_lambda_branching_at_infinity_is_genus_for_generic_x(genus):
    ram = ramification(Curve.of(generic_curve(genus)))
    assert ram.or_at_infinity == genus
    assert len(ram.r_or) == 3 * genus


@pytest.mark.parametrize("genus", [1, 2])
def test_ramification_with_vanishing_leading_coefficient(genus):
    X = generic_curve(genus)
    truncated = Poly(X.coeffs[:-1] + (mp.mpc(0),))
    ram = ramification(Curve.of(truncated, genus))
    assert ram.e_at_infinity == 1
    assert ram.or_at_infinity >= genus
    assert ram.deg_r_or == 4 * genus
    assert ram.summary(genus)["consistent"]


def test_branch_points_of_s_projection_are_roots_of_x():
    X = generic_curve(1)
    ram = ramification(Curve.of(X))
    for r in ram.r_e:
        assert abs(X(r)) < 1e-50


def test_dynamics_step_on_quartic():
    curve = Curve.of(QUARTIC)
    D = divisor_of(curve, mp.sqrt(2) - 1)
    images = dynamics_step(curve, D)
    assert len(images) == 2
    for E in images:
        assert close_to(E.z, -1 - mp.sqrt(2))
    assert close_to(hop(curve, D.points[0]), -1 - mp.sqrt(2))


def test_growth_is_constant_on_the_periodic_quartic_orbit():
    prof = growth_profile(Curve.of(QUARTIC), mp.sqrt(2) - 1, 6)
    assert [lv.distinct_count for lv in prof.levels] == [1] * 6
    assert [lv.raw_count for lv in prof.levels] == [2] * 6
    assert prof.dropped == 0
    assert not prof.truncated


def test_growth_genus_one_is_at_most_linear():
    prof = growth_profile(Curve.of(generic_curve(1)), mp.mpc("0.4", "0.3"), 8)
    for lv in prof.levels:
        assert lv.distinct_count <= lv.level + 1


def test_growth_genus_two_stays_below_exponential():
    prof = growth_profile(Curve.of(generic_curve(2)), mp.mpc("0.4", "0.3"), 6)
    for lv in prof.levels:
        assert lv.distinct_count <= 2 ** (lv.level + 1) - 1
    assert prof.levels[-1].distinct_count < 0.25 * 3**6


def test_growth_genus_two_depth_eight():
    prof = growth_profile(Curve.of(generic_curve(2)), mp.mpc("0.4", "0.3"), 8)
    assert [lv.level for lv in prof.levels] == list(range(1, 9))
    for lv in prof.levels:
        assert lv.distinct_count <= 2 ** (lv.level + 1) - 1
    assert prof.levels[-1].distinct_count < 0.25 * 3**8
    assert not prof.truncated
    assert prof.slope is not None and prof.slope > 0


def test_growth_cap_truncates():
    prof = growth_profile(Curve.of(generic_curve(2)), mp.mpc("0.4", "0.3"), 3, max_values=2)
    assert prof.truncated
    assert prof.levels[-1].raw_count <= 3 * 2


def test_growth_rejects_zero_depth():
    with pytest.raises(MalformedInput):
        growth_profile(Curve.of(QUARTIC), 1, 0)


def test_growth_csv():
    prof = growth_profile(Curve.of(QUARTIC), mp.sqrt(2) - 1, 2)
    assert prof.to_csv().splitlines() == ["level,raw_count,distinct_count", "1,2,1", "2,2,1"]


def test_loglog_slope_of_linear_counts():
    levels = [GrowthLevel(level=k, raw_count=2 * k, distinct_count=k) for k in range(1, 6)]
    assert loglog_slope(levels) == pytest.approx(1.0)
    assert loglog_slope(levels[:1]) is None


def test_index_quartic():
    curve = Curve.of(QUARTIC)
    P = CurvePoint(mp.mpc(1), mp.sqrt(2))
    assert close_to(index(curve, P), 2 * mp.sqrt(2) - 3)
    assert abs(index_limit_oracle(curve, P) - (2 * mp.sqrt(2) - 3)) < 1e-10
    report = index_report(curve, P)
    assert report.agrees
    assert report.findings == []


def test_index_with_non_unit_constant_term():
    curve = Curve.of(Poly.of(2, "0.3", "-0.7", "0.45", "1.3"))
    report = index_report(curve, curve.point("0.8"))
    assert report.agrees
    assert report.relative_difference < 1e-8
    assert report.findings


def test_index_needs_finite_infinity_value():
    curve = Curve.of(Poly.of(1, 1, 0, 1, 0))
    with pytest.raises(DenominatorZero):
        index(curve, curve.point(2))
