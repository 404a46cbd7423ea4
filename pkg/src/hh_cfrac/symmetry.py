"""Periodicity and even/odd symmetry of expansion paths.

Index conventions along a path with states 0..d (lambda_{-1} is the other root
of Q_X(., t_0)):

  * even centre alpha_n:  lambda_n = lambda_{n-1}, mirrored by
    t_{n+k} = t_{n-k} and lambda_{n+k} = lambda_{n-k-1};
  * odd centre beta_m:    t_{m-1} = t_m, mirrored by
    t_{m-1-k} = t_{m+k} and lambda_{m+k} = lambda_{m-2-k};
  * period p:             t_{n+p} = t_n, lambda_{n+p} = lambda_n and equal
    alpha/beta coefficient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from mpmath import mp
from pydantic import BaseModel, Field

from .arith import Poly, format_scalar, is_zero, loose_tau, poly_roots, tight_tau
from .bal import HalphenElement, element_from_point
from .cfengine import REGULAR, T_ZERO, CFState
from .errors import EliminationDegenerate
from .log_utils import get_logger
from .spectral import QxPoly, lambda_discriminant, lambda_pair_at, qg_poly, qx_build

log = get_logger(__name__)


class SymmetryReport(BaseModel):
    depth: int
    periodic: Optional[int] = None
    even_centers: List[int] = Field(default_factory=list)
    odd_centers: List[int] = Field(default_factory=list)
    irregular_odd_centers: List[int] = Field(default_factory=list)
    match_tolerance: float
    findings: List[str] = Field(default_factory=list)


def _same(a, b, tol) -> bool:
    return abs(a - b) <= tol * max(mp.mpf(1), abs(a), abs(b))


def _same_poly(p: Optional[Poly], q: Optional[Poly], tol) -> bool:
    if p is None or q is None:
        return p is None and q is None
    n = max(len(p), len(q))
    scale = max(mp.mpf(1), p.norm(), q.norm())
    return all(abs(p[k] - q[k]) <= tol * scale for k in range(n))


def lambda_before(h: HalphenElement, root: CFState, qx: Optional[QxPoly] = None):
    """lambda_{-1}: the root of Q_X(., t_0) other than lambda_0."""
    qx = qx or qx_build(h.X, h.genus)
    pair = lambda_pair_at(qx, root.t)
    return max(pair, key=lambda r: abs(r - root.lam))


def detect(
    h: HalphenElement,
    states: Sequence[CFState],
    tol=None,
    lam_prev_root=None,
) -> SymmetryReport:
    tol = loose_tau() if tol is None else tol
    regular = []
    zero_at: Optional[int] = None
    for st in states:
        if st.kind == T_ZERO:
            zero_at = st.index
            break
        regular.append(st)
    d = len(regular) - 1
    report = SymmetryReport(depth=d, match_tolerance=float(tol))
    if d < 0:
        return report

    t = {st.index: st.t for st in regular}
    lam = {st.index: st.lam for st in regular if st.lam is not None}
    base = regular[0].index
    if lam_prev_root is None and regular[0].kind == REGULAR and regular[0].irregular is None:
        lam_prev_root = lambda_before(h, regular[0])
    if lam_prev_root is not None:
        lam[base - 1] = lam_prev_root
    lo, hi = base, base + d

    for n in range(lo, hi + 1):
        if n - 1 not in lam or n not in lam or not _same(lam[n], lam[n - 1], tol):
            continue
        ok = True
        for k in range(1, hi - n + 1):
            if n - k >= lo and not _same(t[n + k], t[n - k], tol):
                ok = False
            if n - k - 1 in lam and n + k in lam and not _same(lam[n + k], lam[n - k - 1], tol):
                ok = False
        if ok:
            report.even_centers.append(n)
        else:
            report.findings.append(f"lambda_{n} = lambda_{n - 1} but the mirror does not hold")

    for m in range(lo + 1, hi + 1):
        if not _same(t[m - 1], t[m], tol):
            continue
        ok = True
        for k in range(0, hi - m + 1):
            if m - 1 - k >= lo and not _same(t[m - 1 - k], t[m + k], tol):
                ok = False
            if m - 2 - k in lam and m + k in lam and not _same(lam[m + k], lam[m - 2 - k], tol):
                ok = False
        if ok:
            report.odd_centers.append(m)
        else:
            report.findings.append(f"t_{m - 1} = t_{m} but the mirror does not hold")

    if zero_at is not None:
        # an interior t_h = 0 makes the fraction odd symmetric about beta_{h+1}
        report.irregular_odd_centers.append(zero_at + 1)

    by_index = {st.index: st for st in regular}
    for p in range(1, d):
        ok = True
        for n in range(lo, hi - p + 1):
            a, b = by_index[n], by_index[n + p]
            if not (_same(a.t, b.t, tol) and _same(a.lam, b.lam, tol)):
                ok = False
                break
            if n > lo and not (_same_poly(a.alpha, b.alpha, tol) and _same_poly(a.beta, b.beta, tol)):
                ok = False
                break
        if ok:
            report.periodic = p
            break
    log.debug(
        "symmetry scan",
        code="Symmetry",
        depth=d,
        period=report.periodic,
        even=report.even_centers,
        odd=report.odd_centers,
    )
    return report


def even_criterion(X: Poly, y, tol=None) -> bool:
    """True iff X(y) vanishes relative to the coefficient size."""
    tol = tight_tau() if tol is None else tol
    return bool(abs(X(mp.mpc(y))) <= tol * X.norm())


# ---------------------------------------------------------------------------
# Odd-symmetry locus: Q_X = 0 = dQ_X/ds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocusPoint:
    s: object
    lam: object
    residual_q: float
    residual_ds: float
    multiplicity: int = 1


@dataclass
class OddLocus:
    points: List[LocusPoint]
    s_eliminant: Poly
    s_degree: int
    # deg in lambda of disc_s Q_X(lambda, .): the locus lambdas are its roots
    discriminant_degree: int
    extras: Dict[str, object] = field(default_factory=dict)


def s_eliminant(qx: QxPoly) -> Poly:
    """Res_lambda(Q_X, dQ_X/ds) with the factor p0 s^g removed.

    With Q = a lam^2 + b lam + c and a = -p0 s^(g+1) the resultant of the two
    quadratics is p0 s^g [p0 s^g (s c' - (g+1) c)^2 + (s b' - (g+1) b)(b c' - b' c)].
    """
    g = qx.genus
    b, c = qx.c1, qx.c0
    db, dc = b.deriv(), c.deriv()
    u = dc.shift_up(1) - c * (g + 1)
    v = db.shift_up(1) - b * (g + 1)
    w = b * dc - db * c
    return (u * u * qx.p0).shift_up(g) + v * w


def odd_symmetry_locus(X: Poly, genus: Optional[int] = None) -> OddLocus:
    qx = qx_build(X, genus)
    g = qx.genus
    E = s_eliminant(qx)
    deg = E.degree()
    if deg < 1:
        raise EliminationDegenerate("s-eliminant vanishes identically or is constant")
    roots = poly_roots(E.trimmed())
    points: List[LocusPoint] = []
    scale = max(mp.mpf(1), qx.norm())
    for s in roots:
        quad = qx.in_lambda(s)
        dq = qx.ds_in_lambda(s)
        if is_zero(quad[2], scale, loose_tau()):
            if is_zero(quad[1], scale, loose_tau()):
                raise EliminationDegenerate("Q_X(., s) is constant at a locus root", s=format_scalar(s, 12))
            cands = [-quad[0] / quad[1]]
        else:
            cands = poly_roots(quad)
        lam = min(cands, key=lambda L: abs(dq(L)))
        sc = scale * max(mp.mpf(1), abs(s)) ** (g + 1) * max(mp.mpf(1), abs(lam)) ** 2
        points.append(LocusPoint(s, lam, float(abs(qx(lam, s)) / sc), float(abs(dq(lam)) / sc)))
    disc = lambda_discriminant(qx)
    return OddLocus(points, E, deg, disc.degree())


def classify_contact(qx: QxPoly, point: LocusPoint, t_current=None) -> str:
    """odd | gluing | irregular | undetermined.

    A double root of Q_X(lambda*, .) is an odd-symmetric turn when it is the
    current t_i (so t_{i+1} = t_i); otherwise two roots of B^(i) coincide.
    """
    if abs(point.s) < loose_tau():
        return "irregular"
    if qx.genus == 1:
        return "odd"
    if t_current is None:
        return "undetermined"
    return "odd" if _same(point.s, t_current, loose_tau()) else "gluing"


def seed_odd(X: Poly, point: LocusPoint, genus: Optional[int] = None) -> HalphenElement:
    """Element whose first step turns back: t_0 = s*, lambda_0 = lambda*."""
    g = genus if genus is not None else X.nominal_degree // 2 - 1
    Qg = qg_poly(X, g)
    sp0 = mp.sqrt(X[0])
    sqrt_y = sp0 * (Qg(point.s) + point.lam * point.s ** (g + 1))
    return element_from_point(X, point.s, sqrt_y, genus=g)


# ---------------------------------------------------------------------------
# Period arithmetic for several symmetries
# ---------------------------------------------------------------------------


class ClauseCheck(BaseModel):
    clause: str
    centers: List[int]
    expected: int
    observed: Optional[int]
    applicable: bool
    holds: bool


class SymmetryAlgebraReport(BaseModel):
    checks: List[ClauseCheck] = Field(default_factory=list)
    passed: bool = True


def _closest_pair(xs: List[int]):
    xs = sorted(xs)
    best = None
    for a, b in zip(xs, xs[1:]):
        if best is None or b - a < best[1] - best[0]:
            best = (a, b)
    return best


def symmetry_algebra_check(report: SymmetryReport) -> SymmetryAlgebraReport:
    """Period arithmetic implied by double symmetry and by period plus symmetry."""
    out = SymmetryAlgebraReport()
    d = report.depth
    p = report.periodic
    odd = sorted(set(report.odd_centers) | set(report.irregular_odd_centers))
    even = sorted(report.even_centers)

    def period_check(clause: str, centers: List[int], expected: int) -> None:
        # the period is only observable once a full repetition fits in the path
        applicable = expected + 1 <= d
        holds = (p is not None and expected % p == 0) if applicable else True
        out.checks.append(
            ClauseCheck(clause=clause, centers=centers, expected=expected, observed=p, applicable=applicable, holds=holds)
        )

    pair = _closest_pair(even)
    if pair:
        period_check("double_even", list(pair), 2 * (pair[1] - pair[0]))
    pair = _closest_pair(odd)
    if pair:
        period_check("double_odd", list(pair), 2 * (pair[1] - pair[0]))
    if even and odd:
        n, m = min(((n, m) for n in even for m in odd), key=lambda nm: abs(nm[0] - nm[1] + 0.5))
        expected = 2 * (n - m) + 1 if m <= n else 2 * (m - n) - 1
        period_check("even_odd", [n, m], expected)

    if p is not None:
        r, rem = divmod(p, 2)
        for n in even:
            if rem == 0:
                target, pool, clause = n + r, even, "period_even"
            else:
                target, pool, clause = n + r + 1, odd, "odd_period_even"
            applicable = target <= d
            out.checks.append(
                ClauseCheck(
                    clause=clause,
                    centers=[n, target],
                    expected=target,
                    observed=target if target in pool else None,
                    applicable=applicable,
                    holds=(target in pool) if applicable else True,
                )
            )
        if rem == 0:
            for m in report.odd_centers:
                target = m + r
                applicable = target <= d
                out.checks.append(
                    ClauseCheck(
                        clause="period_odd",
                        centers=[m, target],
                        expected=target,
                        observed=target if target in report.odd_centers else None,
                        applicable=applicable,
                        holds=(target in report.odd_centers) if applicable else True,
                    )
                )
    out.passed = all(c.holds for c in out.checks)
    return out
