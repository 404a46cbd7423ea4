"""The basic curve Q_X(lambda, s) = 0 and the map to it from z^2 = X(x).

    lambda(x, z) = (z / sqrt(p0) - Q_g(x)) / x^(g+1)

The hyperelliptic involution (x, z) -> (x, -z) is carried to the swap of the
two lambda-roots of Q_X(., t). Fibres of lambda are divisors of degree g+1 and
hopping through the involution gives the multi-valued divisor dynamics.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import mp
from pydantic import BaseModel, Field

from .arith import (
    Number,
    Poly,
    cluster_distinct,
    format_scalar,
    is_zero,
    loose_tau,
    poly_roots,
    root_multiplicities,
    tau,
    to_scalar,
)
from .bal import genus_of
from .config import settings
from .errors import BranchValue, DegenerateDiscriminant, DenominatorZero, HHError, MalformedInput, TAtZero
from .log_utils import get_logger
from .spectral import QxPoly, lambda_discriminant, qg_poly, qx_build, t_roots_at

log = get_logger(__name__)


@dataclass(frozen=True)
class CurvePoint:
    """A point (x, z) of z^2 = X(x)."""

    x: object
    z: object


@dataclass(frozen=True)
class BasicPoint:
    """A point (t, lambda) of Q_X(lambda, t) = 0."""

    t: object
    lam: object


@dataclass(frozen=True)
class Curve:
    X: Poly
    genus: int
    qx: QxPoly
    Qg: Poly
    sqrt_p0: object

    @classmethod
    def of(cls, X: Poly, genus: Optional[int] = None) -> "Curve":
        g = genus_of(X) if genus is None else genus
        return cls(X, g, qx_build(X, g), qg_poly(X, g), mp.sqrt(X[0]))

    @property
    def lead(self):
        return self.X[2 * self.genus + 2]

    def point(self, x: Number, branch: int = 1) -> CurvePoint:
        x = to_scalar(x)
        return CurvePoint(x, branch * mp.sqrt(self.X(x)))

    def lift(self, t, lam) -> CurvePoint:
        """The point of the lambda-fibre over t: z = sqrt(p0) (Q_g(t) + lambda t^(g+1))."""
        return CurvePoint(t, self.sqrt_p0 * (self.Qg(t) + lam * t ** (self.genus + 1)))


@dataclass(frozen=True)
class Divisor:
    """lambda^(-1)(z): the g+1 points sharing the lambda-value z."""

    z: object
    points: Tuple[CurvePoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def sorted_points(self) -> List[CurvePoint]:
        return sorted(self.points, key=lambda p: (float(mp.re(p.x)), float(mp.im(p.x))))


def lambda_of(curve: Curve, P: CurvePoint):
    if abs(P.x) < loose_tau():
        raise TAtZero("lambda has a pole or an indeterminate value over x = 0", z=format_scalar(P.z, 12))
    return (P.z / curve.sqrt_p0 - curve.Qg(P.x)) / P.x ** (curve.genus + 1)


def morphism(curve: Curve, P: CurvePoint) -> BasicPoint:
    return BasicPoint(P.x, lambda_of(curve, P))


def tau_gamma(P: CurvePoint) -> CurvePoint:
    return CurvePoint(P.x, -P.z)


def tau_basic(curve: Curve, Q: BasicPoint) -> BasicPoint:
    """The other root of Q_X(., t): lambda + lambda' = -c1(t)/c2(t)."""
    qx = curve.qx
    return BasicPoint(Q.t, -qx.c1(Q.t) / qx.c2(Q.t) - Q.lam)


def commuting_residual(curve: Curve, P: CurvePoint) -> float:
    """|f(tau P) - tau f(P)| together with |Q_X| at both images, relative."""
    fp = morphism(curve, P)
    left = morphism(curve, tau_gamma(P))
    right = tau_basic(curve, fp)
    scale = max(mp.mpf(1), abs(left.lam), abs(fp.lam))
    qscale = max(mp.mpf(1), curve.qx.norm()) * max(mp.mpf(1), abs(P.x)) ** (curve.genus + 1) * scale**2
    return float(
        max(
            abs(left.lam - right.lam) / scale,
            abs(curve.qx(fp.lam, fp.t)) / qscale,
            abs(curve.qx(left.lam, left.t)) / qscale,
        )
    )


# ---------------------------------------------------------------------------
# Ramification
# ---------------------------------------------------------------------------


@dataclass
class Ramification:
    r_e: List
    r_or: List
    e_at_infinity: int
    or_at_infinity: int
    r_or_multiplicities: List[int] = field(default_factory=list)

    @property
    def deg_r_e(self) -> int:
        return len(self.r_e) + self.e_at_infinity

    @property
    def deg_r_or(self) -> int:
        return len(self.r_or) + self.or_at_infinity

    def genus_from_s(self) -> Optional[int]:
        # degree-2 projection: 2 - 2G = 4 - deg R_e
        n = self.deg_r_e - 2
        return n // 2 if n % 2 == 0 else None

    def genus_from_lambda(self, g: int) -> Optional[int]:
        # degree-(g+1) projection: 2 - 2G = 2(g+1) - deg R_or
        n = self.deg_r_or - 2 * g
        return n // 2 if n % 2 == 0 else None

    def summary(self, g: int) -> Dict[str, object]:
        return {
            "R_e": [format_scalar(r) for r in self.r_e],
            "R_or": [format_scalar(r) for r in self.r_or],
            "R_e_at_infinity": self.e_at_infinity,
            "R_or_at_infinity": self.or_at_infinity,
            "deg_R_e": self.deg_r_e,
            "deg_R_or": self.deg_r_or,
            "genus_from_s": self.genus_from_s(),
            "genus_from_lambda": self.genus_from_lambda(g),
            "consistent": self.genus_from_s() == g == self.genus_from_lambda(g),
        }


def ramification(curve: Curve) -> Ramification:
    """Branch points of the s-projection (disc in lambda) and of the lambda-projection (disc in s).

    The lambda-discriminant is 4 p0 X(s). The s-discriminant has formal degree
    4g in lambda; with mu = 1/lambda, mu^(4g) disc_s(1/mu) vanishes at mu = 0 to
    order 4g - deg disc_s, which is the branching over lambda = infinity.
    """
    g = curve.genus
    qx = curve.qx
    disc_l = (qx.c1 * qx.c1 - qx.c0 * qx.c2 * 4).trimmed()
    deg_e = disc_l.degree()
    if deg_e < 1:
        raise DegenerateDiscriminant("discriminant in lambda is constant")
    r_e = poly_roots(disc_l)
    e_inf = (2 * g + 2 - deg_e) % 2

    disc_s = lambda_discriminant(qx)
    deg_or = disc_s.degree()
    if deg_or < 1:
        raise DegenerateDiscriminant("discriminant in s is constant in lambda")
    r_or = poly_roots(disc_s)
    mult = root_multiplicities(r_or)
    out = Ramification(r_e, r_or, e_inf, 4 * g - deg_or, mult)
    if not (out.deg_r_e == 2 * g + 2 and out.deg_r_or == 4 * g):
        log.warning(
            "ramification counts off the generic values",
            code="Ramification",
            deg_R_e=out.deg_r_e,
            deg_R_or=out.deg_r_or,
        )
    return out


# ---------------------------------------------------------------------------
# Divisors and dynamics
# ---------------------------------------------------------------------------


def _fibre(curve: Curve, z) -> List:
    return t_roots_at(curve.qx, z)


def divisor_of(curve: Curve, z: Number) -> Divisor:
    z = to_scalar(z)
    roots = _fibre(curve, z)
    mult = root_multiplicities(roots)
    if max(mult) > 1:
        raise BranchValue("z is a branch value of lambda", z=format_scalar(z, 12), multiplicity=max(mult))
    return Divisor(z, tuple(curve.lift(t, z) for t in roots))


def hop(curve: Curve, P: CurvePoint):
    """lambda(tau P)"""
    return lambda_of(curve, tau_gamma(P))


def dynamics_step(curve: Curve, D: Divisor) -> List[Divisor]:
    return [divisor_of(curve, hop(curve, P)) for P in D.points]


class GrowthLevel(BaseModel):
    level: int
    raw_count: int
    distinct_count: int


class GrowthProfile(BaseModel):
    genus: int
    start: str
    tolerance: float
    levels: List[GrowthLevel] = Field(default_factory=list)
    slope: Optional[float] = None
    truncated: bool = False
    dropped: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["level", "raw_count", "distinct_count"], lineterminator="\n")
        writer.writeheader()
        for lv in self.levels:
            writer.writerow(lv.model_dump())
        return buf.getvalue()


def _children(curve: Curve, lam) -> List:
    """lambda(tau P) for every P over lam, branch values included."""
    g = curve.genus
    out = []
    for t in _fibre(curve, lam):
        z = curve.sqrt_p0 * (curve.Qg(t) + lam * t ** (g + 1))
        out.append(hop(curve, CurvePoint(t, z)))
    return out


def loglog_slope(levels: Sequence[GrowthLevel]) -> Optional[float]:
    pts = [(mp.log(lv.level), mp.log(lv.distinct_count)) for lv in levels if lv.level >= 1 and lv.distinct_count > 0]
    if len(pts) < 2:
        return None
    n = len(pts)
    mx = mp.fsum(p[0] for p in pts) / n
    my = mp.fsum(p[1] for p in pts) / n
    sxx = mp.fsum((p[0] - mx) ** 2 for p in pts)
    sxy = mp.fsum((p[0] - mx) * (p[1] - my) for p in pts)
    return float(sxy / sxx)


def growth_profile(
    curve: Curve,
    start: Number,
    depth: int,
    tol=None,
    max_values: Optional[int] = None,
) -> GrowthProfile:
    """Distinct lambda-values reached level by level from D(start).

    Levels are expanded in order and deduplicated by ``cluster_distinct``; a
    value whose fibre hits x = 0 or x = infinity is dropped and counted.
    """
    if depth < 1:
        raise MalformedInput("depth must be >= 1")
    tol = loose_tau() if tol is None else tol
    cap = settings.GROWTH_MAX_VALUES if max_values is None else max_values
    start = to_scalar(start)
    prof = GrowthProfile(genus=curve.genus, start=format_scalar(start), tolerance=float(tol))
    current = [start]
    for level in range(1, depth + 1):
        raw: List = []
        for lam in current:
            try:
                raw.extend(_children(curve, lam))
            except HHError as exc:
                prof.dropped += 1
                log.warning("dropped lambda-value", code=exc.code, level=level, lam=format_scalar(lam, 12))
        current = cluster_distinct(raw, tol)
        prof.levels.append(GrowthLevel(level=level, raw_count=len(raw), distinct_count=len(current)))
        log.debug("growth level", code="Growth", level=level, raw=len(raw), distinct=len(current))
        if len(current) > cap:
            current = current[:cap]
            prof.truncated = True
            log.warning("growth level truncated", code="Growth", level=level, cap=cap)
    prof.slope = loglog_slope(prof.levels)
    return prof


# ---------------------------------------------------------------------------
# Index of a point
# ---------------------------------------------------------------------------


class IndexReport(BaseModel):
    closed_form: str
    printed_form: str
    limit: str
    relative_difference: float
    printed_relative_difference: float
    agrees: bool
    findings: List[str] = Field(default_factory=list)


def _infinity_value(curve: Curve):
    if is_zero(curve.lead, curve.X.norm()):
        raise DenominatorZero("p_{2g+2} vanishes; x = infinity is a branch point")
    return mp.sqrt(curve.lead) / curve.sqrt_p0


def _ratio_form(L, lam, lam_tau):
    d = lam_tau - lam
    den = L * L - L * d - lam * lam_tau
    if abs(den) <= tau() * max(mp.mpf(1), abs(L) ** 2, abs(lam * lam_tau)):
        raise DenominatorZero("index denominator vanishes")
    return 1 + 2 * L * d / den


def index(curve: Curve, P: CurvePoint):
    """I(P) = 1 + 2L(lambda(tau P) - lambda(P)) / (L^2 - L(lambda(tau P) - lambda(P)) - lambda(P) lambda(tau P)).

    L = sqrt(p_{2g+2}) / sqrt(p0) is the value of lambda at x = +infinity.
    """
    return _ratio_form(_infinity_value(curve), lambda_of(curve, P), hop(curve, P))


def index_printed(curve: Curve, P: CurvePoint):
    """The same expression with sqrt(p_{2g+2}) and p_{2g+2} in place of L and L^2."""
    sp = mp.sqrt(curve.lead)
    lam, lam_tau = lambda_of(curve, P), hop(curve, P)
    d = lam_tau - lam
    den = curve.lead - sp * d - lam * lam_tau
    if abs(den) <= tau() * max(mp.mpf(1), abs(curve.lead), abs(lam * lam_tau)):
        raise DenominatorZero("printed index denominator vanishes")
    return 1 + 2 * sp * d / den


def _cross_ratio_at(curve: Curve, x, lam1, lam2):
    g = curve.genus
    top = mp.sqrt(curve.lead)
    z = mp.sqrt(curve.X(x))
    if abs(-z / x ** (g + 1) - top) < abs(z / x ** (g + 1) - top):
        z = -z
    up = lambda_of(curve, CurvePoint(x, z))
    down = lambda_of(curve, CurvePoint(x, -z))
    return ((up - lam1) / (up - lam2)) / ((down - lam1) / (down - lam2))


def index_limit_oracle(curve: Curve, P: CurvePoint, xs: Sequence = (10**3, 10**4, 10**6)):
    """Relative-class index from its defining limit x -> +infinity.

    The ratio is sampled at the given abscissae and extrapolated to h = 1/x = 0
    through the interpolating polynomial in h.
    """
    lam1, lam2 = lambda_of(curve, P), hop(curve, P)
    hs = [1 / mp.mpf(x) for x in xs]
    fs = [_cross_ratio_at(curve, mp.mpf(x), lam1, lam2) for x in xs]
    total = mp.mpc(0)
    for i, (hi, fi) in enumerate(zip(hs, fs)):
        w = mp.mpf(1)
        for j, hj in enumerate(hs):
            if j != i:
                w *= (0 - hj) / (hi - hj)
        total += w * fi
    return total


def index_report(curve: Curve, P: CurvePoint, rtol: float = 1e-8) -> IndexReport:
    closed = index(curve, P)
    printed = index_printed(curve, P)
    limit = index_limit_oracle(curve, P)
    scale = max(mp.mpf(1), abs(limit))
    diff = abs(closed - limit) / scale
    pdiff = abs(printed - limit) / scale
    findings = []
    if pdiff > rtol:
        findings.append("printed index formula disagrees with the limit; it holds with p_{2g+2}/p0 in place of p_{2g+2}")
        log.warning("printed index formula mismatch", code="IndexPrinted", rel=float(pdiff))
    return IndexReport(
        closed_form=format_scalar(closed),
        printed_form=format_scalar(printed),
        limit=format_scalar(limit),
        relative_difference=float(diff),
        printed_relative_difference=float(pdiff),
        agrees=bool(diff <= rtol),
        findings=findings,
    )
