"""Irregular expansions: t = infinity, t = 0 and an expansion centre at infinity.

A point t is treated as zero below 2^(-P/4) and as infinite above 2^(P/4),
both relative to the coefficient scale.
"""

from __future__ import annotations

from dataclasses import replace
from typing import List, Optional, Tuple

from mpmath import mp
from pydantic import BaseModel, Field

from .arith import (
    Number,
    Poly,
    Series,
    close,
    format_scalar,
    hh_series,
    is_zero,
    loose_tau,
    power_sum_poly,
    series_sqrt,
    tau,
    to_scalar,
)
from .bal import BALTriplet, HalphenElement, check_not_square, element_from_point, genus_of
from .cfengine import T_ZERO, BranchTree, CFState, Policy, cf_step, expand_from, make_state, root_state
from .errors import IrregularRootInfinite, LeadingVanishes, PrecisionLoss, PreconditionViolated, SqrtAtRoot
from .log_utils import get_logger
from .spectral import qg_poly, qx_build, t_roots_at

log = get_logger(__name__)


def _checked_x(X: Poly, genus: Optional[int]) -> int:
    g = genus_of(X) if genus is None else genus
    if is_zero(X[0], X.norm()):
        raise SqrtAtRoot("X vanishes at the expansion centre; move epsilon")
    check_not_square(X, g)
    return g


def _exact_shift(R: Poly, k: int, scale, what: str) -> Poly:
    upper, lower = R.drop_low(k)
    if lower.norm() > tau() * scale:
        raise PrecisionLoss(f"{what}: low coefficients do not vanish", residual=float(lower.norm() / scale))
    return upper


# ---------------------------------------------------------------------------
# t = infinity
# ---------------------------------------------------------------------------


def t_infinity_state(X: Poly, genus: Optional[int] = None, top: Optional[Number] = None) -> Tuple[HalphenElement, CFState]:
    """Root of sqrt(X) - sqrt(p_{2g+2}) s^(g+1) = C + B s^(g+1)/(sqrt X + A), X - A^2 = B s^(g+1).

    ``top`` is A_{g+1}; either square root of p_{2g+2} gives a root state, the
    principal one by default.
    """
    g = _checked_x(X, genus)
    S = series_sqrt(X, g + 1)
    a_top = mp.sqrt(X[2 * g + 2]) if top is None else to_scalar(top)
    C = Poly(S.coeffs)
    A = Poly(S.coeffs + (a_top,))
    scale = max(X.norm(), A.norm() ** 2)
    B = _exact_shift(X - A * A, g + 1, scale, "t = infinity")
    if abs(B[g + 1]) > tau() * scale:
        raise PrecisionLoss("X - A^2 keeps its top coefficient")
    B = B.truncated(g + 1)
    h = HalphenElement(X, g, mp.mpc(0), mp.mpc(mp.inf), mp.mpc(mp.inf), mp.sqrt(X[0]))
    tri = BALTriplet(A, B, C, {"halpadd": float((X - A * A - B.shift_up(g + 1)).norm() / scale)})
    state = make_state(h, tri, 0, (), irregular="t_inf")
    log.debug("t = infinity root", code="TInf", deg_B=B.degree(), lam=format_scalar(state.lam, 12))
    return h, state


def expand_t_infinity(X: Poly, depth: int, policy: Policy = "all", genus: Optional[int] = None) -> BranchTree:
    h, root = t_infinity_state(X, genus)
    return expand_from(h, root, depth, policy)


class IrregularCheck(BaseModel):
    name: str
    holds: bool
    values: dict = Field(default_factory=dict)
    findings: List[str] = Field(default_factory=list)


def _same_state(a: CFState, b: CFState, tol) -> bool:
    if (a.lam is None) != (b.lam is None):
        return False
    return close(a.t, b.t, tol) and (a.lam is None or close(a.lam, b.lam, tol))


def _mirrored_levels(forward: BranchTree, backward: BranchTree, depth: int, tol) -> int:
    """Number of levels 1..depth on which both trees carry the same (t, lambda) multiset."""
    matched = 0
    for k in range(1, depth + 1):
        left = [s for p, s in forward.nodes.items() if len(p) == k]
        pool = [s for p, s in backward.nodes.items() if len(p) == k]
        if len(left) != len(pool):
            break
        for s in left:
            j = next((i for i, r in enumerate(pool) if _same_state(s, r, tol)), None)
            if j is None:
                break
            pool.pop(j)
        if pool:
            break
        matched += 1
    return matched


def t_infinity_proposition(
    X: Poly,
    genus: Optional[int] = None,
    depth: int = 2,
    lam_prev: Optional[Number] = None,
) -> IrregularCheck:
    """Even symmetric at t = infinity iff p_{2g+2} = 0.

    lambda_0 and lambda_{-1} are the two roots of p_{2g+2} - p0 lambda^2. Read
    backwards, the expansion is the one seeded with lambda_{-1}; even symmetry
    about alpha_0 means lambda_0 = lambda_{-1} and both expansions agree level
    by level (t_k = t_{-k}, lambda_k = lambda_{-k-1}).
    """
    from .symmetry import detect

    h, root = t_infinity_state(X, genus)
    g = h.genus
    scale = max(mp.mpf(1), X.norm())
    lam0 = root.lam
    lam_prev = -lam0 if lam_prev is None else to_scalar(lam_prev)
    lead_zero = is_zero(X[2 * g + 2], X.norm())
    values = {
        "lambda_0": format_scalar(lam0),
        "lambda_-1": format_scalar(lam_prev),
        "lead_zero": lead_zero,
        "deg_B": root.B.degree(),
    }
    pair_residual = abs(h.lead - h.p0 * lam_prev ** 2) / scale
    values["pair_residual"] = float(pair_residual)
    if pair_residual > tau():
        return IrregularCheck(
            name="t_infinity_even",
            holds=False,
            values=values,
            findings=["lambda_-1 is not a root of p_{2g+2} - p0 lambda^2"],
        )

    forward = expand_from(h, root, depth)
    hb, back_root = t_infinity_state(X, g, top=h.sqrt_p0 * lam_prev)
    backward = expand_from(hb, back_root, depth)
    tol = loose_tau()
    mirrored = _mirrored_levels(forward, backward, depth, tol)
    centre = 0 in detect(h, [root], lam_prev_root=lam_prev).even_centers
    even = centre and mirrored >= max(len(p) for p in forward.nodes)
    values.update({"even_centre": centre, "mirrored_levels": mirrored, "even": even})
    findings: List[str] = []
    if centre and not even:
        findings.append("lambda_0 = lambda_-1 but the two expansions part")
    holds = even == lead_zero
    if not holds:
        findings.append(f"even = {even} but p_(2g+2) = 0 is {lead_zero}")
    log.debug("t = infinity symmetry", code="TInf", even=even, mirrored=mirrored)
    return IrregularCheck(name="t_infinity_even", holds=holds, values=values, findings=findings)


# ---------------------------------------------------------------------------
# t = 0
# ---------------------------------------------------------------------------


def t_zero_state(X: Poly, genus: Optional[int] = None) -> Tuple[HalphenElement, CFState]:
    """Root of sqrt(X) = A + B s^(g+2)/(sqrt X + A): A - sqrt(p0) = C s, X - A^2 = B s^(g+2)."""
    g = _checked_x(X, genus)
    S = series_sqrt(X, g + 2)
    A = Poly(S.coeffs)
    C, _ = (A - S[0]).drop_low(1)
    scale = max(X.norm(), A.norm() ** 2)
    B = _exact_shift(X - A * A, g + 2, scale, "t = 0")
    h = HalphenElement(X, g, mp.mpc(0), mp.mpc(0), S[0], S[0])
    tri = BALTriplet(A, B, C, {"halpadd": float((X - A * A - B.shift_up(g + 2)).norm() / scale)})
    return h, make_state(h, tri, 0, (), irregular="t_zero", b_shift=g + 2)


def expand_t_zero(X: Poly, depth: int, policy: Policy = "all", genus: Optional[int] = None) -> BranchTree:
    h, root = t_zero_state(X, genus)
    return expand_from(h, root, depth, policy)


def seed_interior_zero(X: Poly, genus: Optional[int] = None) -> HalphenElement:
    """Element whose first B has a root at 0: lambda_0 = q_{g+1} and t_0 a nonzero root of Q_X(lambda_0, .)."""
    g = _checked_x(X, genus)
    qx = qx_build(X, g)
    lam0 = qx.c0[0] / (2 * X[0])
    candidates = [r for r in t_roots_at(qx, lam0) if abs(r) > loose_tau()]
    if not candidates:
        raise PreconditionViolated("Q_X(lambda_0, .) has no nonzero root")
    t0 = candidates[0]
    sqrt_y = mp.sqrt(X[0]) * (qg_poly(X, g)(t0) + lam0 * t0 ** (g + 1))
    return element_from_point(X, t0, sqrt_y, genus=g)


def _nearest_choice(state: CFState, target) -> int:
    return 1 + min(range(len(state.spare_roots)), key=lambda j: abs(state.spare_roots[j] - target))


def t_zero_proposition(tree: BranchTree, path: Tuple[int, ...]) -> IrregularCheck:
    """A path reaching t_h = 0 turns back: lambda_h escapes to infinity and the
    expansion of sqrt(X) retraces t_{h-1}, t_{h-2}, ... with lambda_{h-2}, lambda_{h-3}, ...
    """
    from .symmetry import lambda_before

    h_el = tree.element
    g = h_el.genus
    states = tree.path_states(path)
    leaf = states[-1]
    if leaf.kind != T_ZERO:
        raise PreconditionViolated("path does not end at t = 0")
    hidx = len(states) - 1
    qx = qx_build(h_el.X, g)
    fiber = qx.in_lambda(0)
    q_next = fiber[0] / (2 * h_el.p0)
    findings: List[str] = []
    values = {"h": hidx, "odd_center": hidx + 1}

    linear = is_zero(fiber[2], max(mp.mpf(1), fiber.norm()))
    before = states[hidx - 1].lam
    worst = abs(before - q_next) / max(mp.mpf(1), abs(q_next))

    zh, zstate = t_zero_state(h_el.X, g)
    worst = max(worst, abs(zstate.lam - before) / max(mp.mpf(1), abs(before)))
    lam_seq = {k: states[k].lam for k in range(hidx)}
    lam_seq[-1] = lambda_before(h_el, states[0], qx)
    for k in range(1, hidx + 1):
        target_t = states[hidx - k].t
        zstate = cf_step(zh, zstate, _nearest_choice(zstate, target_t))
        worst = max(worst, abs(zstate.t - target_t) / max(mp.mpf(1), abs(target_t)))
        worst = max(worst, abs(zstate.lam - lam_seq[hidx - 1 - k]) / max(mp.mpf(1), abs(zstate.lam)))
    holds = linear and worst <= loose_tau()
    values["mirror_residual"] = float(worst)
    values["fiber_linear"] = linear
    if not holds:
        findings.append("sqrt(X) expansion does not retrace the path before t = 0")
    return IrregularCheck(name="t_zero_odd", holds=holds, values=values, findings=findings)


# ---------------------------------------------------------------------------
# epsilon = infinity
# ---------------------------------------------------------------------------


def reverse_poly(X: Poly) -> Poly:
    return Poly(tuple(reversed(X.coeffs)))


def recenter_infinity(
    X: Poly,
    y: Number,
    sqrt_y: Optional[Number] = None,
    branch: int = 1,
    genus: Optional[int] = None,
) -> HalphenElement:
    """x = 1/s, y = 1/t: X' = s^(2g+2) X(1/s), sqrt(Y') = t^(g+1) sqrt(Y)."""
    g = genus_of(X) if genus is None else genus
    if is_zero(X[2 * g + 2], X.norm()):
        raise LeadingVanishes("p_{2g+2} vanishes; x = infinity is a branch point")
    y = to_scalar(y)
    if abs(y) < loose_tau():
        raise IrregularRootInfinite("y = 0 maps to t = infinity")
    sy = branch * mp.sqrt(X(y)) if sqrt_y is None else to_scalar(sqrt_y)
    t = 1 / y
    Xr = reverse_poly(X)
    h = element_from_point(Xr, t, t ** (g + 1) * sy, genus=g)
    return replace(h, epsilon=mp.mpc(mp.inf))


def expand_eps_infinity(X: Poly, y: Number, depth: int, policy: Policy = "all", **kw) -> BranchTree:
    h = recenter_infinity(X, y, **kw)
    root = replace(root_state(h), irregular="eps_inf")
    return expand_from(h, root, depth, policy)


def infinity_lemma_check(X: Poly, y: Number, order: int, sqrt_y: Optional[Number] = None) -> float:
    """y^(g+1)(sqrt X - sqrt Y)/(x - y) = h_g(x, y) sqrt Y + (y^(g+1) sqrt X - x^(g+1) sqrt Y)/(x - y)."""
    g = genus_of(X)
    y = to_scalar(y)
    sy = mp.sqrt(X(y)) if sqrt_y is None else to_scalar(sqrt_y)
    S = series_sqrt(X, order)
    lhs = hh_series(X, y, sy, order) * y ** (g + 1)
    num = S * y ** (g + 1) - Series.from_poly(Poly.monomial(g + 1, sy), order)
    rhs = num / Poly.linear_factor(y) + power_sum_poly(y, g) * sy
    return float((lhs - rhs).norm() / max(mp.mpf(1), lhs.norm()))


def infinity_equivalence_check(X: Poly, y: Number, order: int, sqrt_y: Optional[Number] = None) -> IrregularCheck:
    """Coefficients of the element at x = infinity against the transformed element at s = 0.

    With x = 1/s the element is s^(-g) F(s), F = (sqrt X' - s^(g+1) sqrt Y)/(1 - y s),
    and F_k = -t H'_k for k > g where H' = (sqrt X' - sqrt Y')/(s - t).
    """
    g = genus_of(X)
    h = recenter_infinity(X, y, sqrt_y=sqrt_y, genus=g)
    y = to_scalar(y)
    sy = h.sqrt_y / h.t ** (g + 1)
    Sr = series_sqrt(h.X, order)
    F = (Sr - Series.from_poly(Poly.monomial(g + 1, sy), order)) / Poly((1, -y))
    H = hh_series(h.X, h.t, h.sqrt_y, order)
    worst = mp.mpf(0)
    for k in range(g + 1, order):
        worst = max(worst, abs(F[k] + h.t * H[k]) / max(mp.mpf(1), abs(F[k])))
    return IrregularCheck(
        name="eps_infinity_equivalence",
        holds=worst <= tau() * 2 ** 16,
        values={"max_residual": float(worst), "factor": format_scalar(-h.t, 20)},
    )
