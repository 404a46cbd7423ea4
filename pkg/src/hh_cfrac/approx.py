"""Continuants, convergents and their approximation orders.

For a path with partial quotients alpha_i, beta_i and first polynomial G_0,

    [[G_m, G_{m-1}], [H_m, H_{m-1}]] = T_0 T_1 ... T_m,
    T_0 = [[G_0, 1], [1, 0]],  T_i = [[alpha_i, 1], [beta_i, 0]].

Three kinds of root are handled:

  * ``generic_y``:  f = (sqrt X - sqrt Y)/(x - y), G_0 = C;
  * ``sqrt_case``:  y = epsilon, f = sqrt X, G_0 = A (the t = 0 root);
  * ``y_infinity``: f = sqrt X - sqrt(p_{2g+2}) s^(g+1), G_0 = C.

In every case E_m = G_m - H_m f = (-1)^(m+1) Q_0 Q_1 ... Q_m and the lifted
pair (Ghat, Hhat) approximates sqrt X itself. Lifts are kept as numerators over
a common denominator: s - t for ``generic_y``, 1 otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from mpmath import mp
from pydantic import BaseModel, Field

from .arith import Number, Poly, Series, format_scalar, loose_tau, recenter, series_sqrt, tau, to_scalar
from .bal import element_from_point
from .cfengine import REGULAR, BranchTree, CFState, Path, expand_from, root_state
from .config import settings
from .errors import AllZero, HHError, PreconditionViolated
from .log_utils import get_logger

log = get_logger(__name__)

GENERIC_Y = "generic_y"
SQRT_CASE = "sqrt_case"
Y_INFINITY = "y_infinity"
MODES = (GENERIC_Y, SQRT_CASE, Y_INFINITY)

Matrix = Tuple[Poly, Poly, Poly, Poly]


@dataclass(frozen=True)
class ContinuantPair:
    G: Poly
    H: Poly
    m: int
    path: Path = ()


@dataclass(frozen=True)
class HatPair:
    """Ghat = G_num / den, Hhat = H_num / den."""

    G_num: Poly
    H_num: Poly
    den: Poly
    m: int


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def continuants(G0: Poly, quotients: Sequence[Tuple[Poly, Poly]], path: Path = ()) -> List[ContinuantPair]:
    """Pairs for m = -1, 0, ..., len(quotients), from the running matrix product."""
    one, zero = Poly((1,)), Poly.zero()
    M: Matrix = (G0, one, one, zero)
    out = [ContinuantPair(one, zero, -1, path), ContinuantPair(G0, one, 0, path)]
    for m, (alpha, beta) in enumerate(quotients, start=1):
        M = _matmul(M, (alpha, one, beta, zero))
        out.append(ContinuantPair(M[0], M[2], m, path))
    return out


def recurrence_residual(pairs: Sequence[ContinuantPair], quotients: Sequence[Tuple[Poly, Poly]]) -> float:
    """G_m = alpha_m G_{m-1} + beta_m G_{m-2}, likewise for H."""
    worst = mp.mpf(0)
    for m, (alpha, beta) in enumerate(quotients, start=1):
        cur, p1, p2 = pairs[m + 1], pairs[m], pairs[m - 1]
        for new, a, b in ((cur.G, p1.G, p2.G), (cur.H, p1.H, p2.H)):
            rhs = alpha * a + beta * b
            worst = max(worst, (new - rhs).norm() / max(mp.mpf(1), new.norm()))
    return float(worst)


def mode_of(root: CFState) -> str:
    if root.irregular == "t_zero":
        return SQRT_CASE
    if root.irregular == "t_inf":
        return Y_INFINITY
    return GENERIC_Y


def regular_prefix(tree: BranchTree, path: Path) -> Path:
    """Longest prefix of ``path`` whose states are all regular."""
    states = tree.path_states(path)
    n = 0
    while n < len(states) and states[n].kind == REGULAR:
        n += 1
    return path[: max(n - 1, 0)]


def path_continuants(tree: BranchTree, path: Path) -> Tuple[str, List[CFState], List[ContinuantPair]]:
    states = tree.path_states(path)
    for st in states:
        if st.kind != REGULAR:
            raise PreconditionViolated("continuants need a regular path", index=st.index, kind=st.kind)
    root = states[0]
    mode = mode_of(root)
    G0 = root.A if mode == SQRT_CASE else root.C
    quotients = [(st.alpha, st.beta) for st in states[1:]]
    return mode, states, continuants(G0, quotients, path)


def hat_pairs(tree: BranchTree, mode: str, pairs: Sequence[ContinuantPair]) -> List[HatPair]:
    h = tree.element
    g = h.genus
    out = []
    for p in pairs:
        if mode == GENERIC_Y:
            den = Poly.linear_factor(h.t)
            out.append(HatPair(p.G * den + p.H * h.sqrt_y, p.H, den, p.m))
        elif mode == Y_INFINITY:
            top = mp.sqrt(h.lead)
            out.append(HatPair(p.G + p.H.shift_up(g + 1) * top, p.H, Poly((1,)), p.m))
        else:
            out.append(HatPair(p.G, p.H, Poly((1,)), p.m))
    return out


def target_series(tree: BranchTree, mode: str, order: int) -> Series:
    """The function f the convergents G_m/H_m approximate."""
    h = tree.element
    S = series_sqrt(h.X, order)
    if mode == SQRT_CASE:
        return S
    if mode == Y_INFINITY:
        return S - Poly.monomial(h.genus + 1, mp.sqrt(h.lead))
    return (S - h.sqrt_y) / Poly.linear_factor(h.t)


def vanishing_order(values, tol=None) -> int:
    """Index of the first coefficient above ``tol`` times the largest one."""
    coeffs = values.coeffs if isinstance(values, (Series, Poly)) else tuple(values)
    tol = tau() if tol is None else tol
    scale = max((abs(c) for c in coeffs), default=mp.mpf(0))
    if scale == 0:
        raise AllZero("identically zero", order=len(coeffs))
    for k, c in enumerate(coeffs):
        if abs(c) > tol * scale:
            return k
    raise AllZero("no coefficient above threshold", order=len(coeffs))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class Clause(BaseModel):
    theorem: str
    m: int
    predicted: Optional[int] = None
    measured: Optional[int] = None
    at_least: bool = False
    residual: Optional[float] = None
    passed: bool = True
    required: bool = True
    note: str = ""


class ApproxReport(BaseModel):
    mode: str
    genus: int
    depth: int
    order: int
    tolerance: float
    clauses: List[Clause] = Field(default_factory=list)
    findings: List[str] = Field(default_factory=list)
    passed: bool = True

    def to_table(self) -> str:
        head = f"{'theorem':<22} {'m':>3} {'predicted':>10} {'measured':>10} {'residual':>11}  pass"
        lines = [head, "-" * len(head)]
        for c in self.clauses:
            meas = "-" if c.measured is None else (">=" if c.at_least else "") + str(c.measured)
            pred = "-" if c.predicted is None else str(c.predicted)
            res = "-" if c.residual is None else f"{c.residual:.2e}"
            flag = "yes" if c.passed else ("no" if c.required else "no*")
            lines.append(f"{c.theorem:<22} {c.m:>3} {pred:>10} {meas:>10} {res:>11}  {flag}")
        return "\n".join(lines)


def _rel(lhs: Poly, rhs: Poly) -> float:
    return float((lhs - rhs).norm() / max(mp.mpf(1), lhs.norm(), rhs.norm()))


def _order_clause(name: str, m: int, values, predicted: int, exact: bool = True) -> Clause:
    try:
        measured = vanishing_order(values)
        at_least = False
    except AllZero as exc:
        measured, at_least = exc.order, True
    passed = measured == predicted if exact and not at_least else measured >= predicted
    return Clause(theorem=name, m=m, predicted=predicted, measured=measured, at_least=at_least, passed=passed)


def _degree_clause(name: str, m: int, p: Poly, predicted: int) -> Clause:
    d = p.degree()
    return Clause(theorem=name, m=m, predicted=predicted, measured=d, passed=d == predicted)


def _degree_drop(pairs: Sequence[ContinuantPair], quotients, k: int, attr: str, predicted: int) -> str:
    """Why pairs[k] fell short of ``predicted``; empty when the recurrence does not explain it."""
    m = pairs[k].m
    if m == 0:
        return "first polynomial loses its leading coefficient"
    alpha, beta = quotients[m - 1]
    a_part = alpha * getattr(pairs[k - 1], attr)
    b_part = beta * getattr(pairs[k - 2], attr)
    a, b = a_part[predicted], b_part[predicted]
    tol = loose_tau() * max(mp.mpf(1), a_part.norm(), b_part.norm())
    if abs(a + b) > tol:
        return ""
    if abs(a) <= tol and abs(b) <= tol:
        return "degree drop carried over from an earlier step"
    return "leading terms of alpha_m and beta_m products cancel"


def degree_check(
    pairs: Sequence[ContinuantPair],
    genus: int,
    mode: str,
    quotients: Optional[Sequence[Tuple[Poly, Poly]]] = None,
) -> List[Clause]:
    """deg G_m and deg H_m against g(m+1) (+1 for the sqrt X case) and gm.

    The degrees are reached unless the leading terms of alpha_m G_{m-1} and
    beta_m G_{m-2} cancel, as they do on curves with extra symmetry. Given the
    ``quotients``, such a drop is kept as a non-required clause with a note.
    """
    if mode not in MODES:
        raise PreconditionViolated(f"mode must be one of {', '.join(MODES)}")
    g = genus
    extra = 1 if mode == SQRT_CASE else 0
    out = []
    for k, p in enumerate(pairs):
        if p.m < 0:
            continue
        for name, attr, predicted in (("deg_G", "G", g * (p.m + 1) + extra), ("deg_H", "H", g * p.m)):
            clause = _degree_clause(name, p.m, getattr(p, attr), predicted)
            if not clause.passed and clause.measured < predicted and quotients is not None:
                note = _degree_drop(pairs, quotients, k, attr, predicted)
                if note:
                    clause.required = False
                    clause.note = note
            out.append(clause)
    return out


def determinant_check(
    pairs: Sequence[ContinuantPair], states: Sequence[CFState], genus: int, mode: str
) -> List[Clause]:
    """G_m H_{m-1} - G_{m-1} H_m = (-1)^(m-1) beta_1...beta_m = delta_m s^((g+1)m + e)."""
    g = genus
    e = 1 if mode == SQRT_CASE else 0
    out = []
    prod = Poly((1,))
    for m in range(1, len(pairs) - 1):
        cur, prev = pairs[m + 1], pairs[m]
        D = cur.G * prev.H - prev.G * cur.H
        prod = prod * states[m].beta
        sign = 1 if (m - 1) % 2 == 0 else -1
        out.append(Clause(theorem="det_product", m=m, residual=_rel(D, prod * sign)))
        low = (g + 1) * m + e
        out.append(_order_clause("det_order", m, D, low))
        delta, _ = D.drop_low(low)
        out.append(_degree_clause("deg_delta", m, delta, (g - 1) * m))
        out.append(_degree_clause("deg_det", m, D, 2 * g * m + e))
    return out


def _p1_p2(tree: BranchTree, hats: Sequence[HatPair], m: int) -> Tuple[Poly, Poly]:
    """P1 = (X Hhat_m Hhat_{m-1} - Ghat_m Ghat_{m-1}) den, P2 = (Ghat_m^2 - X Hhat_m^2) den."""
    X = tree.element.X
    a, b = hats[m + 1], hats[m]
    n1 = X * a.H_num * b.H_num - a.G_num * b.G_num
    n2 = a.G_num * a.G_num - X * a.H_num * a.H_num
    if a.den.nominal_degree == 0:
        return n1, n2
    t = -a.den[0]
    return n1.divide_linear_exact(t, what="P1"), n2.divide_linear_exact(t, what="P2")


def approximation_report(tree: BranchTree, path: Path, order: Optional[int] = None) -> ApproxReport:
    h = tree.element
    g = h.genus
    mode, states, pairs = path_continuants(tree, path)
    depth = len(states) - 1
    order = order or (g + 1) * (depth + 2) + settings.DEFAULT_ORDER_SLACK
    tol = tau() * 2**16
    rep = ApproxReport(mode=mode, genus=g, depth=depth, order=order, tolerance=float(tol))
    if mode == GENERIC_Y and abs(h.t) < loose_tau():
        raise PreconditionViolated("y coincides with epsilon; use the sqrt X expansion")

    quotients = [(st.alpha, st.beta) for st in states[1:]]
    rep.clauses.append(Clause(theorem="three_term", m=depth, residual=recurrence_residual(pairs, quotients)))
    rep.clauses.extend(degree_check(pairs, g, mode, quotients))
    rep.clauses.extend(determinant_check(pairs, states, g, mode))

    f = target_series(tree, mode, order)
    S = series_sqrt(h.X, order)
    hats = hat_pairs(tree, mode, pairs)
    remainders = [st.remainder(h, order) for st in states]
    e = 1 if mode == SQRT_CASE else 0
    product = Series.constant(1, order)
    for m in range(0, depth + 1):
        cur, prev = pairs[m + 1], pairs[m]
        product = product * remainders[m]
        E = Series.from_poly(cur.G, order) - f * cur.H
        sign = 1 if (m + 1) % 2 == 0 else -1
        rep.clauses.append(
            Clause(
                theorem="remainder_product",
                m=m,
                residual=float((E - product * sign).norm() / max(mp.mpf(1), E.norm())),
            )
        )
        rep.clauses.append(_order_clause("error_order", m, E, (g + 1) * (m + 1) + e))

        # sqrt X - Ghat/Hhat = -E den / H_num
        try:
            h_ord = vanishing_order(cur.H)
            e_ord = vanishing_order(E)
            if mode == Y_INFINITY:
                predicted = 2 * m + 2
                measured = e_ord - h_ord
                ok = measured >= predicted
                rep.clauses.append(
                    Clause(theorem="sqrt_approx_infinity", m=m, predicted=predicted, measured=measured, passed=ok)
                )
                if measured != predicted:
                    rep.findings.append(
                        f"y = infinity, genus {g}, m = {m}: order {measured} = (g+1)(m+1), not 2m+2"
                    )
            else:
                predicted = (g + 1) * (m + 1) + e
                rep.clauses.append(
                    Clause(
                        theorem="sqrt_approx",
                        m=m,
                        predicted=predicted,
                        measured=e_ord - h_ord,
                        passed=(h_ord > 0) or (e_ord - h_ord == predicted),
                        note="H_m(0) = 0" if h_ord > 0 else "",
                    )
                )
        except AllZero as exc:
            rep.clauses.append(Clause(theorem="sqrt_approx", m=m, measured=exc.order, at_least=True))

        if m >= 1:
            den = Series.from_poly(cur.H, order) + remainders[m] * prev.H
            try:
                rebuilt = (Series.from_poly(cur.G, order) + remainders[m] * prev.G) / den
                res = float((rebuilt - f).norm() / max(mp.mpf(1), f.norm()))
                rep.clauses.append(Clause(theorem="reconstruction", m=m, residual=res))
            except HHError:
                rep.clauses.append(Clause(theorem="reconstruction", m=m, note="H_m(0) + Q_m(0)H_{m-1}(0) = 0"))

        _hat_clauses(rep, tree, states, pairs, hats, m, mode)
    _lemma_evaluation(rep, states, pairs, hats)

    for c in rep.clauses:
        if c.residual is not None and c.predicted is None:
            c.passed = c.residual <= float(tol)
    for c in rep.clauses:
        if not c.required and not c.passed and c.note:
            rep.findings.append(f"{c.theorem} (m = {c.m}): {c.note}")
    rep.findings = list(dict.fromkeys(rep.findings))
    rep.passed = all(c.passed for c in rep.clauses if c.required)
    log.debug("approximation report", code="Approx", mode=mode, depth=depth, passed=rep.passed)
    return rep


def _hat_clauses(
    rep: ApproxReport,
    tree: BranchTree,
    states: Sequence[CFState],
    pairs: Sequence[ContinuantPair],
    hats: Sequence[HatPair],
    m: int,
    mode: str,
) -> None:
    """Ghat_m A + Ghat_{m-1} B s^k = Hhat_m X and Hhat_m A + Hhat_{m-1} B s^k = Ghat_m, with k the shift."""
    h = tree.element
    g = h.genus
    st = states[m]
    A = st.A
    Bs = st.B.shift_up(st.shift(h))
    a, b = hats[m + 1], hats[m]
    X = h.X
    rep.clauses.append(Clause(theorem="hat_first", m=m, residual=_rel(A * a.G_num + Bs * b.G_num, X * a.H_num)))
    rep.clauses.append(Clause(theorem="hat_second", m=m, residual=_rel(A * a.H_num + Bs * b.H_num, a.G_num)))
    printed = _rel(A * a.H_num + Bs * b.H_num, X * a.G_num)
    rep.clauses.append(
        Clause(
            theorem="hat_second_printed",
            m=m,
            residual=printed,
            required=False,
            note="right-hand side reads Ghat_m, without the factor X",
        )
    )

    e = 1 if mode == SQRT_CASE else 0
    cur, prev = pairs[m + 1], pairs[m]
    D = cur.G * prev.H - prev.G * cur.H
    P1, P2 = _p1_p2(tree, hats, m)
    rep.clauses.append(Clause(theorem="P1_recovers_A", m=m, residual=_rel(P1, D * A)))
    rep.clauses.append(Clause(theorem="P2_recovers_B", m=m, residual=_rel(P2, D * Bs)))
    if mode == Y_INFINITY or m == 0:
        return
    # degrees and zero prefixes of P1, P2
    rep.clauses.append(_degree_clause("deg_P1", m, P1, 2 * m * g + g + 1 + e))
    rep.clauses.append(_order_clause("P1_order", m, P1, (g + 1) * m + e))
    rep.clauses.append(_degree_clause("deg_P2", m, P2, 2 * m * g + 2 * g + 1 + e))
    rep.clauses.append(_order_clause("P2_order", m, P2, (g + 1) * (m + 1) + e))
    if mode == GENERIC_Y:
        t, sy = h.t, h.sqrt_y
        xy, _ = (X - h.sqrt_y**2).divide_linear(t)
        printed_p1 = cur.H * prev.H * xy - D * sy - cur.G * prev.G * Poly.linear_factor(t)
        rep.clauses.append(
            Clause(
                theorem="P1_printed",
                m=m,
                residual=_rel(printed_p1, D * A),
                required=False,
                note="middle term is sqrt(Y)(G_m H_{m-1} + G_{m-1} H_m)",
            )
        )


def _lemma_evaluation(
    rep: ApproxReport, states: Sequence[CFState], pairs: Sequence[ContinuantPair], hats: Sequence[HatPair]
) -> None:
    """At s = t_k: Ghat_{k-1}/Hhat_{k-1} = A^(k-1)(t_k) = -A^(k)(t_k)."""
    for k in range(1, len(states)):
        tk = states[k].t
        prev_A = states[k - 1].A(tk)
        rep.clauses.append(
            Clause(theorem="lemma_A_sign", m=k, residual=float(abs(prev_A + states[k].A(tk)) / max(mp.mpf(1), abs(prev_A))))
        )
        hp = hats[k]
        Hv = hp.H_num(tk)
        if abs(Hv) <= tau() * max(mp.mpf(1), hp.H_num.norm()):
            continue
        lifted = hp.G_num(tk) / Hv
        scale = max(mp.mpf(1), abs(prev_A))
        rep.clauses.append(Clause(theorem="lemma_eval_hat", m=k, residual=float(abs(lifted - prev_A) / scale)))
        plain = pairs[k].G(tk) / pairs[k].H(tk)
        rep.clauses.append(
            Clause(
                theorem="lemma_eval_printed",
                m=k,
                residual=float(abs(plain - prev_A) / scale),
                required=False,
                note="holds for the lifted convergent Ghat/Hhat",
            )
        )


# ---------------------------------------------------------------------------
# Choice of y
# ---------------------------------------------------------------------------


class Candidate(BaseModel):
    y: str
    mode: Optional[str] = None
    order: Optional[int] = None
    leading_error: Optional[float] = None
    error: Optional[str] = None


class ChoiceScan(BaseModel):
    epsilon: str
    depth: int
    ranking: List[Candidate] = Field(default_factory=list)
    epsilon_first: bool = False


def _is_infinite(y) -> bool:
    if isinstance(y, str):
        return y.strip().lower() in ("inf", "infinity", "oo")
    return not mp.isfinite(mp.mpc(y))


def _scan_tree(X_x: Poly, eps, y, depth: int) -> BranchTree:
    from .irregular import t_infinity_state, t_zero_state

    X = recenter(X_x, eps)
    if _is_infinite(y):
        h, root = t_infinity_state(X)
    elif abs(to_scalar(y) - eps) < loose_tau():
        h, root = t_zero_state(X)
    else:
        h = element_from_point(X, to_scalar(y) - eps, epsilon=eps)
        root = root_state(h)
    return expand_from(h, root, depth, "first")


def best_choice_scan(X_x: Poly, epsilon: Number, candidates: Sequence, depth: int, order: Optional[int] = None) -> ChoiceScan:
    """Rank y-candidates by the order of sqrt X - Ghat_m/Hhat_m, then by its leading coefficient."""
    eps = to_scalar(epsilon)
    scan = ChoiceScan(epsilon=format_scalar(eps), depth=depth)
    rows: List[Candidate] = []
    for y in candidates:
        label = "inf" if _is_infinite(y) else format_scalar(to_scalar(y))
        try:
            tree = _scan_tree(X_x, eps, y, depth)
            path = max(tree.maximal_paths(), key=len)
            if len(path) < depth:
                raise PreconditionViolated("expansion stopped early", length=len(path))
            mode, states, pairs = path_continuants(tree, path)
            g = tree.element.genus
            n = order or (g + 1) * (depth + 2) + settings.DEFAULT_ORDER_SLACK
            f = target_series(tree, mode, n)
            last = pairs[-1]
            E = Series.from_poly(last.G, n) - f * last.H
            e_ord, h_ord = vanishing_order(E), vanishing_order(last.H)
            lead = abs(E[e_ord] / last.H[h_ord])
            if mode == GENERIC_Y:
                lead = lead * abs(tree.element.t)
            rows.append(
                Candidate(y=label, mode=mode, order=e_ord - h_ord, leading_error=float(lead))
            )
        except HHError as exc:
            log.warning("candidate skipped", code=exc.code, y=label)
            rows.append(Candidate(y=label, error=exc.code))
    ok = sorted((r for r in rows if r.error is None), key=lambda r: (-r.order, r.leading_error))
    scan.ranking = ok + [r for r in rows if r.error is not None]
    scan.epsilon_first = bool(ok) and ok[0].mode == SQRT_CASE
    return scan
