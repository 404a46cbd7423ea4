"""Continued-fraction expansion of a Halphen element and its branch tree.

Step i carries A^(i), B^(i), C^(i), the point t_i and lambda_i = A^(i)_{g+1}/sqrt(p0).
The next point t_{i+1} is any root of B^(i) and sqrt(Y_{i+1}) = -A^(i)(t_{i+1}); the
partial quotients are

    alpha_{i+1} = (A^(i)(s) - A^(i)(t_{i+1})) / (s - t_{i+1}) + C^(i+1)
    beta_{i+1}  = B^(i) s^(g+1) / (s - t_{i+1})

so that Q_i = beta_{i+1} / (alpha_{i+1} + Q_{i+1}) with
Q_i = B^(i) s^(g+1) / (sqrt X + A^(i)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from mpmath import mp
from pydantic import BaseModel

from .arith import (
    Poly,
    Series,
    format_scalar,
    hh_series,
    loose_tau,
    poly_roots,
    power_sum_poly,
    series_sqrt,
    tau,
)
from .bal import BALTriplet, HalphenElement, first_remainder_residual, solve_bal
from .errors import DegenerateB, IrregularRootInfinite, IrregularRootZero, NoSuchChoice
from .log_utils import get_logger

log = get_logger(__name__)

Path = Tuple[int, ...]
Policy = Union[str, Sequence[int]]

REGULAR = "regular"
DEGENERATE = "degenerate"
T_ZERO = "t_zero"


@dataclass(frozen=True)
class CFState:
    index: int
    path: Path
    t: object
    sqrt_y: object
    A: Optional[Poly] = None
    B: Optional[Poly] = None
    C: Optional[Poly] = None
    lam: Optional[object] = None
    alpha: Optional[Poly] = None
    beta: Optional[Poly] = None
    spare_roots: Tuple = ()
    kind: str = REGULAR
    b_shift: Optional[int] = None
    irregular: Optional[str] = None
    flags: Tuple[str, ...] = ()
    residuals: Dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def is_leaf_kind(self) -> bool:
        return self.kind != REGULAR

    def shift(self, h: HalphenElement) -> int:
        """Power of s factored out of X - A^2 besides (s - t); g+1 unless irregular."""
        return h.genus + 1 if self.b_shift is None else self.b_shift

    def remainder(self, h: HalphenElement, order: int) -> Series:
        """Q_i = B^(i) s^shift / (sqrt X + A^(i)) as a truncated series."""
        S = series_sqrt(h.X, order)
        return Series.from_poly(self.B.shift_up(self.shift(h)), order) / (S + self.A)


def make_state(h: HalphenElement, tri: BALTriplet, index: int, path: Path, **extra) -> CFState:
    g = h.genus
    lam = tri.lam(h)
    residuals = dict(tri.residuals)
    if extra.get("irregular") is None:
        scale = max(mp.mpf(1), h.X.norm())
        residuals["lead_B"] = float(abs(tri.B[g] - (h.lead - h.p0 * lam * lam)) / scale)
        residuals["branch"] = float(abs(h.sqrt_y ** 2 - h.X(h.t)) / max(scale, abs(h.X(h.t))))

    flags: List[str] = list(extra.pop("flags", ()))
    kind = REGULAR
    roots: Tuple = ()
    if tri.B.degree() < g:
        kind = DEGENERATE
        flags.append("deg_B_below_genus")
        log.warning("B lost its leading coefficient", code="DegenerateB", path=path_key(path))
    else:
        roots = tuple(poly_roots(tri.B.truncated(g + 1)))
        near_t = mp.isfinite(h.t) and any(abs(r - h.t) <= loose_tau() * max(mp.mpf(1), abs(h.t)) for r in roots)
        if near_t:
            flags.append("double_root_at_t")
            log.warning("X - A^2 has a double root at s = t", code="Degenerate", path=path_key(path))
    return CFState(
        index=index,
        path=path,
        t=h.t,
        sqrt_y=h.sqrt_y,
        A=tri.A,
        B=tri.B,
        C=tri.C,
        lam=lam,
        spare_roots=roots,
        kind=kind,
        flags=tuple(flags),
        residuals=residuals,
        **extra,
    )


def root_state(h: HalphenElement) -> CFState:
    tri = solve_bal(h)
    return make_state(h, tri, 0, ())


def cf_step(h: HalphenElement, state: CFState, choice: int) -> CFState:
    """Advance one step along the root with 1-based index ``choice`` of B^(i)."""
    g = h.genus
    if state.kind == DEGENERATE or (state.B is not None and state.B.degree() < g):
        raise DegenerateB("deg B^(i) < g; the step has fewer branches", path=path_key(state.path))
    if state.kind != REGULAR:
        raise NoSuchChoice(f"state of kind {state.kind} has no children")
    roots = state.spare_roots
    if not 1 <= choice <= len(roots):
        raise NoSuchChoice(f"choice {choice} not in 1..{len(roots)}")
    t_next = roots[choice - 1]
    if abs(t_next) < loose_tau():
        raise IrregularRootZero("next point is at the expansion centre", path=path_key(state.path + (choice,)))
    if abs(t_next) > max(mp.mpf(1), h.X.norm()) / loose_tau():
        raise IrregularRootInfinite("next point escapes to infinity", path=path_key(state.path + (choice,)))

    sqrt_y_next = -state.A(t_next)
    nxt = h.with_point(t_next, sqrt_y_next)
    tri = solve_bal(nxt)

    p_a, _ = state.A.divide_linear(t_next)
    alpha = p_a + tri.C
    beta = state.B.divide_linear_exact(t_next, what="beta").shift_up(state.shift(h))
    new = make_state(nxt, tri, state.index + 1, state.path + (choice,), alpha=alpha, beta=beta)
    closed = alpha_closed_form(h, state.lam, new.lam, t_next)
    new.residuals["alpha_closed_form"] = float((alpha - closed).norm() / max(mp.mpf(1), alpha.norm()))
    new.residuals["branch_sign"] = float(abs(sqrt_y_next + state.A(t_next)))
    log.debug(
        "cf step",
        code="Step",
        path=path_key(new.path),
        t=format_scalar(t_next, 12),
        lam=format_scalar(new.lam, 12),
    )
    return new


def zero_child(h: HalphenElement, state: CFState, choice: int) -> CFState:
    """Leaf recorded when the chosen root of B^(i) is (numerically) zero."""
    beta = state.B.divide_linear(mp.mpc(0))[0].shift_up(state.shift(h))
    return CFState(
        index=state.index + 1,
        path=state.path + (choice,),
        t=mp.mpc(0),
        sqrt_y=-state.A(0),
        beta=beta,
        kind=T_ZERO,
        irregular="t_zero",
    )


def alpha_closed_form(h: HalphenElement, lam_prev, lam, t) -> Poly:
    """sum_{k=1..g} 2 A_k h_{k-1}(s,t) + sqrt(p0)(lam_prev + lam) h_g(s,t)."""
    g = h.genus
    S = series_sqrt(h.X, g + 1)
    out = Poly.zero()
    for k in range(1, g + 1):
        out = out + power_sum_poly(t, k - 1) * (2 * S[k])
    return out + power_sum_poly(t, g) * (h.sqrt_p0 * (lam_prev + lam))


@dataclass
class BranchTree:
    element: HalphenElement
    nodes: Dict[Path, CFState] = field(default_factory=dict)

    @property
    def root(self) -> CFState:
        return self.nodes[()]

    def add(self, state: CFState) -> None:
        self.nodes[state.path] = state

    def children(self, path: Path) -> List[CFState]:
        n = len(path) + 1
        return [s for p, s in self.nodes.items() if len(p) == n and p[:-1] == path]

    def leaves(self) -> List[CFState]:
        return [s for p, s in self.nodes.items() if not self.children(p)]

    def path_states(self, path: Path) -> List[CFState]:
        return [self.nodes[path[:k]] for k in range(len(path) + 1)]

    def maximal_paths(self) -> List[Path]:
        return [s.path for s in self.leaves()]

    def edges(self) -> Iterator[Tuple[CFState, CFState]]:
        for p, s in self.nodes.items():
            if p:
                yield self.nodes[p[:-1]], s

    def __len__(self) -> int:
        return len(self.nodes)


def path_key(path: Path) -> str:
    return ".".join(str(j) for j in path)


def _choices(policy: Policy, state: CFState, depth_index: int) -> List[int]:
    if policy == "all":
        return list(range(1, len(state.spare_roots) + 1))
    if policy == "first":
        return [1] if state.spare_roots else []
    path = list(policy)
    if depth_index >= len(path):
        return []
    return [path[depth_index]]


def expand_from(h: HalphenElement, start: CFState, depth: int, policy: Policy = "all") -> BranchTree:
    """Breadth-first expansion below ``start``; node order follows canonical root order."""
    if not isinstance(policy, str):
        policy = tuple(policy)
    elif policy not in ("all", "first"):
        raise NoSuchChoice(f"unknown policy {policy!r}")
    tree = BranchTree(h)
    tree.add(start)
    frontier = [start]
    for level in range(depth):
        nxt: List[CFState] = []
        for state in frontier:
            if state.kind != REGULAR:
                continue
            for j in _choices(policy, state, level):
                if not 1 <= j <= len(state.spare_roots):
                    raise NoSuchChoice(f"choice {j} not in 1..{len(state.spare_roots)}", path=path_key(state.path))
                if abs(state.spare_roots[j - 1]) < loose_tau():
                    child = zero_child(h, state, j)
                    log.warning("irregular t = 0 reached", code="IrregularRootZero", path=path_key(child.path))
                else:
                    child = cf_step(h, state, j)
                tree.add(child)
                nxt.append(child)
        frontier = nxt
    log.debug("expansion done", code="Expand", nodes=len(tree), depth=depth)
    return tree


def expand(h: HalphenElement, depth: int, policy: Policy = "all") -> BranchTree:
    return expand_from(h, root_state(h), depth, policy)


class EdgeResidual(BaseModel):
    path: str
    residual: float


class ChainReport(BaseModel):
    order: int
    first_remainder: float
    edges: List[EdgeResidual]
    max_residual: float
    tolerance: float
    passed: bool


def chain_verify(tree: BranchTree, order: int) -> ChainReport:
    """Series residual of Q_{i-1} = beta_i / (alpha_i + Q_i) along every edge."""
    h = tree.element
    root = tree.root
    tol = tau()
    first = 0.0
    if root.kind == REGULAR and root.irregular in (None, "eps_inf"):
        tri = BALTriplet(root.A, root.B, root.C)
        first = float(first_remainder_residual(h, tri, order))
    edges: List[EdgeResidual] = []
    remainders: Dict[Path, Series] = {}
    for parent, child in tree.edges():
        if child.kind == T_ZERO:
            continue
        if parent.path not in remainders:
            remainders[parent.path] = parent.remainder(h, order)
        if child.path not in remainders:
            remainders[child.path] = child.remainder(h, order)
        q_prev = remainders[parent.path]
        rhs = Series.from_poly(child.beta, order) / (remainders[child.path] + child.alpha)
        res = (q_prev - rhs).norm() / max(mp.mpf(1), q_prev.norm())
        edges.append(EdgeResidual(path=path_key(child.path), residual=float(res)))
    worst = max([first] + [e.residual for e in edges])
    return ChainReport(
        order=order,
        first_remainder=first,
        edges=edges,
        max_residual=worst,
        tolerance=float(tol),
        passed=worst <= float(tol),
    )


def evaluate_path(tree: BranchTree, path: Path, order: int) -> Series:
    """C + beta_1/(alpha_1 + ... + beta_d/(alpha_d + Q_d)) as a series."""
    h = tree.element
    states = tree.path_states(path)
    last = states[-1]
    acc = last.remainder(h, order)
    for st in reversed(states[1:]):
        acc = Series.from_poly(st.beta, order) / (acc + st.alpha)
    return acc + states[0].C


def reconstruct_series(tree: BranchTree, path: Path, order: int):
    """Relative residual between the evaluated finite fraction and the element's series."""
    h = tree.element
    value = evaluate_path(tree, path, order)
    direct = hh_series(h.X, h.t, h.sqrt_y, order)
    return (value - direct).norm() / max(mp.mpf(1), direct.norm())


def _scalar_list(p: Optional[Poly]) -> Optional[List[str]]:
    return None if p is None else p.to_strings()


def tree_to_dict(tree: BranchTree) -> dict:
    h = tree.element
    nodes = {}
    for path, st in tree.nodes.items():
        nodes[path_key(path)] = {
            "index": st.index,
            "kind": st.irregular or st.kind,
            "t": format_scalar(st.t),
            "sqrtY": format_scalar(st.sqrt_y),
            "lambda": None if st.lam is None else format_scalar(st.lam),
            "alpha": _scalar_list(st.alpha),
            "beta": _scalar_list(st.beta),
            "A": _scalar_list(st.A),
            "B": _scalar_list(st.B),
            "C": _scalar_list(st.C),
            "spare_roots": [format_scalar(r) for r in st.spare_roots],
            "flags": list(st.flags),
            "residuals": dict(st.residuals),
        }
    return {
        "precision_bits": mp.prec,
        "genus": h.genus,
        "X": h.X.to_strings(),
        "epsilon": format_scalar(h.epsilon),
        "t": format_scalar(h.t),
        "sqrtY": format_scalar(h.sqrt_y),
        "nodes": nodes,
    }
