"""One continued-fraction step: the unique triplet (A, B, C) of a Halphen element.

For X of degree 2g+2, centre epsilon and t = y - epsilon != 0 there are unique
polynomials with deg A = g+1, deg B = deg C = g and

    A - sqrt(Y) = C (s - t)
    X - A^2     = B s^(g+1) (s - t)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from mpmath import mp

from .arith import (
    Number,
    Poly,
    Series,
    close,
    format_scalar,
    hh_series,
    is_zero,
    loose_tau,
    recenter,
    series_sqrt,
    tau,
    to_scalar,
)
from .errors import (
    MalformedInput,
    PerfectSquare,
    PrecisionLoss,
    PreconditionViolated,
    SqrtAtRoot,
    TAtZero,
)
from .log_utils import get_logger

log = get_logger(__name__)


@dataclass(frozen=True)
class HalphenElement:
    """(sqrt(X) - sqrt(Y)) / (x - y) expanded about x = epsilon.

    ``X`` is already recentred, i.e. a polynomial in s = x - epsilon.
    """

    X: Poly
    genus: int
    epsilon: object
    t: object
    sqrt_y: object
    sqrt_p0: object

    @property
    def p0(self):
        return self.X[0]

    @property
    def y(self):
        return self.epsilon + self.t

    @property
    def lead(self):
        """p_{2g+2}"""
        return self.X[2 * self.genus + 2]

    def q(self, order: Optional[int] = None) -> Series:
        """Normalised series sqrt(X)/sqrt(p0) = 1 + q1 s + q2 s^2 + ..."""
        order = order or 2 * self.genus + 4
        return series_sqrt(self.X, order) * (1 / self.sqrt_p0)

    def with_point(self, t, sqrt_y) -> "HalphenElement":
        return HalphenElement(self.X, self.genus, self.epsilon, mp.mpc(t), mp.mpc(sqrt_y), self.sqrt_p0)


def genus_of(X: Poly) -> int:
    n = X.nominal_degree
    if n < 4 or n % 2:
        raise MalformedInput(f"X must have even nominal degree 2g+2 >= 4, got {n}")
    return n // 2 - 1


def check_not_square(X: Poly, genus: int) -> None:
    S = series_sqrt(X, genus + 2).to_poly()
    rem = X - S * S
    if rem.norm() <= tau() * X.norm():
        raise PerfectSquare("X is the square of a polynomial")


def element_from_point(
    X: Poly,
    t: Number,
    sqrt_y: Optional[Number] = None,
    *,
    epsilon: Number = 0,
    genus: Optional[int] = None,
    branch: int = 1,
) -> HalphenElement:
    """Build an element from an already recentred X and the local point t.

    When ``sqrt_y`` is omitted the principal root of X(t) times ``branch`` is used.
    """
    g = genus_of(X) if genus is None else genus
    if is_zero(X[0], X.norm()):
        raise SqrtAtRoot("X vanishes at the expansion centre; move epsilon")
    check_not_square(X, g)
    t = to_scalar(t)
    value = X(t)
    if sqrt_y is None:
        if branch not in (1, -1):
            raise MalformedInput("branch must be +1 or -1")
        sy = branch * mp.sqrt(value)
    else:
        sy = to_scalar(sqrt_y)
        if not close(sy * sy, value, loose_tau()):
            raise PreconditionViolated(
                "sqrtY^2 != X(y)", sqrtY=format_scalar(sy, 12), X_y=format_scalar(value, 12)
            )
    return HalphenElement(X, g, to_scalar(epsilon), t, sy, mp.sqrt(X[0]))


def make_element(
    X_x: Poly,
    epsilon: Number,
    y: Number,
    *,
    sqrt_y: Optional[Number] = None,
    genus: Optional[int] = None,
    branch: int = 1,
) -> HalphenElement:
    """Element from X given in the variable x."""
    eps = to_scalar(epsilon)
    X = recenter(X_x, eps)
    if sqrt_y is None:
        sqrt_y = branch * mp.sqrt(X_x(to_scalar(y)))
    return element_from_point(X, to_scalar(y) - eps, sqrt_y, epsilon=eps, genus=genus)


@dataclass(frozen=True)
class BALTriplet:
    A: Poly
    B: Poly
    C: Poly
    residuals: Dict[str, float] = field(default_factory=dict, compare=False)

    def lam(self, h: HalphenElement):
        """lambda = A_{g+1} / sqrt(p0)"""
        return self.A[h.genus + 1] / h.sqrt_p0


def _residuals(h: HalphenElement, A: Poly, B: Poly, C: Poly) -> Dict[str, float]:
    g = h.genus
    sep = A - h.sqrt_y - C * Poly.linear_factor(h.t)
    add = h.X - A * A - (B * Poly.linear_factor(h.t)).shift_up(g + 1)
    scale = max(h.X.norm(), mp.mpf(1))
    return {"halpsep": float(sep.norm() / scale), "halpadd": float(add.norm() / scale)}


def solve_bal(h: HalphenElement) -> BALTriplet:
    g = h.genus
    t = h.t
    if abs(t) < loose_tau():
        raise TAtZero("t vanishes; use the irregular t = 0 expansion", t=format_scalar(t, 10))

    S = series_sqrt(h.X, g + 1)
    low = [S[k] for k in range(g + 1)]
    head = Poly(tuple(low))
    a_top = (h.sqrt_y - head(t)) / t ** (g + 1)
    A = Poly(tuple(low) + (a_top,))

    c_scale = max(abs(h.sqrt_y), A.norm()) * max(mp.mpf(1), abs(t)) ** (g + 1)
    C = (A - h.sqrt_y).divide_linear_exact(t, scale=c_scale, what="C")

    R = h.X - A * A
    scale = max(h.X.norm(), A.norm() ** 2)
    upper, lower = R.drop_low(g + 1)
    if lower.norm() > tau() * scale:
        raise PrecisionLoss("low coefficients of X - A^2 do not vanish", residual=float(lower.norm() / scale))
    B = upper.divide_linear_exact(t, scale=scale * max(mp.mpf(1), abs(t)) ** (g + 1), what="B")

    res = _residuals(h, A, B, C)
    log.debug("bal solved", code="BAL", genus=g, t=format_scalar(t, 12), **res)
    return BALTriplet(A, B, C, res)


def solve_bal_linear(h: HalphenElement) -> BALTriplet:
    """Coefficient-matching solve, independent of the step-by-step construction.

    The unknowns A_0..A_{g+1}, C_0..C_g are fixed by one square linear system
    (A agrees with sqrt(X) below s^(g+1), and A - sqrt(Y) = C (s - t)); B then
    solves the triangular system coming from X - A^2 = B s^(g+1) (s - t).
    """
    g = h.genus
    t = h.t
    if abs(t) < loose_tau():
        raise TAtZero("t vanishes; use the irregular t = 0 expansion")
    S = series_sqrt(h.X, g + 1)
    n_a, n_c = g + 2, g + 1
    n = n_a + n_c
    M = mp.matrix(n, n)
    rhs = mp.matrix(n, 1)
    row = 0
    for k in range(g + 1):
        M[row, k] = 1
        rhs[row] = S[k]
        row += 1
    # A_k - [k == 0] sqrtY - (C_{k-1} - t C_k) = 0 for k = 0..g+1
    for k in range(g + 2):
        M[row, k] = 1
        if k - 1 >= 0:
            M[row, n_a + k - 1] = -1
        if k <= g:
            M[row, n_a + k] = t
        rhs[row] = h.sqrt_y if k == 0 else 0
        row += 1
    sol = mp.lu_solve(M, rhs)
    A = Poly(tuple(sol[k] for k in range(n_a)))
    C = Poly(tuple(sol[n_a + k] for k in range(n_c)))

    R = h.X - A * A
    # coefficient of s^(g+1+k) in B s^(g+1)(s - t) is B_{k-1} - t B_k
    nb = g + 1
    Mb = mp.matrix(nb, nb)
    rb = mp.matrix(nb, 1)
    for k in range(nb):
        Mb[k, k] = -t
        if k >= 1:
            Mb[k, k - 1] = 1
        rb[k] = R[g + 1 + k]
    bsol = mp.lu_solve(Mb, rb)
    B = Poly(tuple(bsol[k] for k in range(nb)))
    return BALTriplet(A, B, C, _residuals(h, A, B, C))


def first_remainder(h: HalphenElement, tri: BALTriplet, order: int) -> Series:
    """Q_0 = (sqrt X - sqrt Y)/(x - y) - C = B s^(g+1) / (sqrt X + A)."""
    direct = hh_series(h.X, h.t, h.sqrt_y, order) - tri.C
    res = first_remainder_residual(h, tri, order, direct)
    if res > tau() * max(mp.mpf(1), direct.norm()):
        raise PrecisionLoss("Q0 forms disagree", residual=float(res))
    return direct


def first_remainder_residual(h: HalphenElement, tri: BALTriplet, order: int, direct: Optional[Series] = None):
    direct = direct if direct is not None else hh_series(h.X, h.t, h.sqrt_y, order) - tri.C
    g = h.genus
    S = series_sqrt(h.X, order)
    other = Series.from_poly(tri.B.shift_up(g + 1), order) / (S + tri.A)
    return (direct - other).norm()
