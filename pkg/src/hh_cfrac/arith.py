"""Arbitrary-precision scalar, polynomial and truncated power-series arithmetic.

Scalars are `mpmath.mpc` values at the global working precision `mp.prec`.
Polynomials and series are dense, immutable and indexed by ascending powers of
the local variable s = x - epsilon.

Zero tests are relative: ``z ~ 0`` iff ``|z| <= tol * scale`` where the default
``tol`` is 2^(-P/2) (see :func:`tau`).
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

from mpmath import mp

from .errors import DegreeZero, MalformedInput, PrecisionLoss, SqrtAtRoot, TAtZero
from .log_utils import get_logger

log = get_logger(__name__)

Number = Union[int, float, complex, str, "mp.mpf", "mp.mpc"]


# ---------------------------------------------------------------------------
# Scalars and tolerances
# ---------------------------------------------------------------------------


def to_scalar(value: Number):
    if isinstance(value, str):
        return parse_scalar(value)
    return mp.mpc(value)


def tau():
    """Arithmetic floor 2^(-P/2)."""
    return mp.ldexp(mp.mpf(1), -(mp.prec // 2))


def loose_tau():
    """Detection tolerance 2^(-P/4), used for matching and irregular thresholds."""
    return mp.ldexp(mp.mpf(1), -(mp.prec // 4))


def tight_tau():
    """Criterion tolerance 2^(-3P/4)."""
    return mp.ldexp(mp.mpf(1), -((3 * mp.prec) // 4))


def is_zero(z, scale=1, tol=None) -> bool:
    tol = tau() if tol is None else tol
    return abs(z) <= tol * scale


def close(a, b, tol=None) -> bool:
    """Relative comparison against max(1, |a|, |b|)."""
    tol = tau() if tol is None else tol
    return abs(a - b) <= tol * max(mp.mpf(1), abs(a), abs(b))


@contextmanager
def working_precision(bits: int) -> Iterator[None]:
    with mp.workprec(bits):
        yield


def _split_complex(text: str) -> Tuple[str, str]:
    body = text[:-1]
    pos = -1
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE":
            pos = i
            break
    if pos == -1:
        return "", body
    return body[:pos], body[pos:]


def parse_scalar(text: str):
    """Parse "re", "re+im i", "re-im i", "im i" (``j`` is accepted for ``i``)."""
    raw = text.strip().replace(" ", "")
    if not raw:
        raise MalformedInput(f"empty scalar string {text!r}")
    try:
        if raw[-1] in "ij":
            re_part, im_part = _split_complex(raw)
            if im_part in ("", "+"):
                im_part = "1"
            elif im_part == "-":
                im_part = "-1"
            re_val = mp.mpf(re_part) if re_part else mp.mpf(0)
            return mp.mpc(re_val, mp.mpf(im_part))
        return mp.mpc(mp.mpf(raw), 0)
    except (ValueError, TypeError) as exc:
        raise MalformedInput(f"malformed scalar {text!r}") from exc


def format_scalar(z, digits: int | None = None) -> str:
    """Decimal rendering "re" or "re+im i" with `digits` significant digits."""
    digits = digits or mp.dps
    z = mp.mpc(z)
    re_s = mp.nstr(z.real, digits)
    if z.imag == 0:
        return re_s
    im_s = mp.nstr(abs(z.imag), digits)
    sign = "-" if z.imag < 0 else "+"
    return f"{re_s}{sign}{im_s}i"


def format_residual(x) -> float:
    return float(abs(x))


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Dense polynomial, ascending powers. ``len(coeffs) - 1`` is the nominal degree."""

    coeffs: Tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(mp.mpc(c) for c in self.coeffs))

    @classmethod
    def of(cls, *coeffs: Number) -> "Poly":
        return cls(tuple(to_scalar(c) for c in coeffs))

    @classmethod
    def zero(cls) -> "Poly":
        return cls((0,))

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "Poly":
        return cls((0,) * k + (to_scalar(c),))

    @classmethod
    def linear_factor(cls, r) -> "Poly":
        """s - r"""
        return cls((-mp.mpc(r), 1))

    @property
    def nominal_degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return mp.mpc(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def norm(self):
        return max((abs(c) for c in self.coeffs), default=mp.mpf(0))

    def degree(self, tol=None) -> int:
        """Largest index whose coefficient exceeds ``tol * norm``; -1 for the zero polynomial."""
        n = self.norm()
        if n == 0:
            return -1
        tol = tau() if tol is None else tol
        for k in range(len(self.coeffs) - 1, -1, -1):
            if abs(self.coeffs[k]) > tol * n:
                return k
        return -1

    def trimmed(self, tol=None) -> "Poly":
        d = self.degree(tol)
        return Poly(self.coeffs[: max(d, 0) + 1])

    def padded(self, length: int) -> "Poly":
        if len(self.coeffs) >= length:
            return self
        return Poly(self.coeffs + (mp.mpc(0),) * (length - len(self.coeffs)))

    def __call__(self, x):
        acc = mp.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self), len(other))
        return Poly(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = mp.mpc(other)
            return Poly(tuple(c * a for a in self.coeffs))
        out = [mp.mpc(0)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly((1,))
        for _ in range(k):
            out = out * self
        return out

    def shift_up(self, k: int) -> "Poly":
        """Multiply by s^k."""
        return Poly((0,) * k + self.coeffs)

    def drop_low(self, k: int) -> Tuple["Poly", "Poly"]:
        """Divide by s^k; returns (quotient, discarded low part)."""
        return Poly(self.coeffs[k:] or (0,)), Poly(self.coeffs[:k] or (0,))

    def truncated(self, n: int) -> "Poly":
        """Keep coefficients of s^0 .. s^(n-1)."""
        return Poly(self.coeffs[:n] or (0,))

    def deriv(self) -> "Poly":
        if len(self) <= 1:
            return Poly.zero()
        return Poly(tuple(k * self.coeffs[k] for k in range(1, len(self))))

    def divide_linear(self, r) -> Tuple["Poly", object]:
        """Synthetic division by (s - r): returns (quotient, remainder)."""
        if len(self) == 1:
            return Poly.zero(), self.coeffs[0]
        n = len(self) - 1
        q = [mp.mpc(0)] * n
        acc = self.coeffs[n]
        for k in range(n - 1, -1, -1):
            q[k] = acc
            acc = self.coeffs[k] + acc * r
        return Poly(tuple(q)), acc

    def divide_linear_exact(self, r, scale=None, what: str = "division") -> "Poly":
        q, rem = self.divide_linear(r)
        scale = scale if scale is not None else self.norm() * max(mp.mpf(1), abs(r)) ** max(len(self) - 1, 0)
        if not is_zero(rem, scale if scale else 1):
            raise PrecisionLoss(f"{what}: remainder {mp.nstr(abs(rem), 5)} not negligible")
        return q

    def to_strings(self) -> List[str]:
        return [format_scalar(c) for c in self.coeffs]


def _as_poly(value) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly((mp.mpc(value),))


def power_sum_poly(t, k: int) -> Poly:
    """h_k(s, t) = s^k + s^(k-1) t + ... + t^k as a polynomial in s."""
    if k < 0:
        return Poly.zero()
    return Poly(tuple(mp.mpc(t) ** (k - j) for j in range(k + 1)))


def recenter(X: Poly, epsilon) -> Poly:
    """Return X' with X'(s) = X(s + epsilon) (Ruffini-Horner Taylor shift)."""
    eps = mp.mpc(epsilon)
    c = list(X.coeffs)
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += eps * c[j + 1]
    return Poly(tuple(c))


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Series:
    """Truncated power series: coefficients of s^0 .. s^(order-1)."""

    coeffs: Tuple
    order: int

    def __post_init__(self) -> None:
        cs = tuple(mp.mpc(c) for c in self.coeffs[: self.order])
        cs = cs + (mp.mpc(0),) * (self.order - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_poly(cls, p: Poly, order: int) -> "Series":
        return cls(p.coeffs[:order], order)

    @classmethod
    def constant(cls, c, order: int) -> "Series":
        return cls((c,), order)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < self.order else mp.mpc(0)

    def norm(self):
        return max((abs(c) for c in self.coeffs), default=mp.mpf(0))

    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            return other
        if isinstance(other, Poly):
            return Series.from_poly(other, self.order)
        return Series.constant(other, self.order)

    def __add__(self, other) -> "Series":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return Series(tuple(self[k] + other[k] for k in range(n)), n)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other) -> "Series":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Series":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Series":
        if not isinstance(other, (Series, Poly)):
            c = mp.mpc(other)
            return Series(tuple(c * a for a in self.coeffs), self.order)
        other = self._coerce(other)
        n = min(self.order, other.order)
        out = [mp.mpc(0)] * n
        for i in range(n):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(n - i):
                out[i + j] += a * other.coeffs[j]
        return Series(tuple(out), n)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        c0 = self.coeffs[0]
        if is_zero(c0, max(self.norm(), mp.mpf(1))):
            raise PrecisionLoss("series inverse: constant term vanishes")
        out = [mp.mpc(0)] * self.order
        out[0] = 1 / c0
        for n in range(1, self.order):
            acc = mp.mpc(0)
            for k in range(1, n + 1):
                acc += self.coeffs[k] * out[n - k]
            out[n] = -acc / c0
        return Series(tuple(out), self.order)

    def __truediv__(self, other) -> "Series":
        if not isinstance(other, (Series, Poly)):
            return self * (1 / mp.mpc(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "Series":
        return self._coerce(other) * self.inverse()

    def truncate(self, order: int) -> "Series":
        return Series(self.coeffs[:order], min(order, self.order))

    def to_poly(self) -> Poly:
        return Poly(self.coeffs)


def series_sqrt(X: Poly, order: int) -> Series:
    """Principal square root of X as a series in s.

    The constant term is the principal sqrt(p0) (argument in (-pi/2, pi/2]).
    """
    p0 = X[0]
    if is_zero(p0, X.norm()):
        raise SqrtAtRoot("X vanishes at the expansion centre; move epsilon", p0=format_scalar(p0, 10))
    s = [mp.mpc(0)] * order
    s[0] = mp.sqrt(p0)
    two_s0 = 2 * s[0]
    for n in range(1, order):
        acc = X[n]
        for k in range(1, n):
            acc -= s[k] * s[n - k]
        s[n] = acc / two_s0
    return Series(tuple(s), order)


def hh_series(X: Poly, t, sqrt_y, order: int) -> Series:
    """Series of (sqrt(X) - sqrt(Y)) / (s - t) about s = 0."""
    t = mp.mpc(t)
    if abs(t) < loose_tau():
        raise TAtZero("y coincides with the expansion centre", t=format_scalar(t, 10))
    sqrt_x = series_sqrt(X, order)
    return (sqrt_x - sqrt_y) / Poly.linear_factor(t)


# ---------------------------------------------------------------------------
# Roots, resultants, interpolation
# ---------------------------------------------------------------------------


def _canonical_key(r, quantum):
    mag = mp.nint(abs(r) / quantum)
    return (mag, mp.arg(r))


def _clean(r, tol):
    scale = max(mp.mpf(1), abs(r))
    re, im = r.real, r.imag
    if abs(im) <= tol * scale:
        im = mp.mpf(0)
    if abs(re) <= tol * scale:
        re = mp.mpf(0)
    return mp.mpc(re, im)


def sort_canonical(values: Iterable) -> List:
    vals = list(values)
    if not vals:
        return vals
    quantum = loose_tau() * max(mp.mpf(1), max(abs(v) for v in vals))
    return sorted(vals, key=lambda r: _canonical_key(r, quantum))


def _polish(coeffs_desc: Sequence, r, steps: int = 3):
    p = Poly(tuple(reversed(coeffs_desc)))
    dp = p.deriv()
    for _ in range(steps):
        d = dp(r)
        if d == 0:
            break
        step = p(r) / d
        r = r - step
        if abs(step) <= mp.eps * max(mp.mpf(1), abs(r)):
            break
    return r


def poly_roots(B: Poly) -> List:
    """All deg(B) roots with multiplicity, certified by their residual, in canonical order."""
    d = B.degree()
    if d < 1:
        raise DegreeZero("polynomial is numerically constant")
    coeffs_desc = list(reversed(B.coeffs[: d + 1]))
    if d == 1:
        roots = [-coeffs_desc[1] / coeffs_desc[0]]
    elif d == 2:
        a, b, c = coeffs_desc
        disc = mp.sqrt(b * b - 4 * a * c)
        # pick the sign that avoids cancellation
        q = -(b + disc) / 2 if abs(b + disc) >= abs(b - disc) else -(b - disc) / 2
        if q == 0:
            roots = [mp.mpc(0), mp.mpc(0)]
        else:
            roots = [q / a, c / q]
    else:
        roots = None
        for maxsteps in (50 + 20 * d, 400, 2000):
            try:
                roots = mp.polyroots(coeffs_desc, maxsteps=maxsteps, extraprec=mp.prec, cleanup=True)
                break
            except mp.NoConvergence:
                log.debug("polyroots did not converge", code="RootRetry", maxsteps=maxsteps, degree=d)
        if roots is None:
            raise PrecisionLoss("root finding did not converge", degree=d)
        roots = [_polish(coeffs_desc, mp.mpc(r)) for r in roots]

    roots = [_clean(mp.mpc(r), tau()) for r in roots]
    norm = B.norm()
    for r in roots:
        bound = tau() * norm * max(mp.mpf(1), abs(r)) ** d
        if abs(B(r)) > bound:
            raise PrecisionLoss("root residual above certification bound", root=format_scalar(r, 10))
    return sort_canonical(roots)


def sylvester_resultant(f: Poly, g: Poly, df: int | None = None, dg: int | None = None):
    """Res(f, g) as the Sylvester determinant with formal degrees df, dg."""
    m = f.nominal_degree if df is None else df
    n = g.nominal_degree if dg is None else dg
    size = m + n
    if size == 0:
        return mp.mpc(1)
    M = mp.matrix(size, size)
    fd = [f[m - k] for k in range(m + 1)]
    gd = [g[n - k] for k in range(n + 1)]
    for i in range(n):
        for k, c in enumerate(fd):
            M[i, i + k] = c
    for i in range(m):
        for k, c in enumerate(gd):
            M[n + i, i + k] = c
    return mp.det(M)


def interpolate(points: Sequence, values: Sequence) -> Poly:
    """Polynomial of degree len(points)-1 through the given samples."""
    n = len(points)
    V = mp.matrix(n, n)
    for i, x in enumerate(points):
        xp = mp.mpc(1)
        for j in range(n):
            V[i, j] = xp
            xp *= x
    sol = mp.lu_solve(V, mp.matrix([mp.mpc(v) for v in values]))
    return Poly(tuple(sol[j] for j in range(n)))


def sample_circle(n: int, radius=None) -> List:
    """n rotated points on a circle; the rotation keeps them off real/imaginary axes."""
    radius = mp.mpf(1) if radius is None else radius
    phase = mp.mpf("0.3183098861837906715377675")
    return [radius * mp.expjpi(2 * mp.mpf(k) / n + phase) for k in range(n)]


def cluster_distinct(values: Sequence, tol=None) -> List:
    """Deterministic representatives of ``values`` up to relative tolerance ``tol``.

    Values are swept in order of real part; each joins the first earlier
    representative within tolerance.
    """
    tol = loose_tau() if tol is None else tol
    ordered = sorted((mp.mpc(v) for v in values), key=lambda z: (z.real, z.imag))
    reps: List = []
    window: List = []
    for z in ordered:
        thresh = tol * max(mp.mpf(1), abs(z))
        window = [w for w in window if z.real - w.real <= 2 * thresh]
        if any(abs(z - w) <= thresh for w in window):
            continue
        reps.append(z)
        window.append(z)
    return reps


def root_multiplicities(roots: Sequence, tol=None) -> List[int]:
    """Cluster size of each root (its multiplicity estimate)."""
    tol = loose_tau() if tol is None else tol
    return [sum(1 for s in roots if abs(r - s) <= tol * max(mp.mpf(1), abs(r))) for r in roots]
