"""Exact arithmetic helpers: integer roots, rational intervals, root-sum comparisons.

Every inequality of the form u^(1/d) >= v^(1/d) + w^(1/d) is decided here
without floating point.  Equality is detected algebraically: by the linear
independence of real radicals over Q (Besicovitch), the identity
u^(1/d) = v^(1/d) + w^(1/d) with u, v, w > 0 forces v/u and w/u to be d-th
powers of rationals.  Every other case is a strict inequality, so bisection
on dyadic brackets terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

REPORT_PRECISION = Fraction(1, 10**6)


def iroot(x: int, d: int) -> int:
    """Floor of the real d-th root of a non-negative integer."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if d < 1:
        raise ValueError("root degree must be positive")
    if d == 1 or x < 2:
        return x
    if d == 2:
        return isqrt(x)
    # Newton from above; the initial guess is a power of two >= the root.
    r = 1 << -(-x.bit_length() // d)
    while True:
        s = ((d - 1) * r + x // r ** (d - 1)) // d
        if s >= r:
            break
        r = s
    while r**d > x:
        r -= 1
    while (r + 1) ** d <= x:
        r += 1
    return r


def rational_root(q, d: int) -> Fraction | None:
    """Exact d-th root of a non-negative rational, or None if it is irrational."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    p, s = q.numerator, q.denominator
    rp, rs = iroot(p, d), iroot(s, d)
    if rp**d == p and rs**d == s:
        return Fraction(rp, rs)
    return None


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        products = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _as_interval(other) / self

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi)}


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def root_interval(q, d: int, bits: int) -> Interval:
    """Bracket q^(1/d) by dyadic rationals of denominator 2**bits.

    Exact roots come back as point intervals.
    """
    q = Fraction(q)
    exact = rational_root(q, d)
    if exact is not None:
        return Interval.point(exact)
    scale = 1 << bits
    n = (q.numerator << (d * bits)) // q.denominator
    r = iroot(n, d)
    return Interval(Fraction(r, scale), Fraction(r + 1, scale))


def root_to_precision(q, d: int, precision=REPORT_PRECISION) -> Interval:
    bits = max(8, (1 / Fraction(precision)).__ceil__().bit_length() + 1)
    return root_interval(q, d, bits)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def compare_root_sum(u, v, w, d: int) -> int:
    """Sign of u^(1/d) - v^(1/d) - w^(1/d) for non-negative rationals, exactly."""
    u, v, w = Fraction(u), Fraction(v), Fraction(w)
    if min(u, v, w) < 0:
        raise ValueError("root comparison needs non-negative arguments")
    if d < 1:
        raise ValueError("root degree must be positive")
    if d == 1:
        return _sign(u - v - w)
    if v == 0 or w == 0:
        return _sign(u - (v + w))
    if u == 0:
        return -1
    rv, rw = rational_root(v / u, d), rational_root(w / u, d)
    if rv is not None and rw is not None:
        return _sign(1 - rv - rw)
    # Not an identity, hence strict; refine until the brackets separate.
    bits = 32
    while True:
        lhs = root_interval(u, d, bits)
        rhs = root_interval(v, d, bits) + root_interval(w, d, bits)
        if lhs.lo > rhs.hi:
            return 1
        if lhs.hi < rhs.lo:
            return -1
        bits *= 2


def int_det(rows) -> int:
    """Determinant of a square integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    if any(len(r) != n for r in m):
        raise ValueError("matrix is not square")
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def int_rank(rows) -> int:
    """Rank over Q of an integer matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def affine_rank(points) -> int:
    pts = [tuple(p) for p in points]
    if not pts:
        return -1
    base = pts[0]
    return int_rank([[a - b for a, b in zip(p, base)] for p in pts[1:]])


def fraction_str(x) -> str:
    return str(Fraction(x))
