"""Curves y^2 = x^3 + a*x + b over Q with the affine group law."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import divisors, is_perfect_power, sixth_power_free_reduce
from .errors import CurveMismatch, DomainError, SingularCurveError

# Largest possible order of a rational torsion point.
MAX_TORSION_ORDER = 12


@dataclass(frozen=True)
class CurveW:
    a: Fraction
    b: Fraction
    disc: Fraction = field(compare=False)

    def __repr__(self):
        return f"CurveW(a={self.a}, b={self.b})"

    @property
    def infinity(self) -> "Point":
        return Point(self, None, None)

    def rhs(self, x) -> Fraction:
        return x * x * x + self.a * x + self.b

    def contains(self, x, y) -> bool:
        return Fraction(y) ** 2 == self.rhs(Fraction(x))

    def point(self, x, y) -> "Point":
        x, y = Fraction(x), Fraction(y)
        if y * y != self.rhs(x):
            raise DomainError(f"({x}, {y}) is not on {self}")
        return Point(self, x, y)

    def lift_x(self, x) -> list["Point"]:
        """Rational points with the given x-coordinate."""
        x = Fraction(x)
        r = self.rhs(x)
        if r < 0:
            return []
        sn = is_perfect_power(r.numerator, 2)
        sd = is_perfect_power(r.denominator, 2)
        if sn is None or sd is None:
            return []
        y = Fraction(sn, sd)
        return [Point(self, x, y)] if y == 0 else [Point(self, x, y), Point(self, x, -y)]

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1


@dataclass(frozen=True)
class Point:
    """A rational point; x and y are both None for the point at infinity.

    Build points through ``CurveW.point`` or ``CurveW.infinity``; the group
    operations below only ever produce validated points.
    """

    curve: CurveW
    x: Optional[Fraction]
    y: Optional[Fraction]

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        return "Infinity" if self.is_infinity else f"({self.x}, {self.y})"

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return negate(self)

    def __sub__(self, other):
        return add(self, negate(other))

    def __rmul__(self, n: int):
        return scalar_mul(n, self)

    def coords(self):
        return None if self.is_infinity else (self.x, self.y)


def make_curve(a, b) -> CurveW:
    a, b = Fraction(a), Fraction(b)
    disc = -4 * a**3 - 27 * b**2
    if disc == 0:
        raise SingularCurveError(f"y^2 = x^3 + ({a})x + ({b}) is singular")
    return CurveW(a, b, disc)


def negate(P: Point) -> Point:
    if P.is_infinity:
        return P
    return Point(P.curve, P.x, -P.y)


def add(P: Point, Q: Point) -> Point:
    if P.curve != Q.curve:
        raise CurveMismatch(f"{P} and {Q} lie on different curves")
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    E = P.curve
    if P.x == Q.x:
        if P.y == -Q.y:
            return E.infinity
        s = (3 * P.x * P.x + E.a) / (2 * P.y)
        x3 = s * s - 2 * P.x
    else:
        s = (P.y - Q.y) / (P.x - Q.x)
        x3 = s * s - P.x - Q.x
    y3 = -(P.y + s * (x3 - P.x))
    return Point(E, x3, y3)


def scalar_mul(n: int, P: Point) -> Point:
    if n < 0:
        return scalar_mul(-n, negate(P))
    acc = P.curve.infinity
    base = P
    while n:
        if n & 1:
            acc = add(acc, base)
        base = add(base, base)
        n >>= 1
    return acc


def order(P: Point, bound: int = MAX_TORSION_ORDER) -> Optional[int]:
    """Order of P if it is at most ``bound``, else None."""
    Q = P
    for n in range(1, bound + 1):
        if Q.is_infinity:
            return n
        Q = add(Q, P)
    return None


def _monotone_root(f, lo: int, hi: int) -> Optional[int]:
    """Integer root of f on [lo, hi] where f is monotone there."""
    if lo > hi:
        return None
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo < 0) == (fhi < 0):
        return None
    rising = fhi > flo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == rising:
            lo = mid
        else:
            hi = mid
    return None


def _integer_roots_cubic(a: int, k: int) -> list[int]:
    """Integer roots of x^3 + a*x + k, exact bisection on monotone pieces."""
    f = lambda x: x * x * x + a * x + k
    bound = 1 + max(abs(a), abs(k))
    if a >= 0:
        pieces = [(-bound, bound)]
    else:
        # smallest integer c with 3c^2 >= -a, i.e. c >= the critical abscissa
        c = math.isqrt(-a // 3)
        while 3 * c * c < -a:
            c += 1
        pieces = [(-bound, -c), (-c + 1, c - 1), (c, bound)]
    roots = {r for lo, hi in pieces if (r := _monotone_root(f, lo, hi)) is not None}
    return sorted(roots)


def torsion_subgroup(curve: CurveW) -> list[Point]:
    """All rational points of finite order on an integral curve.

    Candidates come from the Lutz-Nagell conditions: integer coordinates with
    y = 0 or y dividing the discriminant.
    """
    if not curve.is_integral():
        raise DomainError("torsion_subgroup needs integer coefficients")
    a, b = int(curve.a), int(curve.b)
    D = int(curve.disc)
    ys = [0] + [s * d for d in divisors(D) for s in (1, -1)]
    found = [curve.infinity]
    for y in ys:
        for x in _integer_roots_cubic(a, b - y * y):
            P = curve.point(x, y)
            if order(P) is not None:
                found.append(P)
    return sort_points(found)


def sort_points(points) -> list[Point]:
    def key(P):
        return (0,) if P.is_infinity else (1, P.x, P.y)
    return sorted(set(points), key=key)


def classify_torsion_x3b(b: int) -> str:
    """Torsion type of y^2 = x^3 + b for sixth-power free b."""
    if b == 0:
        raise DomainError("b must be nonzero")
    reduced, u = sixth_power_free_reduce(b)
    if u != 1:
        raise DomainError(f"{b} is not sixth-power free; reduce it by u = {u} first")
    if b == 1:
        return "Z6"
    if is_perfect_power(b, 3) is not None:
        return "Z2"
    if is_perfect_power(b, 2) is not None or b == -432:
        return "Z3"
    return "Trivial"
