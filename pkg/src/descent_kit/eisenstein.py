"""Eisenstein integers u + v*eps, eps = (1 + sqrt(-3))/2.

The basis (1, eps) keeps every coordinate integral: sqrt(-3) = 2*eps - 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .arith import factorize
from .errors import DomainError


@dataclass(frozen=True, order=True)
class EisInt:
    u: int
    v: int

    def __repr__(self):
        return f"EisInt({self.u}, {self.v})"

    def __add__(self, o):
        o = as_eis(o)
        return EisInt(self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return EisInt(-self.u, -self.v)

    def __sub__(self, o):
        return self + (-as_eis(o))

    def __rsub__(self, o):
        return as_eis(o) - self

    def __mul__(self, o):
        o = as_eis(o)
        # eps^2 = eps - 1
        bd = self.v * o.v
        return EisInt(self.u * o.u - bd, self.u * o.v + self.v * o.u + bd)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.u or self.v)

    def conj(self) -> "EisInt":
        # conj(eps) = 1 - eps
        return EisInt(self.u + self.v, -self.v)

    def norm(self) -> int:
        return eis_norm(self)

    def complex(self) -> complex:
        return complex(self.u + self.v / 2, self.v * math.sqrt(3) / 2)


def as_eis(z) -> EisInt:
    if isinstance(z, EisInt):
        return z
    if isinstance(z, int):
        return EisInt(z, 0)
    raise TypeError(f"cannot treat {z!r} as an Eisenstein integer")


ZERO = EisInt(0, 0)
ONE = EisInt(1, 0)
EPS = EisInt(0, 1)
OMEGA = EisInt(-1, 1)
SQRT_M3 = EisInt(-1, 2)
UNITS = (ONE, EPS, OMEGA, -ONE, -EPS, -OMEGA)
# Units modulo cubes of units {1, -1}.
UNIT_CLASSES = (ONE, EPS, OMEGA)


def eis_norm(z: EisInt) -> int:
    return z.u * z.u + z.u * z.v + z.v * z.v


def _round_div(a: int, n: int) -> int:
    return (2 * a + n) // (2 * n)


def eis_divmod(a: EisInt, b: EisInt) -> tuple[EisInt, EisInt]:
    if not b:
        raise ZeroDivisionError("Eisenstein division by zero")
    n = eis_norm(b)
    num = a * b.conj()
    q0 = EisInt(_round_div(num.u, n), _round_div(num.v, n))
    best = None
    # nearest lattice point among the rounding cell's neighbours
    for du, dv in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)):
        q = EisInt(q0.u + du, q0.v + dv)
        r = a - q * b
        if best is None or eis_norm(r) < eis_norm(best[1]):
            best = (q, r)
    return best


def exact_div(a: EisInt, b: EisInt) -> EisInt | None:
    """a / b if b divides a in the ring, else None."""
    n = eis_norm(b)
    num = a * b.conj()
    if num.u % n or num.v % n:
        return None
    return EisInt(num.u // n, num.v // n)


def divides(b: EisInt, a: EisInt) -> bool:
    return exact_div(a, b) is not None


def canonical(z: EisInt) -> EisInt:
    """The associate with u > 0 and v >= 0 (a fixed 60-degree sector)."""
    if not z:
        return z
    for w in UNITS:
        c = z * w
        if c.u > 0 and c.v >= 0:
            return c
    raise AssertionError("unreachable: every nonzero element has a sector associate")


def eis_gcd(a: EisInt, b: EisInt) -> EisInt:
    if not a and not b:
        raise DomainError("gcd(0, 0) is undefined")
    while b:
        a, b = b, eis_divmod(a, b)[1]
    return canonical(a)


def _split_prime(p: int) -> EisInt:
    """A canonical Eisenstein prime of norm p, for p = 3 or p = 1 mod 3."""
    for u in range(1, math.isqrt(p) + 2):
        # v^2 + u v + u^2 - p = 0
        disc = 4 * p - 3 * u * u
        if disc < 0:
            break
        r = math.isqrt(disc)
        if r * r == disc and (r - u) % 2 == 0:
            v = (r - u) // 2
            if v >= 0:
                return canonical(EisInt(u, v))
    raise AssertionError(f"no element of norm {p}")


def eis_factor(z: EisInt) -> tuple[EisInt, list[tuple[EisInt, int]]]:
    """(unit, [(prime, exponent), ...]) with primes canonical and sorted."""
    if not z:
        raise DomainError("cannot factor 0")
    rest = z
    out: list[tuple[EisInt, int]] = []
    for p, e in factorize(eis_norm(z)).factors:
        if p % 3 == 2:
            primes = [EisInt(p, 0)]
        elif p == 3:
            primes = [canonical(SQRT_M3)]
        else:
            pi = _split_prime(p)
            primes = [pi, canonical(pi.conj())]
        for pi in primes:
            k = 0
            while (q := exact_div(rest, pi)) is not None:
                rest = q
                k += 1
            if k:
                out.append((pi, k))
    assert rest in UNITS, rest
    return rest, sorted(out)


@dataclass(frozen=True, order=True)
class EisClass:
    """eta * A * B^2 modulo cubes; eta in {1, eps, omega}, A and B canonical."""

    eta: EisInt
    A: EisInt
    B: EisInt

    def value(self) -> EisInt:
        return self.eta * self.A * self.B * self.B

    def __mul__(self, other: "EisClass") -> "EisClass":
        return eis_cubeclass(self.value() * other.value())

    def inverse(self) -> "EisClass":
        v = self.value()
        return eis_cubeclass(v * v)

    def is_identity(self) -> bool:
        return self == IDENTITY_CLASS


IDENTITY_CLASS = EisClass(ONE, ONE, ONE)


def eis_cubeclass(z: Union[EisInt, tuple[EisInt, EisInt]]) -> EisClass:
    """Canonical class modulo cubes of a nonzero element or a ratio (num, den)."""
    if isinstance(z, tuple):
        num, den = z
        if not den:
            raise ZeroDivisionError("zero denominator")
        z = num * den * den
    if not z:
        raise DomainError("0 has no cube class")
    unit, fac = eis_factor(z)
    A = B = C = ONE
    for pi, e in fac:
        if e % 3 == 1:
            A = A * pi
        elif e % 3 == 2:
            B = B * pi
        C = C * pi ** (e // 3)
    A, B = canonical(A), canonical(B)
    eta = exact_div(z, A * B * B * C ** 3)
    assert eta in UNITS
    if eta not in UNIT_CLASSES:
        eta = -eta
    return EisClass(eta, A, B)


def rational_to_eis_ratio(u: Fraction, v: Fraction) -> tuple[EisInt, int]:
    """Write u + v*sqrt(-3) (u, v rational) as an integral element over a positive integer."""
    u, v = Fraction(u), Fraction(v)
    d = math.lcm(u.denominator, v.denominator)
    U, V = int(u * d), int(v * d)
    # U + V*(2 eps - 1)
    return EisInt(U - V, 2 * V), d
