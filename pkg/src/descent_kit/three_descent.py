"""3-descent on y^2 = x^3 + e^2 and its 3-isogenous partner y~^2 = x~^3 - 27 e^2.

Rational-side classes live in Q*/Q*^3 as pairs (A, B) meaning A*B^2; the
partner curve's classes live in K*/K*^3 for K = Q(sqrt(-3)), see
``eisenstein``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .arith import cube_class, cubefree_decompose, factorize, is_perfect_power, squarefree_divisors
from .eisenstein import (
    IDENTITY_CLASS,
    ONE,
    SQRT_M3,
    UNIT_CLASSES,
    EisClass,
    EisInt,
    canonical,
    eis_cubeclass,
    eis_norm,
    exact_div,
)
from .errors import DomainError
from .status import ClassStatus, ProvedIn, ProvedOut, RankBounds, Unknown, finish_statuses, ilog
from .weierstrass import CurveW, Point, make_curve, torsion_subgroup

SEARCH_BOUND = 200
LOCAL_BOUND = 121
# Norm-ball radius (squared) for the Eisenstein-side search; the search is
# quadratic in the ball size, so this stays far below SEARCH_BOUND.
EIS_SEARCH_BOUND = 60
# Cap on the residue ring size Z[eps]/m for inert and ramified primes.
EIS_RING_CAP = 729

CubeClass = tuple[int, int]
IDENTITY: CubeClass = (1, 1)


@dataclass(frozen=True)
class EPair:
    e: int
    E: CurveW
    Etilde: CurveW

    @property
    def P0_plus(self) -> Point:
        return self.E.point(0, self.e)

    @property
    def P0_minus(self) -> Point:
        return self.E.point(0, -self.e)


def make_e_pair(e: int) -> EPair:
    e = int(e)
    if e <= 1:
        raise DomainError(f"e must exceed 1 (got {e}); reduce the curve with classify_curve first")
    if cubefree_decompose(e)[2] != 1:
        raise DomainError(f"e = {e} is not cube-free; reduce the curve with classify_curve first")
    return EPair(e, make_curve(0, e * e), make_curve(0, -27 * e * e))


def psi3(pair: EPair, P: Point) -> Point:
    if P.curve != pair.E:
        raise DomainError("point is not on E")
    if P.is_infinity or P.x == 0:
        return pair.Etilde.infinity
    e2, x, y = pair.e**2, P.x, P.y
    x3 = x**3
    return pair.Etilde.point((x3 + 4 * e2) / (x * x), y * (x3 - 8 * e2) / x3)


def psi3_tilde(pair: EPair, P: Point) -> Point:
    if P.curve != pair.Etilde:
        raise DomainError("point is not on the associated curve")
    if P.is_infinity:
        return pair.E.infinity
    e2, x, y = pair.e**2, P.x, P.y
    x3 = x**3
    return pair.E.point((x3 - 108 * e2) / (9 * x * x), y * (x3 + 216 * e2) / (27 * x3))


# -- rational side -----------------------------------------------------------

def cube_mul(s: CubeClass, t: CubeClass) -> CubeClass:
    return cube_class(s[0] * s[1] ** 2 * t[0] * t[1] ** 2)


def cube_inv(s: CubeClass) -> CubeClass:
    return (s[1], s[0])


def alpha3(pair: EPair, P: Point, sign: str = "minus") -> CubeClass:
    """Cube class of y - e (minus) or y + e (plus)."""
    if P.curve != pair.E:
        raise DomainError("point is not on E")
    if P.is_infinity:
        return IDENTITY
    e = pair.e
    if sign == "minus":
        v = Fraction(1, 2 * e) if P.y == e else P.y - e
    elif sign == "plus":
        v = Fraction(-1, 2 * e) if P.y == -e else P.y + e
    else:
        raise DomainError(f"sign must be 'minus' or 'plus', not {sign!r}")
    # Classes come from divisors of 2e; a cube test per candidate avoids
    # factoring the numerator of a tall point.
    for A, B in enum_pairs(e):
        r = v / (A * B * B)
        if is_perfect_power(r.numerator, 3) is not None and is_perfect_power(r.denominator, 3) is not None:
            return (A, B)
    return cube_class(v)


def enum_pairs(e: int) -> list[CubeClass]:
    divs = squarefree_divisors(2 * e)
    pairs = [(A, B) for A in divs for B in divs if math.gcd(A, B) == 1]
    return sorted(pairs, key=lambda p: (p[0] * p[1], p))


@dataclass(frozen=True)
class HomSpace3:
    """(A B^2) X^3 + (A^2 B) Y^3 + (2e) Z^3 = 0."""

    A: int
    B: int
    e: int

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return self.A * self.B**2, self.A**2 * self.B, 2 * self.e


def _cube_tables(m: int, p: int):
    """Cube residues mod m split by whether the base is divisible by p."""
    unit, nonunit = set(), set()
    for t in range(m):
        (nonunit if t % p == 0 else unit).add(pow(t, 3, m))
    return unit, nonunit


def _residue_obstruction(coeffs, m: int, tables) -> bool:
    """True if k1 X^3 + k2 Y^3 + k3 Z^3 = 0 has no primitive solution mod m.

    tables = (unit, nonunit) cube sets in the residue ring; ring elements are
    whatever the caller uses, with ``mul``/``add``/``neg`` given as the first
    entries of coeffs for generic rings.
    """
    k1, k2, k3 = coeffs
    unit, nonunit = tables
    tagged = [(c, True) for c in unit] + [(c, False) for c in nonunit]
    zu = {k3 * c % m for c in unit}
    zn = {k3 * c % m for c in nonunit}
    for a, ua in tagged:
        ka = k1 * a
        for b, ub in tagged:
            need = -(ka + k2 * b) % m
            if need in zu or ((ua or ub) and need in zn):
                return False
    return True


def _local_moduli(e: int, local_bound: int):
    primes = sorted({3} | {p for p, _ in factorize(2 * e).factors})
    for p in primes:
        m = p
        while m <= local_bound:
            yield p, m
            m *= p


def rational_local_obstruction(space: HomSpace3, local_bound: int = LOCAL_BOUND):
    for p, m in _local_moduli(space.e, local_bound):
        if _residue_obstruction(space.coeffs, m, _cube_tables_cached(m, p)):
            return p, m
    return None


@lru_cache(maxsize=None)
def _cube_tables_cached(m: int, p: int):
    return _cube_tables(m, p)


def reconstruct(space: HomSpace3, X: int, Y: int, Z: int) -> Point | None:
    """The point of E carried by a solution with X, Y, Z all nonzero."""
    pair = make_e_pair(space.e)
    A, B, e = space.A, space.B, space.e
    s = A * B * B * (-X) ** 3
    q = -Z
    m = -A * B * X * Y
    n = s + e * q**3
    return pair.E.point(Fraction(m, q * q), Fraction(n, q**3))


def _special_point(pair: EPair, X: int, Y: int, Z: int) -> Point:
    if Z == 0:
        return pair.E.infinity
    if X == 0:
        return pair.P0_plus
    return pair.P0_minus


def search_homcubic(space: HomSpace3, search_bound: int):
    k1, k2, k3 = space.coeffs
    for Z in range(0, search_bound + 1):
        for X in range(-search_bound, search_bound + 1):
            if X == 0 and Z == 0:
                continue
            T = -(k1 * X**3 + k3 * Z**3)
            if T % k2:
                continue
            Y = is_perfect_power(T // k2, 3)
            if Y is None or math.gcd(math.gcd(X, Y), Z) != 1:
                continue
            return X, Y, Z
    return None


def solve_homcubic(space: HomSpace3, search_bound: int = SEARCH_BOUND, local_bound: int = LOCAL_BOUND) -> ClassStatus:
    cls = (space.A, space.B)
    pair = make_e_pair(space.e)
    obstruction = rational_local_obstruction(space, local_bound)
    if obstruction is not None:
        return ClassStatus(cls, ProvedOut("local", *obstruction))
    sol = search_homcubic(space, search_bound)
    if sol is None:
        return ClassStatus(cls, Unknown())
    X, Y, Z = sol
    if X and Y and Z:
        P = reconstruct(space, X, Y, Z)
    else:
        P = _special_point(pair, X, Y, Z)
    got = alpha3(pair, P)
    assert got == cls, f"witness {sol} reconstructs {P} of class {got}, expected {cls}"
    return ClassStatus(cls, ProvedIn("search", P.coords(), sol))


# -- Eisenstein side ---------------------------------------------------------

def _eis_of_rational(y: Fraction, e: int, sign: int) -> EisInt:
    """An integral element in the cube class of y + sign * 3 sqrt(-3) e."""
    p, q = y.numerator, y.denominator
    # (p + sign*3e*q*sqrt(-3)) / q, times q^3 to clear the denominator by a cube
    z = EisInt(p, 0) + SQRT_M3 * (sign * 3 * e * q)
    return z * (q * q)


def alpha3_tilde(pair: EPair, P: Point, sign: str = "minus") -> EisClass:
    if P.curve != pair.Etilde:
        raise DomainError("point is not on the associated curve")
    if P.is_infinity:
        return IDENTITY_CLASS
    if sign not in ("minus", "plus"):
        raise DomainError(f"sign must be 'minus' or 'plus', not {sign!r}")
    z = _eis_of_rational(P.y, pair.e, -1 if sign == "minus" else 1)
    for cls in _norm_cube_classes(pair.e):
        # z / v is a cube exactly when z * v^2 is
        v = cls.value()
        if eis_cube_root(z * v * v) is not None:
            return cls
    return eis_cubeclass(z)


@lru_cache(maxsize=None)
def _norm_cube_classes(e: int) -> tuple[EisClass, ...]:
    return tuple(c for c in enum_eis_classes(e) if norm_is_cube(c))


def eis_primes_of(e: int) -> list[EisInt]:
    from .eisenstein import eis_factor

    _, fac = eis_factor(EisInt(6 * e, 0) * SQRT_M3)
    return [pi for pi, _ in fac]


def enum_eis_classes(e: int) -> list[EisClass]:
    primes = eis_primes_of(e)
    out = set()
    for exps in itertools.product((0, 1, 2), repeat=len(primes)):
        A = B = ONE
        for pi, k in zip(primes, exps):
            if k == 1:
                A = A * pi
            elif k == 2:
                B = B * pi
        for eta in UNIT_CLASSES:
            out.add(EisClass(eta, canonical(A), canonical(B)))
    return sorted(out, key=lambda c: (eis_norm(c.A) * eis_norm(c.B), c))


def norm_is_cube(cls: EisClass) -> bool:
    # y~^2 + 27 e^2 = x~^3: the class times its conjugate is trivial
    return is_perfect_power(eis_norm(cls.value()), 3) is not None


@dataclass(frozen=True)
class EisHomSpace3:
    """(eta A B^2) X^3 + (eta^-1 A^2 B) Y^3 + (6 sqrt(-3) e) Z^3 = 0."""

    cls: EisClass
    e: int

    @property
    def coeffs(self) -> tuple[EisInt, EisInt, EisInt]:
        c = self.cls
        eta_inv = exact_div(ONE, c.eta)
        return c.eta * c.A * c.B * c.B, eta_inv * c.A * c.A * c.B, SQRT_M3 * (6 * self.e)


def norm_ball(bound: int) -> list[EisInt]:
    r = math.isqrt(4 * bound // 3) + 1
    pts = [EisInt(u, v) for u in range(-r - 1, r + 2) for v in range(-r - 1, r + 2)]
    return sorted((z for z in pts if eis_norm(z) <= bound), key=lambda z: (eis_norm(z), z))


def _approx_roots(z: EisInt) -> list[tuple[int, int]]:
    """Lattice points nearest to the three complex cube roots of z."""
    n = eis_norm(z)
    if n < 1 << 100:
        c = z.complex()
        r = abs(c) ** (1 / 3)
        base = cmath.phase(c) / 3
        s3 = math.sqrt(3)
        out = []
        for k in range(3):
            w = cmath.rect(r, base + 2 * math.pi * k / 3)
            v0 = round(2 * w.imag / s3)
            out.append((round(w.real - v0 / 2), v0))
        return out
    # |root| = n^(1/6), so about log10(n) / 6 digits plus a margin suffice
    with mpmath.workdps(n.bit_length() // 19 + 30):
        s3 = mpmath.sqrt(3)
        root = mpmath.cbrt(mpmath.mpc(z.u + mpmath.mpf(z.v) / 2, z.v * s3 / 2))
        w3 = mpmath.exp(2j * mpmath.pi / 3)
        out = []
        for k in range(3):
            w = root * w3**k
            v0 = int(mpmath.nint(2 * w.imag / s3))
            out.append((int(mpmath.nint(w.real - mpmath.mpf(v0) / 2)), v0))
        return out


def eis_cube_root(z: EisInt) -> EisInt | None:
    """w with w^3 = z, if one exists; exact, the floating seed is only rounded and checked."""
    if not z:
        return z
    if is_perfect_power(eis_norm(z), 3) is None:
        return None
    for u0, v0 in _approx_roots(z):
        for du in (-1, 0, 1):
            for dv in (-1, 0, 1):
                cand = EisInt(u0 + du, v0 + dv)
                if cand * cand * cand == z:
                    return cand
    return None


def _rational_part(num: EisInt, den: int):
    """num / den as a Fraction when the eps-coordinate vanishes, else None."""
    if num.v != 0:
        return None
    return Fraction(num.u, den)


def reconstruct_eis(space: EisHomSpace3, X: EisInt, Y: EisInt, Z: EisInt) -> Point | None:
    """Rational point of the associated curve carried by a solution, or None."""
    c = space.cls
    pair = make_e_pair(space.e)
    nz = eis_norm(Z)
    zc = Z.conj()
    x = _rational_part(-(c.A * c.B * X * Y) * zc * zc, nz * nz)
    if x is None:
        return None
    k1 = c.eta * c.A * c.B * c.B
    y = _rational_part(k1 * X**3 * zc**3 + SQRT_M3 * (3 * space.e * nz**3), nz**3)
    if y is None or not pair.Etilde.contains(x, y):
        return None
    return pair.Etilde.point(x, y)


def search_eis_homcubic(space: EisHomSpace3, search_bound: int):
    """First solution with Z != 0 giving a rational point, as (X, Y, Z, point)."""
    k1, k2, k3 = space.coeffs
    ball = norm_ball(search_bound)
    zs = [z for z in ball if z and canonical(z) == z]
    for Z in zs:
        kz = k3 * Z**3
        for X in ball:
            T = -(k1 * X**3 + kz)
            Y3 = exact_div(T, k2)
            if Y3 is None:
                continue
            Y = eis_cube_root(Y3)
            if Y is None:
                continue
            P = reconstruct_eis(space, X, Y, Z)
            if P is not None:
                return X, Y, Z, P
    return None


def _int_residues(m: int):
    return [EisInt(u, v) for u in range(m) for v in range(m)]


def _mod(z: EisInt, m: int) -> tuple[int, int]:
    return z.u % m, z.v % m


@lru_cache(maxsize=None)
def _eis_cube_tables(m: int, p: int):
    """Cube residues in Z[eps]/m (inert or ramified p), split by divisibility by the prime above p."""
    unit, nonunit = set(), set()
    for z in _int_residues(m):
        if p == 3:
            div = (z.u - z.v) % 3 == 0
        else:
            div = z.u % p == 0 and z.v % p == 0
        c = _mod(z * z * z, m)
        (nonunit if div else unit).add(c)
    return frozenset(unit), frozenset(nonunit)


def _eis_residue_obstruction(coeffs, m: int, p: int) -> bool:
    k1, k2, k3 = coeffs
    unit, nonunit = _eis_cube_tables(m, p)

    def scaled(k, s):
        return {_mod(k * EisInt(*c), m) for c in s}

    xs = [(c, True) for c in scaled(k1, unit)] + [(c, False) for c in scaled(k1, nonunit)]
    ys = [(c, True) for c in scaled(k2, unit)] + [(c, False) for c in scaled(k2, nonunit)]
    zu, zn = scaled(k3, unit), scaled(k3, nonunit)
    for a, ua in xs:
        for b, ub in ys:
            need = ((-a[0] - b[0]) % m, (-a[1] - b[1]) % m)
            if need in zu or ((ua or ub) and need in zn):
                return False
    return True


def _hensel_root(p: int, m: int) -> int:
    """r with r^2 - r + 1 = 0 mod m (p = 1 mod 3), the image of eps in one completion."""
    r = next(t for t in range(p) if (t * t - t + 1) % p == 0)
    mod = p
    while mod < m:
        mod *= p
        f = r * r - r + 1
        r = (r - f * pow(2 * r - 1, -1, mod)) % mod
    return r % m


def eis_local_obstruction(space: EisHomSpace3, local_bound: int = LOCAL_BOUND):
    coeffs = space.coeffs
    for p, m in _local_moduli(space.e, local_bound):
        if p % 3 == 1:
            for r in (_hensel_root(p, m), None):
                if r is None:
                    # the conjugate embedding sends eps to 1 - r
                    r = (1 - _hensel_root(p, m)) % m
                ks = tuple((k.u + k.v * r) % m for k in coeffs)
                if _residue_obstruction(ks, m, _cube_tables_cached(m, p)):
                    return p, m
        else:
            if m * m > EIS_RING_CAP:
                continue
            if _eis_residue_obstruction(coeffs, m, p):
                return p, m
    return None


def solve_eis_homcubic(
    space: EisHomSpace3,
    search_bound: int = EIS_SEARCH_BOUND,
    local_bound: int = LOCAL_BOUND,
) -> ClassStatus:
    cls = space.cls
    if cls.is_identity():
        # Z = 0 solution (1, -1, 0): the point at infinity
        return ClassStatus(cls, ProvedIn("search", None, (ONE, -ONE, EisInt(0, 0))))
    if not norm_is_cube(cls):
        return ClassStatus(cls, ProvedOut("norm"))
    obstruction = eis_local_obstruction(space, local_bound)
    if obstruction is not None:
        return ClassStatus(cls, ProvedOut("local", *obstruction))
    found = search_eis_homcubic(space, search_bound)
    if found is None:
        return ClassStatus(cls, Unknown())
    X, Y, Z, P = found
    pair = make_e_pair(space.e)
    got = alpha3_tilde(pair, P)
    assert got == cls, f"witness reconstructs {P} of class {got}, expected {cls}"
    return ClassStatus(cls, ProvedIn("search", P.coords(), (X, Y, Z)))


# -- images and rank ---------------------------------------------------------

def alpha3_image(pair: EPair, search_bound: int = SEARCH_BOUND, local_bound: int = LOCAL_BOUND) -> list[ClassStatus]:
    classes = enum_pairs(pair.e)
    raw = {}
    for T in torsion_subgroup(pair.E):
        raw.setdefault(alpha3(pair, T), ProvedIn("torsion", T.coords()))
    for A, B in classes:
        if (A, B) not in raw:
            raw[(A, B)] = solve_homcubic(HomSpace3(A, B, pair.e), search_bound, local_bound).status
    return finish_statuses(classes, raw, cube_mul, IDENTITY, 3)[0]


def alpha3_tilde_image(
    pair: EPair, search_bound: int = EIS_SEARCH_BOUND, local_bound: int = LOCAL_BOUND
) -> list[ClassStatus]:
    classes = enum_eis_classes(pair.e)
    raw = {}
    for T in torsion_subgroup(pair.Etilde):
        raw.setdefault(alpha3_tilde(pair, T), ProvedIn("torsion", T.coords()))
    for cls in classes:
        if cls not in raw:
            raw[cls] = solve_eis_homcubic(EisHomSpace3(cls, pair.e), search_bound, local_bound).status
    return finish_statuses(classes, raw, lambda s, t: s * t, IDENTITY_CLASS, 3)[0]


def rank_bounds_3(
    pair: EPair,
    search_bound: int = SEARCH_BOUND,
    local_bound: int = LOCAL_BOUND,
    eis_search_bound: int = EIS_SEARCH_BOUND,
) -> RankBounds:
    sides = [
        alpha3_image(pair, search_bound, local_bound),
        alpha3_tilde_image(pair, eis_search_bound, local_bound),
    ]
    lo, hi = [], []
    for st in sides:
        n_in = sum(c.state == "in" for c in st)
        n_out = sum(c.state == "out" for c in st)
        lo.append(n_in)
        up = 1
        while up * 3 <= len(st) - n_out:
            up *= 3
        hi.append(max(n_in, up))
    # 3^(r+1) = |alpha_-| * |alpha~_-|
    r_lo = max(0, ilog(lo[0] * lo[1], 3) - 1)
    r_hi = max(0, ilog(hi[0] * hi[1], 3) - 1)
    undecided = sum(c.state == "unknown" for st in sides for c in st)
    return RankBounds(r_lo, r_hi, tuple(lo), tuple(hi), undecided, (tuple(sides[0]), tuple(sides[1])))
