"""2-descent on y^2 = x^3 + a x - c^3 - a c, which carries the 2-torsion point (c, 0)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import factorize, is_perfect_power, is_rational_square, square_class, squarefree_divisors, squarefree_part
from .errors import DomainError, SingularCurveError
from .status import ClassStatus, ProvedIn, ProvedOut, RankBounds, Unknown, finish_statuses, ilog
from .weierstrass import CurveW, Point, make_curve, torsion_subgroup

SEARCH_BOUND = 200
LOCAL_BOUND = 81


@dataclass(frozen=True)
class TdPair:
    a: int
    c: int
    E: CurveW
    assoc_a: int
    assoc_c: int
    Etilde: CurveW
    B: int
    Btilde: int

    @property
    def P0(self) -> Point:
        return self.E.point(self.c, 0)

    @property
    def P0_tilde(self) -> Point:
        return self.Etilde.point(self.assoc_c, 0)

    def side(self, which: str) -> "Side":
        if which == "E":
            return Side(self.a, self.c, self.B, self.E)
        if which in ("Etilde", "E~"):
            return Side(self.assoc_a, self.assoc_c, self.Btilde, self.Etilde)
        raise DomainError(f"unknown side {which!r}")


@dataclass(frozen=True)
class Side:
    """One curve of the pair in the shared shape y^2 = (x - c)(x^2 + c x + c^2 + a)."""

    a: int
    c: int
    B: int
    curve: CurveW


def _curve(a: int, c: int) -> CurveW:
    return make_curve(a, -c**3 - a * c)


def make_td_pair(a: int, c: int) -> TdPair:
    a, c = int(a), int(c)
    if a == -3 * c * c:
        raise SingularCurveError(f"a = -3c^2 (a={a}, c={c}): (c, 0) is a double root")
    if 4 * a == -3 * c * c:
        raise SingularCurveError(f"4a = -3c^2 (a={a}, c={c}): the quadratic factor has a double root")
    at, ct = -4 * a - 15 * c * c, -2 * c
    return TdPair(a, c, _curve(a, c), at, ct, _curve(at, ct), 3 * c * c + a, 3 * ct * ct + at)


def psi2(pair: TdPair, P: Point) -> Point:
    if P.curve != pair.E:
        raise DomainError("point is not on E")
    if P.is_infinity or P.x == pair.c:
        return pair.Etilde.infinity
    a, c, x, y = pair.a, pair.c, P.x, P.y
    d = x - c
    xt = (x * x - x * c + a + 3 * c * c) / d
    yt = y * (x * x - 2 * x * c - a - 2 * c * c) / (d * d)
    return pair.Etilde.point(xt, yt)


def psi2_tilde(pair: TdPair, P: Point) -> Point:
    if P.curve != pair.Etilde:
        raise DomainError("point is not on the associated curve")
    if P.is_infinity or P.x == pair.assoc_c:
        return pair.E.infinity
    a, c, x, y = pair.assoc_a, pair.assoc_c, P.x, P.y
    d = x - c
    X = (x * x - x * c + a + 3 * c * c) / (4 * d)
    Y = y * (x * x - 2 * x * c - a - 2 * c * c) / (8 * d * d)
    return pair.E.point(X, Y)


def alpha2(pair: TdPair, P: Point, side: str = "E") -> int:
    """Square class (a square-free integer) of x - c, with the exceptional values at infinity and (c, 0)."""
    s = pair.side(side)
    if P.curve != s.curve:
        raise DomainError(f"point is not on side {side}")
    if P.is_infinity:
        return 1
    if P.x == s.c:
        return square_class(s.a + 3 * s.c * s.c)
    t = P.x - s.c
    # The class divides B, so testing candidates avoids factoring a tall numerator.
    for beta in candidate_classes(s.B):
        if is_rational_square(t / beta):
            return beta
    return square_class(t)


def alpha2_tilde(pair: TdPair, P: Point) -> int:
    return alpha2(pair, P, "Etilde")


def class_mul(x: int, y: int) -> int:
    return squarefree_part(x * y)[0]


def candidate_classes(B: int) -> list[int]:
    divs = squarefree_divisors(B)
    return sorted(divs + [-d for d in divs], key=lambda d: (abs(d), d < 0))


# -- homogeneous spaces -------------------------------------------------------

@dataclass(frozen=True)
class HomSpace2:
    """N^2 = beta M^4 + 3c M^2 q^2 + (B/beta) q^4."""

    beta: int
    c: int
    B: int

    @property
    def coeffs(self) -> tuple[int, int, int]:
        return self.beta, 3 * self.c, self.B // self.beta

    def rhs(self, M: int, q: int) -> int:
        k0, k1, k2 = self.coeffs
        M2, q2 = M * M, q * q
        return k0 * M2 * M2 + k1 * M2 * q2 + k2 * q2 * q2

    def point(self, M: int, q: int, N: int) -> tuple[Fraction, Fraction]:
        x = self.c + Fraction(self.beta * M * M, q * q)
        y = Fraction(self.beta * M * N, q**3)
        return x, y


def _negative_definite(space: HomSpace2) -> bool:
    k0, k1, k2 = space.coeffs
    if k0 >= 0 or k2 >= 0:
        return False
    # k0 r^2 + k1 r + k2 < 0 for all r >= 0
    return k1 <= 0 or k1 * k1 < 4 * k0 * k2


def _locally_insoluble(space: HomSpace2, local_bound: int):
    """(prime, modulus) of the first residue obstruction found, else None."""
    k0, k1, k2 = space.coeffs
    primes = sorted({2, 3} | {p for p, _ in factorize(space.B).factors})
    for p in primes:
        m = p
        while m <= local_bound:
            sq = {(n * n) % m for n in range(m)}
            fourth = [pow(t, 4, m) for t in range(m)]
            two = [t * t % m for t in range(m)]
            ok = False
            for M in range(m):
                for q in range(m):
                    if M % p == 0 and q % p == 0:
                        continue
                    if (k0 * fourth[M] + k1 * two[M] * two[q] + k2 * fourth[q]) % m in sq:
                        ok = True
                        break
                if ok:
                    break
            if not ok:
                return p, m
            m *= p
    return None


def search_space(space: HomSpace2, search_bound: int):
    """First (M, q, N) with gcd(M, q) = 1, 1 <= q, M <= search_bound, M > 0."""
    for q in range(1, search_bound + 1):
        for M in range(1, search_bound + 1):
            if math.gcd(M, q) != 1:
                continue
            N = is_perfect_power(space.rhs(M, q), 2)
            if N is not None:
                return M, q, N
    return None


def decide_space(space: HomSpace2, curve: CurveW, search_bound: int, local_bound: int):
    obstruction = _locally_insoluble(space, local_bound)
    if obstruction is not None:
        return ProvedOut("local", *obstruction)
    if _negative_definite(space):
        return ProvedOut("sign")
    sol = search_space(space, search_bound)
    if sol is None:
        return Unknown()
    x, y = space.point(*sol)
    P = curve.point(x, y)
    return ProvedIn("search", (P.x, P.y), sol)


def alpha2_image(
    pair: TdPair,
    side: str = "E",
    search_bound: int = SEARCH_BOUND,
    local_bound: int = LOCAL_BOUND,
) -> list[ClassStatus]:
    s = pair.side(side)
    classes = candidate_classes(s.B)
    raw: dict[int, object] = {}
    for T in torsion_subgroup(s.curve):
        cls = alpha2(pair, T, side)
        if cls not in raw:
            raw[cls] = ProvedIn("torsion", T.coords())
    for beta in classes:
        if beta in raw:
            continue
        raw[beta] = decide_space(HomSpace2(beta, s.c, s.B), s.curve, search_bound, local_bound)
    out, _, _ = finish_statuses(classes, raw, class_mul, 1, 2)
    return out


def ker_index(pair: TdPair) -> int:
    return 1 if is_perfect_power(-3 * pair.c**2 - 4 * pair.a, 2) is not None else 2


def two_torsion_count(pair: TdPair) -> int:
    # x = c plus the roots of x^2 + c x + c^2 + a, whose discriminant is -3c^2 - 4a
    return 4 if ker_index(pair) == 1 else 2


def rank_bounds_2(
    pair: TdPair,
    search_bound: int = SEARCH_BOUND,
    local_bound: int = LOCAL_BOUND,
) -> RankBounds:
    sides = [alpha2_image(pair, w, search_bound, local_bound) for w in ("E", "Etilde")]
    lo, hi = [], []
    for st in sides:
        n_in = sum(c.state == "in" for c in st)
        n_out = sum(c.state == "out" for c in st)
        lo.append(n_in)
        hi.append(max(n_in, 1 << ilog(len(st) - n_out, 2)))
    denom = ker_index(pair) * two_torsion_count(pair)
    # 2^r * |E_2| = |alpha| * |alpha~| / index, all factors powers of 2
    r_lo = max(0, ilog(lo[0] * lo[1], 2) - ilog(denom, 2))
    r_hi = max(0, ilog(hi[0] * hi[1], 2) - ilog(denom, 2))
    undecided = sum(c.state == "unknown" for st in sides for c in st)
    return RankBounds(r_lo, r_hi, tuple(lo), tuple(hi), undecided, (tuple(sides[0]), tuple(sides[1])))
