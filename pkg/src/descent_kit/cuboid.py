"""Cuboid coefficient polynomials and their reduction to Weierstrass curves."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Union

from .arith import factorize, is_perfect_power
from .errors import DegenerateParameters, DomainError
from .weierstrass import CurveW, Point, make_curve


@lru_cache(maxsize=None)
def load_terms() -> dict[str, tuple[tuple[int, int, int], ...]]:
    """Term lists keyed by polynomial name: (i, j, coeff) meaning coeff*b^i*c^j."""
    text = resources.files("descent_kit.data").joinpath("cuboid_coeffs.txt").read_text()
    polys: dict[str, list] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, i, j, k = line.split()
        polys.setdefault(name, []).append((int(i), int(j), int(k)))
    return {k: tuple(v) for k, v in polys.items()}


def _horner(terms, b: Fraction, c: Fraction) -> Fraction:
    # Group by power of b, evaluate each c-polynomial by Horner, then Horner in b.
    by_b: dict[int, dict[int, int]] = {}
    for i, j, k in terms:
        by_b.setdefault(i, {})[j] = by_b.get(i, {}).get(j, 0) + k
    def in_c(coeffs):
        acc = Fraction(0)
        for j in range(max(coeffs), -1, -1):
            acc = acc * c + coeffs.get(j, 0)
        return acc
    acc = Fraction(0)
    for i in range(max(by_b), -1, -1):
        acc = acc * b + (in_c(by_b[i]) if i in by_b else 0)
    return acc


@dataclass(frozen=True)
class CuboidCoeffs:
    b: Fraction
    c: Fraction
    F: Fraction
    P1: Fraction
    P2: Fraction


def eval_coeffs(b, c) -> CuboidCoeffs:
    b, c = Fraction(b), Fraction(c)
    t = load_terms()
    F = _horner(t["F"], b, c)
    if F == 0:
        raise DegenerateParameters(f"F(b, c) = 0 at b={b}, c={c}")
    P1 = _horner(t["P1"], b, c) / (2 * F)
    P2 = _horner(t["P2"], b, c) / (2 * F)
    return CuboidCoeffs(b, c, F, P1, P2)


def to_fraction(P) -> tuple[int, int]:
    P = Fraction(P)
    if P == 0:
        raise DegenerateParameters("coefficient vanishes; the cubic degenerates")
    return P.numerator, P.denominator


def to_weierstrass(N: int, R: int) -> CurveW:
    if N == 0 or R == 0:
        raise DomainError("N and R must be nonzero")
    return make_curve(0, 16 * R**4 * N**2)


def pull_back(N: int, R: int, P: Point) -> tuple[Fraction, Fraction]:
    """Map (x, y) on y^2 = x^3 + 16R^4N^2 back to (w, alpha) on 2R(w^2-1) = N alpha^3."""
    return P.y / (4 * R * R * N), P.x / (2 * R * N)


@dataclass(frozen=True)
class CubeCase:
    M: int


@dataclass(frozen=True)
class GeneralCase:
    e: int
    u: int


Classification = Union[CubeCase, GeneralCase]


def classify_curve(N: int, R: int) -> Classification:
    if N == 0 or R == 0:
        raise DomainError("N and R must be nonzero")
    k = 4 * R * R * N
    if k % 8 == 0:
        M = is_perfect_power(k // 8, 3)
        if M is not None:
            return CubeCase(M)
    # 16R^4N^2 = k^2 = u^6 e^2 with e cube-free: split |k| prime by prime.
    e = u = 1
    for p, a in factorize(abs(k)).factors:
        e *= p ** (a % 3)
        u *= p ** (a // 3)
    assert e > 1, "k is a cube exactly when the cube case applies"
    return GeneralCase(e, u)


def cube_case_group(M: int) -> list[Point]:
    if M == 0:
        raise DomainError("M must be nonzero")
    E = make_curve(0, 64 * M**6)
    return [
        E.infinity,
        E.point(8 * M**2, 24 * M**3),
        E.point(0, 8 * M**3),
        E.point(-4 * M**2, 0),
        E.point(0, -8 * M**3),
        E.point(8 * M**2, -24 * M**3),
    ]
