"""Exact integer arithmetic: factorization and power-free decompositions.

Rationals are ``fractions.Fraction`` throughout the package; integers are
plain Python ints.
"""
from __future__ import annotations

import functools
import math
import os
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError, FactorizationIncomplete

TRIAL_LIMIT = 10**6
RHO_BUDGET = 2_000_000

# Deterministic Miller-Rabin witness set, valid below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_BOUND = 3_317_044_064_679_887_385_961_981


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


_small_primes: list[int] | None = None


def small_primes() -> list[int]:
    global _small_primes
    if _small_primes is None:
        _small_primes = _sieve(TRIAL_LIMIT)
    return _small_primes


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


# -- primality ---------------------------------------------------------------

def _mr(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    # Selfridge parameter choice.
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
        if D == 13 and math.isqrt(n) ** 2 == n:
            return False
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < _MR_BOUND:
        return all(_mr(n, a) for a in _MR_BASES)
    # Baillie-PSW beyond the proven Miller-Rabin range.
    return _mr(n, 2) and _strong_lucas(n)


# -- splitting ---------------------------------------------------------------

def _brent(n: int, rng: random.Random, budget: int) -> Optional[int]:
    """One Pollard-Brent run; returns a nontrivial factor or None."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    spent = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        spent += r
        if spent > budget:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def _split_large(n: int, out: dict[int, int], budget: int, origin: int) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    # n has no factor below the trial limit, so only roots of exponent < log n / log 10^6 matter
    for k in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if TRIAL_LIMIT**k > n:
            break
        r = iroot(n, k)
        if r**k == n:
            for _ in range(k):
                _split_large(r, out, budget, origin)
            return
    rng = random.Random(n)
    spent = 0
    while spent < budget:
        d = _brent(n, rng, budget - spent)
        spent += budget // 8 if d is None else 0
        if d is not None:
            _split_large(d, out, budget, origin)
            _split_large(n // d, out, budget, origin)
            return
    raise FactorizationIncomplete(origin, n)


# -- cache -------------------------------------------------------------------

class FactorCache:
    """Flat-file factorization cache: ``n<TAB>sign<TAB>p:e,p:e,...`` lines."""

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._lock = threading.Lock()
        self._mem: dict[int, Factorization] = {}
        if os.path.exists(self.path):
            with open(self.path, encoding="ascii") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    n_s, sign_s, body = (line.split("\t") + [""])[:3]
                    pairs = tuple(
                        (int(p), int(e))
                        for p, e in (item.split(":") for item in body.split(",") if item)
                    )
                    self._mem[int(n_s)] = Factorization(int(sign_s), pairs)

    def get(self, n: int) -> Optional[Factorization]:
        with self._lock:
            return self._mem.get(n)

    def put(self, n: int, f: Factorization) -> None:
        with self._lock:
            if n in self._mem:
                return
            self._mem[n] = f
            body = ",".join(f"{p}:{e}" for p, e in f.factors)
            line = f"{n}\t{f.sign}\t{body}\n".encode("ascii")
            fd = os.open(self.path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
            try:
                os.write(fd, line)
            finally:
                os.close(fd)


_cache: Optional[FactorCache] = None
# Only composites above this size are worth persisting.
_CACHE_MIN = TRIAL_LIMIT**2


def set_cache(path) -> Optional[FactorCache]:
    global _cache
    _cache = FactorCache(path) if path else None
    return _cache


def factorize(n: int, budget: int = RHO_BUDGET) -> Factorization:
    if n == 0:
        raise DomainError("cannot factor 0")
    sign = 1 if n > 0 else -1
    m = abs(n)
    if _cache is not None and m >= _CACHE_MIN:
        hit = _cache.get(n)
        if hit is not None:
            return hit
    f = _factor_abs(m, budget)
    f = Factorization(sign, f.factors)
    if _cache is not None and m >= _CACHE_MIN:
        _cache.put(n, f)
    return f


@functools.lru_cache(maxsize=1 << 16)
def _factor_abs(m: int, budget: int) -> Factorization:
    origin = m
    out: dict[int, int] = {}
    for p in small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m < TRIAL_LIMIT**2:
            out[m] = out.get(m, 0) + 1
        else:
            _split_large(m, out, budget, origin)
    return Factorization(1, tuple(sorted(out.items())))


def divisors(n: int) -> list[int]:
    """Positive divisors of n, ascending."""
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def squarefree_divisors(n: int) -> list[int]:
    divs = [1]
    for p, _ in factorize(n).factors:
        divs += [d * p for d in divs]
    return sorted(divs)


def squarefree_part(n: int) -> tuple[int, int]:
    """Return (s, t) with n = s*t**2, s square-free carrying the sign of n."""
    f = factorize(n)
    s, t = f.sign, 1
    for p, e in f.factors:
        s *= p ** (e % 2)
        t *= p ** (e // 2)
    return s, t


def cubefree_decompose(n: int) -> tuple[int, int, int]:
    """Split n > 0 as A * B**2 * C**3 with A, B square-free and coprime."""
    if n <= 0:
        raise DomainError("cubefree_decompose needs a positive integer")
    A = B = C = 1
    for p, e in factorize(n).factors:
        r = e % 3
        if r == 1:
            A *= p
        elif r == 2:
            B *= p
        C *= p ** (e // 3)
    return A, B, C


def iroot(n: int, k: int) -> int:
    """floor of the real k-th root of n >= 0."""
    if n < 0:
        raise DomainError("iroot needs n >= 0")
    if n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def icbrt(n: int) -> int:
    """Real cube root floor, sign-aware (rounds toward zero)."""
    return iroot(n, 3) if n >= 0 else -iroot(-n, 3)


def is_perfect_power(n: int, k: int) -> Optional[int]:
    if k not in (2, 3):
        raise DomainError("only k in {2, 3} is supported")
    if k == 2:
        if n < 0:
            return None
        r = math.isqrt(n)
        return r if r * r == n else None
    r = icbrt(n)
    return r if r**3 == n else None


def sixth_power_free_reduce(b: int) -> tuple[int, int]:
    """Return (b', u) with b = u**6 * b' and b' sixth-power free."""
    f = factorize(b)
    rest, u = f.sign, 1
    for p, e in f.factors:
        u *= p ** (e // 6)
        rest *= p ** (e % 6)
    return rest, u


def is_rational_square(r: Fraction) -> bool:
    r = Fraction(r)
    if r < 0:
        return False
    return is_perfect_power(r.numerator, 2) is not None and is_perfect_power(r.denominator, 2) is not None


def square_class(r) -> int:
    """Square-free integer representing r modulo squares."""
    r = Fraction(r)
    if r == 0:
        raise DomainError("0 has no square class")
    return squarefree_part(r.numerator * r.denominator)[0]


def cube_class(r) -> tuple[int, int]:
    """(A, B) with |r| = A * B**2 modulo cubes; the sign is a cube."""
    r = Fraction(r)
    if r == 0:
        raise DomainError("0 has no cube class")
    A, B, _ = cubefree_decompose(abs(r.numerator) * r.denominator**2)
    return A, B
