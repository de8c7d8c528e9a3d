import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from descent_kit import arith
from descent_kit.arith import (
    Factorization,
    cube_class,
    cubefree_decompose,
    divisors,
    factorize,
    icbrt,
    iroot,
    is_perfect_power,
    is_prime,
    set_cache,
    sixth_power_free_reduce,
    square_class,
    squarefree_part,
)
from descent_kit.errors import DomainError, FactorizationIncomplete

nonzero = st.integers(-(2**64), 2**64).filter(bool)
positive = st.integers(1, 2**64)
small_rat = st.builds(Fraction, st.integers(-(10**9), 10**9).filter(bool), st.integers(1, 10**6))


def test_factorize_examples():
    assert factorize(108) == Factorization(1, ((2, 2), (3, 3)))
    assert factorize(-12) == Factorization(-1, ((2, 2), (3, 1)))
    assert factorize(1) == Factorization(1, ())


def test_factorize_zero():
    with pytest.raises(DomainError):
        factorize(0)


def test_squarefree_part_examples():
    assert squarefree_part(72) == (2, 6)
    assert squarefree_part(-4) == (-1, 2)
    assert squarefree_part(1) == (1, 1)
    with pytest.raises(DomainError):
        squarefree_part(0)


def test_cubefree_examples():
    assert cubefree_decompose(16) == (2, 1, 2)
    assert cubefree_decompose(500) == (1, 2, 5)
    assert cubefree_decompose(1) == (1, 1, 1)
    for bad in (0, -5):
        with pytest.raises(DomainError):
            cubefree_decompose(bad)


def test_perfect_power_examples():
    assert is_perfect_power(8, 3) == 2
    assert is_perfect_power(-8, 3) == -2
    assert is_perfect_power(12, 3) is None
    assert is_perfect_power(64, 3) == 4
    assert is_perfect_power(-4, 2) is None
    assert is_perfect_power(49, 2) == 7


def test_sixth_power_free_examples():
    assert sixth_power_free_reduce(320) == (5, 2)
    assert sixth_power_free_reduce(1) == (1, 1)
    assert sixth_power_free_reduce(-64) == (-1, 2)
    with pytest.raises(DomainError):
        sixth_power_free_reduce(0)


@given(nonzero)
def test_factorize_round_trip(n):
    f = factorize(n)
    assert f.value() == n
    primes = [p for p, _ in f.factors]
    assert primes == sorted(set(primes))
    assert all(is_prime(p) and e > 0 for p, e in f.factors)


def test_factorize_two_large_primes():
    p, q = 1_000_000_007, 998_244_353
    assert factorize(p * q).factors == ((q, 1), (p, 1))
    big = (2**61 - 1) * (2**31 - 1)
    assert factorize(big).value() == big


def test_budget_exhaustion_is_reported():
    # two ~40-bit primes; a zero budget cannot split them
    n = 1_099_511_627_791 * 1_099_511_628_401
    arith._factor_abs.cache_clear()
    with pytest.raises(FactorizationIncomplete) as info:
        factorize(n, budget=0)
    assert info.value.cofactor == n


def test_is_prime_against_sieve():
    sieve = set(arith._sieve(20000))
    assert all(is_prime(n) == (n in sieve) for n in range(20000))


def test_is_prime_strong_pseudoprimes():
    # strong pseudoprime to the first 12 prime bases (composite)
    assert not is_prime(318665857834031151167461)
    # Mersenne primes on both sides of the Miller-Rabin bound
    assert is_prime(2**61 - 1)
    assert is_prime(2**89 - 1)
    assert not is_prime((2**89 - 1) * (2**61 - 1))


@given(nonzero)
def test_squarefree_part_property(n):
    s, t = squarefree_part(n)
    assert s * t * t == n and t > 0
    assert all(e == 1 for _, e in factorize(s).factors)


@given(positive)
def test_cubefree_property(n):
    A, B, C = cubefree_decompose(n)
    assert A * B * B * C**3 == n
    assert math.gcd(A, B) == 1
    for x in (A, B):
        assert all(e == 1 for _, e in factorize(x).factors)


@given(nonzero)
def test_sixth_power_free_property(b):
    rest, u = sixth_power_free_reduce(b)
    assert u > 0 and b % u**6 == 0 and rest * u**6 == b
    assert all(e < 6 for _, e in factorize(rest).factors)


@given(st.integers(0, 10**40), st.sampled_from([2, 3, 5]))
def test_iroot(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


@given(st.integers(-(10**30), 10**30))
def test_icbrt_and_cube_detection(n):
    r = icbrt(n)
    assert abs(r) ** 3 <= abs(n)
    assert is_perfect_power(n**3, 3) == n
    assert (is_perfect_power(n, 3) is not None) == (r**3 == n)


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(-12) == [1, 2, 3, 4, 6, 12]


@given(small_rat, small_rat)
def test_square_and_cube_classes_are_homomorphic(r, s):
    assert square_class(r * s) == squarefree_part(square_class(r) * square_class(s))[0]
    A, B = cube_class(r * s)
    A1, B1 = cube_class(r)
    A2, B2 = cube_class(s)
    assert (A, B) == cube_class(A1 * B1**2 * A2 * B2**2)
    assert cube_class(r**3) == (1, 1)
    assert square_class(r * r) == 1


def test_cube_class_ignores_sign():
    assert cube_class(Fraction(-4)) == (1, 2)
    assert cube_class(Fraction(1, 4)) == (2, 1)


def test_cache_file_round_trip(tmp_path):
    path = tmp_path / "factors.tsv"
    n = 1_000_000_007 * 998_244_353
    try:
        cache = set_cache(path)
        arith._factor_abs.cache_clear()
        f = factorize(-n)
        lines = path.read_text().splitlines()
        assert lines == [f"{-n}\t-1\t998244353:1,1000000007:1"]
        # a fresh cache reads the file back
        again = set_cache(path)
        assert again is not cache and again.get(-n) == f
        factorize(-n)
        assert len(path.read_text().splitlines()) == 1
    finally:
        set_cache(None)


def test_cache_skips_small_inputs(tmp_path):
    path = tmp_path / "factors.tsv"
    try:
        set_cache(path)
        factorize(360)
        assert not path.exists()
    finally:
        set_cache(None)


def test_cache_is_thread_safe(tmp_path):
    from concurrent.futures import ThreadPoolExecutor

    path = tmp_path / "factors.tsv"
    nums = [(10**12 + 39) * k for k in range(2, 40)]
    try:
        set_cache(path)
        arith._factor_abs.cache_clear()
        with ThreadPoolExecutor(8) as ex:
            results = list(ex.map(factorize, nums * 3))
        assert [f.value() for f in results] == nums * 3
        lines = path.read_text().splitlines()
        assert len(lines) == len(set(lines)) == len(nums)
    finally:
        set_cache(None)
