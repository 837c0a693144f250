"""Tests for the arithmetic primitives, each against an independent oracle."""

import math
import random

import pytest

from xpowx.errors import DomainError
from xpowx.modmath import (
    divisors,
    divisors_with_phi,
    euler_phi,
    factorize,
    is_prime,
    log_iter,
    multiplicative_order,
    pow_mod,
    primes_up_to,
)


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def divisor_scan(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def gcd_counting_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def naive_order(a: int, p: int) -> int:
    k, x = 1, a % p
    while x != 1:
        x = x * a % p
        k += 1
    return k


# --- primes_up_to -----------------------------------------------------------


def test_sieve_smallest():
    assert primes_up_to(2).primes == (2,)


def test_sieve_matches_trial_division():
    sieve = primes_up_to(10)
    assert sieve.primes == (2, 3, 5, 7)
    assert len(sieve) == 4
    big = primes_up_to(2000)
    assert list(big.primes) == [n for n in range(2001) if trial_division_is_prime(n)]


def test_sieve_pi_of_6():
    # d = pi(q - 1) for q = 7
    assert len(primes_up_to(6)) == 3
    assert primes_up_to(6).primes == (2, 3, 5)


def test_sieve_rejects_empty_domain():
    with pytest.raises(DomainError):
        primes_up_to(1)


def test_sieve_index_lookup():
    sieve = primes_up_to(100)
    for i, p in enumerate(sieve.primes):
        assert sieve.index_of(p) == i
    assert 97 in sieve and 91 not in sieve
    with pytest.raises(DomainError):
        sieve.index_of(91)


# --- is_prime ---------------------------------------------------------------


def test_is_prime_units_and_small():
    assert not is_prime(0)
    assert not is_prime(1)
    assert is_prime(2)


def test_is_prime_matches_trial_division_exhaustive():
    for n in range(0, 20000):
        assert is_prime(n) == trial_division_is_prime(n), n


def test_is_prime_known_values():
    assert is_prime(10007) == trial_division_is_prime(10007) is True
    assert is_prime(10**6 + 3) == trial_division_is_prime(10**6 + 3) is True
    # strong-pseudoprime classics
    assert not is_prime(3215031751)
    assert not is_prime(3825123056546413051)
    assert is_prime(2**61 - 1)
    assert not is_prime(2**62 - 1)


def test_is_prime_random_64bit_vs_factorize(seed=101):
    rng = random.Random(seed)
    for _ in range(40):
        n = rng.getrandbits(48) + 2
        assert is_prime(n) == (factorize(n).factors == ((n, 1),))


# --- factorize --------------------------------------------------------------


def test_factorize_examples():
    assert factorize(1).factors == ()
    f = factorize(12)
    assert f.factors == ((2, 2), (3, 1))
    assert f.rad == 6 and f.largest_prime == 3 and f.omega == 2 and f.tau == 6
    assert factorize(97).factors == ((97, 1),)


def test_factorize_reconstructs_random_64bit(seed=7):
    rng = random.Random(seed)
    for bits in (16, 32, 48, 62):
        for _ in range(25):
            n = rng.getrandbits(bits) + 1
            f = factorize(n)
            prod = 1
            for p, e in f.factors:
                assert e >= 1 and is_prime(p)
                prod *= p**e
            assert prod == n
            assert [p for p, _ in f.factors] == sorted({p for p, _ in f.factors})


def test_factorize_full_64bit_semiprime():
    # both factors above the trial-division limit, product just under 2^64
    a, b = 2**32 - 5, 2**32 - 17
    assert is_prime(a) and is_prime(b)
    assert factorize(a * b).factors == ((b, 1), (a, 1))


def test_factorize_exhaustive_small_vs_divisor_scan():
    for n in range(1, 500):
        f = factorize(n)
        assert f.tau == len(divisor_scan(n))
        assert f.nu(2) == max(
            (e for e in range(64) if n % 2**e == 0), default=0
        )


def test_factorize_rejects_zero():
    with pytest.raises(DomainError):
        factorize(0)


# --- pow_mod ----------------------------------------------------------------


def test_pow_mod_identity_exponent():
    for p in (2, 3, 7, 10007):
        for x in (0, 1, 5, 123):
            assert pow_mod(x, 1, p) == x % p


def test_pow_mod_direct_multiplication_oracle():
    assert pow_mod(3, 3, 7) == 3 * 3 * 3 % 7 == 6
    assert pow_mod(6, 6, 7) == 6**6 % 7 == 1
    rng = random.Random(5)
    for _ in range(200):
        b = rng.randrange(0, 50)
        e = rng.randrange(0, 12)
        m = rng.randrange(2, 40)
        assert pow_mod(b, e, m) == b**e % m


def test_pow_mod_rejects_bad_modulus():
    with pytest.raises(DomainError):
        pow_mod(2, 3, 1)
    with pytest.raises(DomainError):
        pow_mod(2, -1, 7)


def test_fermat_little_theorem_all_small_primes():
    for p in primes_up_to(1000).primes:
        for a in range(1, p):
            assert pow_mod(a, p - 1, p) == 1


# --- multiplicative_order ---------------------------------------------------


def test_order_examples():
    assert multiplicative_order(1, 7) == 1
    assert multiplicative_order(2, 7) == naive_order(2, 7) == 3
    assert multiplicative_order(2, 5) == naive_order(2, 5) == 4


def test_order_matches_naive_and_divides_group_order():
    for p in primes_up_to(200).primes:
        for a in range(1, p):
            k = multiplicative_order(a, p)
            assert k == naive_order(a, p)
            assert (p - 1) % k == 0
            assert pow_mod(a, k, p) == 1
            for ell, _ in factorize(k).factors:
                assert pow_mod(a, k // ell, p) != 1


def test_order_rejects_multiple_of_p():
    with pytest.raises(DomainError):
        multiplicative_order(10, 5)


# --- euler_phi / divisors ---------------------------------------------------


def test_phi_examples():
    assert euler_phi(1) == 1
    assert euler_phi(12) == gcd_counting_phi(12) == 4
    for p in (2, 3, 97, 10007):
        assert euler_phi(p) == p - 1


def test_phi_matches_gcd_counting():
    for n in range(1, 300):
        assert euler_phi(n) == gcd_counting_phi(n)


def test_divisors_examples():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    for n in range(1, 300):
        assert divisors(n) == divisor_scan(n)


def test_divisor_phi_pairs_are_consistent():
    for n in range(1, 400):
        pairs = divisors_with_phi(n)
        assert [d for d, _ in pairs] == divisors(n)
        for d, ph in pairs:
            assert ph == euler_phi(d)


def test_phi_summatory_identity():
    # sum of phi(d) over d | n equals n
    for n in range(1, 10001):
        assert sum(ph for _, ph in divisors_with_phi(n)) == n


# --- log_iter ---------------------------------------------------------------


def test_log_iter_clamp_dominates():
    assert log_iter(1, 1.0) == 2.0
    assert log_iter(1, math.exp(3)) == pytest.approx(3.0)
    assert log_iter(2, math.exp(math.exp(3))) == pytest.approx(3.0)


def test_log_iter_monotone_and_bounded_below():
    xs = [10.0**k for k in range(-6, 12)]
    for k in (1, 2, 3):
        vals = [log_iter(k, x) for x in xs]
        assert all(v >= 2.0 for v in vals)
        assert vals == sorted(vals)


def test_log_iter_rejects_bad_input():
    with pytest.raises(DomainError):
        log_iter(0, 5.0)
    with pytest.raises(DomainError):
        log_iter(1, 0.0)
