"""Integer and modular arithmetic primitives.

Everything here is deterministic and exact: primality never falls back
to a probabilistic answer (the Miller-Rabin witness set below is proven
complete for all 64-bit inputs), factorization is verified by
reconstruction, and residues are always canonical representatives in
[0, modulus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError

# Witnesses that make Miller-Rabin deterministic for every n < 2^64
# (Jim Sinclair's set, see miller-rabin.appspot.com).
_MR_WITNESSES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

_TRIAL_LIMIT = 10**6


@dataclass(frozen=True)
class PrimeSieve:
    """All primes up to ``limit``, in increasing order."""

    limit: int
    primes: tuple[int, ...]
    _index: dict[int, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {p: i for i, p in enumerate(self.primes)}
        )

    def __len__(self) -> int:
        return len(self.primes)

    def __contains__(self, n: int) -> bool:
        return n in self._index

    def index_of(self, p: int) -> int:
        """Zero-based position of the prime p in the sieve."""
        try:
            return self._index[p]
        except KeyError:
            raise DomainError(f"{p} is not a prime <= {self.limit}") from None

    def as_array(self) -> np.ndarray:
        return np.array(self.primes, dtype=np.int64)


def primes_up_to(limit: int) -> PrimeSieve:
    """Eratosthenes sieve of all primes <= limit.

    >>> primes_up_to(10).primes
    (2, 3, 5, 7)
    """
    if limit < 2:
        raise DomainError(f"no primes exist below 2 (got limit={limit})")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return PrimeSieve(limit, tuple(int(p) for p in np.flatnonzero(flags)))


def _mr_composite_witness(a: int, d: int, s: int, n: int) -> bool:
    """True if a proves n composite (n-1 = d * 2^s with d odd)."""
    a %= n
    if a == 0:
        return False
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2^64.

    >>> is_prime(1)
    False
    >>> is_prime(10007)
    True
    """
    if n < 0 or n >= 1 << 64:
        raise DomainError(f"is_prime requires 0 <= n < 2^64 (got {n})")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    return not any(_mr_composite_witness(a, d, s, n) for a in _MR_WITNESSES_64)


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power factorization of a positive integer.

    ``factors`` is a tuple of (prime, exponent) pairs with strictly
    increasing primes; it is empty exactly when n = 1.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        """Number of distinct prime divisors."""
        return len(self.factors)

    @property
    def tau(self) -> int:
        """Number of divisors."""
        t = 1
        for _, e in self.factors:
            t *= e + 1
        return t

    @property
    def rad(self) -> int:
        """Largest squarefree divisor (the radical)."""
        r = 1
        for p, _ in self.factors:
            r *= p
        return r

    @property
    def largest_prime(self) -> int:
        """Largest prime divisor; 1 for n = 1 by convention."""
        return self.factors[-1][0] if self.factors else 1

    def nu(self, p: int) -> int:
        """Exponent of the prime p in n (0 if p does not divide n)."""
        for q, e in self.factors:
            if q == p:
                return e
        return 0


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return primes_up_to(_TRIAL_LIMIT).primes


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of an odd composite n (Brent's cycle finding).

    The polynomial increment is swept deterministically so repeated runs
    factor the same n identically.
    """
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
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
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # unreachable in 64 bits


def factorize(n: int) -> Factorization:
    """Prime-power factorization of 1 <= n < 2^64.

    Small factors come from trial division by sieve primes; whatever
    survives is split recursively with Pollard rho.

    >>> factorize(12).factors
    ((2, 2), (3, 1))
    """
    if n < 1 or n >= 1 << 64:
        raise DomainError(f"factorize requires 1 <= n < 2^64 (got {n})")
    m = n
    out: list[tuple[int, int]] = []
    for p in _trial_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        # below the square of the trial limit every survivor is prime
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT or is_prime(m):
            out.append((m, 1))
        else:
            big: dict[int, int] = {}
            stack = [m]
            while stack:
                v = stack.pop()
                if is_prime(v):
                    big[v] = big.get(v, 0) + 1
                    continue
                d = _pollard_rho(v)
                stack.append(d)
                stack.append(v // d)
            out.extend(sorted(big.items()))
    out.sort()
    return Factorization(n, tuple(out))


def pow_mod(base: int, exp: int, modulus: int) -> int:
    """base**exp reduced to the canonical residue in [0, modulus)."""
    if modulus < 2:
        raise DomainError(f"modulus must be >= 2 (got {modulus})")
    if exp < 0:
        raise DomainError(f"exponent must be >= 0 (got {exp})")
    return pow(base % modulus, exp, modulus)


def multiplicative_order(a: int, p: int) -> int:
    """Least k > 0 with a^k = 1 mod p, for a prime modulus p.

    Computed by factoring p-1 and stripping prime factors from the
    exponent, not by iterating powers.
    """
    if not is_prime(p):
        raise DomainError(f"modulus {p} is not prime")
    if a % p == 0:
        raise DomainError(f"{a} is divisible by {p}; its order is undefined")
    order = p - 1
    for ell, _ in factorize(p - 1).factors:
        while order % ell == 0 and pow(a, order // ell, p) == 1:
            order //= ell
    return order


def euler_phi(n: int) -> int:
    """Euler's totient, from the factorization of n."""
    if n < 1:
        raise DomainError(f"euler_phi requires n >= 1 (got {n})")
    phi = 1
    for p, e in factorize(n).factors:
        phi *= (p - 1) * p ** (e - 1)
    return phi


def divisors(n: int) -> list[int]:
    """All divisors of n in increasing order."""
    return [d for d, _ in divisors_with_phi(n)]


def divisors_with_phi(n: int) -> list[tuple[int, int]]:
    """Pairs (d, phi(d)) over all divisors d of n, sorted by d.

    Generating phi alongside the divisor avoids refactoring each one.
    """
    if n < 1:
        raise DomainError(f"divisors require n >= 1 (got {n})")
    pairs = [(1, 1)]
    for p, e in factorize(n).factors:
        ext = []
        for d, ph in pairs:
            pk, phk = 1, 1
            for k in range(1, e + 1):
                phk = p - 1 if k == 1 else phk * p
                pk *= p
                ext.append((d * pk, ph * phk))
        pairs.extend(ext)
    pairs.sort()
    return pairs


def log_iter(k: int, x: float) -> float:
    """k-fold iterated natural log with every level clamped below at 2.

    The single-level map is x -> max(ln x, 2); iterating keeps each
    intermediate value >= 2, so the result is always defined and >= 2.
    """
    if k < 1:
        raise DomainError(f"iteration depth must be >= 1 (got {k})")
    if x <= 0:
        raise DomainError(f"log_iter requires x > 0 (got {x})")
    v = float(x)
    for _ in range(k):
        v = max(math.log(v), 2.0)
    return v
