"""Multiplicative independence of integer tuples, exactly.

A tuple (n_1, ..., n_k) of integers >= 2 is multiplicatively dependent
when some nonzero integer vector (a_1, ..., a_k) makes the product of
n_i^a_i equal 1. Writing each n_i over the primes dividing the tuple
gives an integer exponent matrix whose rational rank is the tuple's
multiplicative rank; dependence means rank < k, and a kernel vector of
the transposed matrix is an explicit relation.

All linear algebra is fraction-free (Bareiss) or exact rationals; no
floating point is involved anywhere.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError
from .modmath import factorize


@dataclass(frozen=True)
class ExponentMatrix:
    """Prime-exponent matrix of a tuple of distinct integers >= 2.

    Row i lists the exponent of each prime in tuple[i]; columns follow
    the ascending primes dividing at least one element.
    """

    tuple: tuple[int, ...]
    primes: tuple[int, ...]
    entries: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MultRelation:
    """Integer exponents alphas with prod(n_i ** alphas[i]) == 1.

    Content 1 (the gcd of the entries), first nonzero entry positive.
    """

    alphas: tuple[int, ...]


def exponent_matrix(nums: Sequence[int]) -> ExponentMatrix:
    nums = tuple(int(n) for n in nums)
    if any(n < 2 for n in nums):
        raise DomainError(f"all elements must be >= 2 (got {nums})")
    if len(set(nums)) != len(nums):
        raise DomainError(f"elements must be pairwise distinct (got {nums})")
    facs = [factorize(n) for n in nums]
    primes = sorted({p for f in facs for p, _ in f.factors})
    col = {p: j for j, p in enumerate(primes)}
    entries = []
    for f in facs:
        row = [0] * len(primes)
        for p, e in f.factors:
            row[col[p]] = e
        entries.append(tuple(row))
    return ExponentMatrix(nums, tuple(primes), tuple(entries))


def _bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    if not rows:
        return 0
    m = [row[:] for row in rows]
    nrows, ncols = len(m), len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[i][j] * m[r][c] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
    return r


def multiplicative_rank(nums: Sequence[int]) -> int:
    """Rational rank of the exponent matrix."""
    em = exponent_matrix(nums)
    return _bareiss_rank([list(row) for row in em.entries])


def is_mult_independent(nums: Sequence[int]) -> bool:
    return multiplicative_rank(nums) == len(tuple(nums))


def _verify_relation(nums: Sequence[int], alphas: Sequence[int]) -> bool:
    """Exact big-integer check that prod n_i^alphas[i] == 1."""
    num = den = 1
    for n, a in zip(nums, alphas):
        if a > 0:
            num *= n**a
        elif a < 0:
            den *= n ** (-a)
    return num == den


def find_relation(nums: Sequence[int]) -> MultRelation | None:
    """A content-1 integer kernel vector of the transposed exponent
    matrix, or None when the tuple is independent.

    Deterministic: exact rational elimination, first free column chosen,
    sign normalized so the first nonzero entry is positive. The returned
    relation is re-verified with exact integer arithmetic.
    """
    em = exponent_matrix(nums)
    k = len(em.tuple)
    # rows: one per prime, columns indexed by tuple position
    a = [[Fraction(em.entries[i][j]) for i in range(k)] for j in range(len(em.primes))]
    pivots: list[int] = []
    r = 0
    for c in range(k):
        piv = None
        for i in range(r, len(a)):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    if len(pivots) == k:
        return None
    free = next(c for c in range(k) if c not in pivots)
    alpha = [Fraction(0)] * k
    alpha[free] = Fraction(1)
    for row, pc in enumerate(pivots):
        alpha[pc] = -a[row][free]
    scale = math.lcm(*(x.denominator for x in alpha))
    ints = [int(x * scale) for x in alpha]
    content = math.gcd(*ints)
    ints = [x // content for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    if not _verify_relation(em.tuple, ints):
        raise AssertionError(f"relation {ints} failed exact verification")
    return MultRelation(tuple(ints))


def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) computed exactly for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise DomainError(f"integer_root needs n >= 0, k >= 1 (got {n}, {k})")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    x = int(round(n ** (1.0 / k)))
    while x > 1 and x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def is_perfect_power(n: int) -> bool:
    """True when n = a^k for some a >= 2, k >= 2; exact root checks."""
    if n < 4:
        return False
    for k in range(2, n.bit_length() + 1):
        r = integer_root(n, k)
        if r < 2:
            break
        if r**k == n:
            return True
    return False


def dependent_pair_count_exact(q: int) -> int:
    """Number of multiplicatively dependent 2-subsets of [2, q-1].

    A pair {m, n} with m != n is dependent exactly when both are powers
    of a common minimal base b, so the count is the sum over non-power
    bases b of C(t_b, 2) with t_b the number of powers of b below q.
    """
    if q < 3:
        return 0
    total = 0
    b = 2
    while b * b <= q - 1:
        if not is_perfect_power(b):
            t = 1
            v = b * b
            while v <= q - 1:
                t += 1
                v *= b
            total += t * (t - 1) // 2
        b += 1
    return total


def dependent_pair_count_bruteforce(q: int) -> int:
    """All-pairs rank oracle; quadratic, for cross-checking only."""
    nums = range(2, q)
    count = 0
    for i, m in enumerate(nums):
        for n in nums[i + 1 :]:
            if multiplicative_rank((m, n)) < 2:
                count += 1
    return count


def sample_dependence_rate(
    pool: Sequence[int], k: int, trials: int, seed: int
) -> tuple[float, float]:
    """Fraction of uniformly sampled k-subsets of pool that are
    multiplicatively dependent, with its binomial standard error.

    Sampling uses Python's seeded Mersenne Twister (random.Random), one
    sample() call per trial, so results depend only on (pool, k,
    trials, seed).
    """
    pool = list(pool)
    if trials < 1:
        raise DomainError(f"trials must be >= 1 (got {trials})")
    if k < 2 or len(pool) < k:
        raise DomainError(f"need |pool| >= k >= 2 (got |pool|={len(pool)}, k={k})")
    rng = random.Random(seed)
    dependent = 0
    for _ in range(trials):
        tup = rng.sample(pool, k)
        if multiplicative_rank(tup) < k:
            dependent += 1
    frac = dependent / trials
    stderr = math.sqrt(frac * (1.0 - frac) / trials)
    return frac, stderr
