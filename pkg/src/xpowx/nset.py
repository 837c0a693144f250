"""Exponent-restricted subsets of [2, q-1].

Membership keeps integers whose small-prime exponents are bounded and
whose large-prime part is squarefree: with B = c1 * loglog(q) and
f = c2 * logloglog(q) (iterated logs clamped below at 2), n belongs to
the set when nu_p(n) <= floor(f) for every prime p <= B and
nu_p(n) <= 1 for every prime p > B. Almost all of [2, q-1] qualifies;
the complement is explicitly bounded by q*pi(B)/2^f + 3q/(B log B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainError
from .modmath import factorize, log_iter, primes_up_to

_C2_MIN = 2.0 / math.log(2.0)  # ~2.885; below this the complement bound degrades


@dataclass(frozen=True)
class NSetParams:
    """Thresholds governing membership for a given q."""

    q: int
    c1: float
    c2: float

    @cached_property
    def B(self) -> float:
        """Small/large prime cutoff c1 * loglog(q), clamped."""
        return self.c1 * log_iter(2, self.q)

    @cached_property
    def f(self) -> float:
        """Exponent cap c2 * logloglog(q), clamped."""
        return self.c2 * log_iter(3, self.q)

    @cached_property
    def exponent_cap(self) -> int:
        """Integer exponent comparison threshold floor(f)."""
        return math.floor(self.f)


@dataclass(frozen=True)
class NSet:
    """Materialized membership over [2, q-1]."""

    params: NSetParams
    members: np.ndarray  # ascending int64 array
    complement_size: int

    @property
    def size(self) -> int:
        return int(self.members.size)

    def bitmap(self) -> bytes:
        """Little-endian bitset of length q bits; bit n set iff n is a member."""
        bits = np.zeros(self.params.q, dtype=np.uint8)
        bits[self.members] = 1
        return np.packbits(bits, bitorder="little").tobytes()


def params_for(q: int, c1: float = 1.0, c2: float = 3.0) -> NSetParams:
    if q < 3:
        raise DomainError(f"q must be >= 3 (got {q})")
    if c1 <= 0:
        raise ConfigError(f"c1 must be positive (got {c1})")
    if c2 <= _C2_MIN:
        raise ConfigError(f"c2 must exceed 2/ln 2 = {_C2_MIN:.4f} (got {c2})")
    return NSetParams(q, float(c1), float(c2))


def is_member(n: int, params: NSetParams) -> bool:
    """Single-integer membership check straight from the factorization."""
    if not 2 <= n <= params.q - 1:
        raise DomainError(f"n must lie in [2, {params.q - 1}] (got {n})")
    cap = params.exponent_cap
    for p, e in factorize(n).factors:
        if p <= params.B:
            if e > cap:
                return False
        elif e > 1:
            return False
    return True


def build(q: int, params: NSetParams | None = None) -> NSet:
    """Materialize membership for all of [2, q-1] by sieving violations.

    An n is excluded when p^(floor(f)+1) | n for some prime p <= B, or
    p^2 | n for some prime p > B; two passes of multiple-marking cover
    both clauses in O(q log log q).
    """
    if params is None:
        params = params_for(q)
    if params.q != q:
        raise DomainError(f"params were built for q={params.q}, not q={q}")
    bad = np.zeros(q, dtype=bool)
    bad[:2] = True
    top = q - 1
    sieve = primes_up_to(max(2, math.isqrt(top)))
    cap = params.exponent_cap
    for p in sieve.primes:
        if p <= params.B:
            step = p ** (cap + 1)
            if step <= top:
                bad[step::step] = True
        else:
            bad[p * p :: p * p] = True
    # primes B < p <= q-1 with p^2 > q-1 cannot violate squarefreeness
    members = np.flatnonzero(~bad).astype(np.int64)
    return NSet(params, members, int(q - 2 - members.size))


def theoretical_complement_bound(q: int, params: NSetParams | None = None) -> float:
    """q*pi(B)/2^f + 3q/(B*logB), with logB the clamped natural log.

    This dominates the true complement size; the first term bounds the
    excluded small-prime exponent patterns, the second the non-squarefree
    large-prime part.
    """
    if params is None:
        params = params_for(q)
    B = params.B
    pi_B = len(primes_up_to(int(B)).primes) if B >= 2 else 0
    return q * pi_B / 2.0**params.f + 3.0 * q / (B * max(math.log(B), 2.0))
