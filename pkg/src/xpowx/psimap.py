"""The self-power map x -> x^x mod p and its fixed-point statistics.

Single-prime operations evaluate the map directly with modular
exponentiation; the range scan delegates to a batched kernel that walks
powers of a generator instead (order logic), which is checked against
the direct evaluation in the test suite.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError
from .modmath import divisors_with_phi, factorize, is_prime, multiplicative_order, pow_mod


@dataclass(frozen=True)
class PsiStats:
    """Per-prime statistics bundle of the self-power map."""

    p: int
    fixed_points: int
    image_size: int
    n_of_1: int
    collisions: int


@dataclass(frozen=True)
class ScanRow:
    """One prime's row in a fixed-point scan: p, F(p), omega(p-1)."""

    p: int
    F: int
    omega_pm1: int


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    prime_count: int
    trivial_only_count: int  # primes with F(p) = 1

    @property
    def trivial_only_fraction(self) -> float:
        if self.prime_count == 0:
            return 0.0
        return self.trivial_only_count / self.prime_count


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


def psi(p: int, x: int) -> int:
    """x^x mod p for x in [1, p-1]."""
    _require_prime(p)
    if not 1 <= x <= p - 1:
        raise DomainError(f"x must lie in [1, {p - 1}] (got {x})")
    return pow_mod(x, x, p)


def count_fixed_points(p: int) -> int:
    """F(p): number of x in [1, p-1] with x^x = x mod p."""
    _require_prime(p)
    return sum(1 for x in range(1, p) if pow(x, x, p) == x)


def preimage_count(p: int, a: int) -> int:
    """Number of x in [1, p-1] with x^x = a mod p."""
    _require_prime(p)
    if not 1 <= a <= p - 1:
        raise DomainError(f"target residue must lie in [1, {p - 1}] (got {a})")
    return sum(1 for x in range(1, p) if pow(x, x, p) == a)


def _value_histogram(p: int) -> np.ndarray:
    counts = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        counts[pow(x, x, p)] += 1
    return counts


def collision_count(p: int) -> int:
    """Ordered pairs (x, y) with x^x = y^y mod p, via the value histogram."""
    _require_prime(p)
    counts = _value_histogram(p)
    return int(np.sum(counts * counts))


def image_size(p: int) -> int:
    """Number of distinct values of x^x mod p over x in [1, p-1]."""
    _require_prime(p)
    return int(np.count_nonzero(_value_histogram(p)))


def psi_stats(p: int) -> PsiStats:
    """All per-prime statistics in one pass."""
    _require_prime(p)
    counts = _value_histogram(p)
    fixed = count_fixed_points(p)
    return PsiStats(
        p=p,
        fixed_points=fixed,
        image_size=int(np.count_nonzero(counts)),
        n_of_1=int(counts[1]),
        collisions=int(np.sum(counts * counts)),
    )


def bulk_psi_stats(ps: Sequence[int]) -> list[PsiStats]:
    """Kernel-backed psi_stats over many odd primes at once."""
    arr = np.asarray(sorted(ps), dtype=np.int64)
    out: list[PsiStats] = []
    odd = arr[arr > 2]
    small = _small_prime_table(int(odd.max())) if odd.size else None
    if odd.size:
        F, img, n1, coll = _kernels.psi_stats_bulk(odd, small)
    k = 0
    for p in arr:
        if p == 2:
            out.append(PsiStats(2, 1, 1, 1, 1))
        else:
            out.append(
                PsiStats(int(p), int(F[k]), int(img[k]), int(n1[k]), int(coll[k]))
            )
            k += 1
    return out


def _small_prime_table(pmax: int) -> np.ndarray:
    from .modmath import primes_up_to

    return primes_up_to(max(3, math.isqrt(pmax) + 1)).as_array()


def count_fixed_points_batch(ps: Sequence[int]) -> list[int]:
    """F(p) for many primes via the generator-walk kernel.

    x = g^i has order (p-1)/gcd(i, p-1) and is fixed exactly when that
    order divides x - 1; this needs one multiplication and one gcd per
    x instead of a full modular exponentiation.
    """
    arr = np.asarray(ps, dtype=np.int64)
    out = np.zeros(len(arr), dtype=np.int64)
    odd_mask = arr > 2
    if odd_mask.any():
        odd = arr[odd_mask]
        small = _small_prime_table(int(odd.max()))
        out[odd_mask] = _kernels.fixed_point_counts(odd, small)
    out[~odd_mask] = 1  # F(2) = 1
    return [int(v) for v in out]


def scan_primes(
    lo: int,
    hi: int,
    sink: Callable[[ScanRow], None] | None = None,
) -> ScanResult:
    """ScanRow for every prime in [lo, hi], in ascending order.

    The batched kernel computes F; omega(p-1) comes from factorization.
    Rows are emitted to ``sink`` (when given) already sorted, so output
    never depends on internal parallel chunking.
    """
    if not 2 <= lo <= hi:
        raise DomainError(f"need 2 <= lo <= hi (got [{lo}, {hi}])")
    from .modmath import primes_up_to

    sieve = primes_up_to(hi)
    ps = [p for p in sieve.primes if p >= lo]
    counts = count_fixed_points_batch(ps) if ps else []
    rows = []
    trivial = 0
    for p, F in zip(ps, counts):
        row = ScanRow(p=p, F=F, omega_pm1=factorize(p - 1).omega)
        rows.append(row)
        if F == 1:
            trivial += 1
        if sink is not None:
            sink(row)
    return ScanResult(tuple(rows), len(ps), trivial)


SCAN_CSV_HEADER = ("p", "F", "omega_pm1")


def write_scan_csv(rows: Iterable[ScanRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SCAN_CSV_HEADER)
        for r in rows:
            w.writerow((r.p, r.F, r.omega_pm1))


def read_scan_csv(path: str) -> list[ScanRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(SCAN_CSV_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise DomainError(f"scan CSV is missing columns: {sorted(missing)}")
        return [
            ScanRow(int(row["p"]), int(row["F"]), int(row["omega_pm1"]))
            for row in reader
        ]


def residue_orders(p: int) -> list[int]:
    """Multiplicative order of every residue; index a holds ord_p(a).

    Index 0 is a placeholder -1. One factorization of p-1 is shared by
    all residues.
    """
    _require_prime(p)
    ells = [ell for ell, _ in factorize(p - 1).factors]
    orders = [-1] * p
    for a in range(1, p):
        order = p - 1
        for ell in ells:
            while order % ell == 0 and pow(a, order // ell, p) == 1:
                order //= ell
        orders[a] = order
    return orders


@lru_cache(maxsize=128)
def _window_histogram(p: int) -> dict[tuple[int, int], int]:
    """Counts of (x^x mod p, ord_p x) over the window x in [1, p(p-1)].

    One brute-force pass over the whole window; cached so that repeated
    (y, d) queries against the same p stay cheap.
    """
    orders = residue_orders(p)
    hist: dict[tuple[int, int], int] = {}
    for x in range(1, p * (p - 1) + 1):
        if x % p == 0:
            continue
        key = (pow(x, x, p), orders[x % p])
        hist[key] = hist.get(key, 0) + 1
    return hist


def lifted_solution_count(p: int, y: int, d: int) -> int:
    """Count x in [1, p(p-1)] with p ∤ x, x^x = y mod p and ord_p(x) = d.

    Brute force over the full window. Each residue class a of order d
    admits exactly (p-1)/d window solutions of x^x = y, and there are
    phi(d) such classes, so the count comes out to phi(d)*(p-1)/d.
    """
    _require_prime(p)
    if y % p == 0:
        raise DomainError(f"y must be coprime to {p}")
    if d < 1 or (p - 1) % d != 0:
        raise DomainError(f"{d} does not divide p - 1 = {p - 1}")
    ord_y = multiplicative_order(y, p)
    if d % ord_y != 0:
        raise DomainError(f"ord_{p}({y}) = {ord_y} does not divide d = {d}")
    return _window_histogram(p).get((y % p, d), 0)


def lifted_fixed_total(p: int) -> int:
    """Count x in [1, p(p-1)] with p ∤ x and x^x = x mod p, brute force."""
    _require_prime(p)
    count = 0
    for x in range(1, p * (p - 1) + 1):
        if x % p != 0 and pow(x, x, p) == x % p:
            count += 1
    return count


def lifted_fixed_total_predicted(p: int) -> int:
    """(p-1) * sum over d | p-1 of phi(d)/d, as an exact integer."""
    from fractions import Fraction

    total = Fraction(0)
    for d, ph in divisors_with_phi(p - 1):
        total += Fraction(ph, d)
    value = (p - 1) * total
    assert value.denominator == 1
    return int(value)
