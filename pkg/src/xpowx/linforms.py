"""Sparse linear forms over F_q built from prime exponents.

For a prime q put d = pi(q-1) and index coordinates by the primes
p_1 < ... < p_d <= q-1. Integer n in [1, q-1] yields the form
L_n(v) = sum_i nu_{p_i}(n) * v_i, so L_n has omega(n) nonzero
coefficients and L_1 is the zero form. This module computes ranks of
form subsets mod q, counts of the affine systems {L_n(v) = 1}, exact
and Monte-Carlo avoidance counts N_q(x0) = #{v : L_n(v) != x0 for all
n}, and truncated inclusion-exclusion (Bonferroni) sandwiches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import BudgetError, DomainError
from .modmath import is_prime, log_iter, primes_up_to
from .multind import multiplicative_rank

DEFAULT_EXACT_BUDGET = 2**25  # q^d at most this for exhaustive enumeration

RNG_NAME = "splitmix64-counter"
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class LinForm:
    """One sparse form: coefficient nu_{p_i}(n) at prime index i."""

    n: int
    coeffs: dict[int, int]  # prime index -> exponent, already < q

    @property
    def omega(self) -> int:
        return len(self.coeffs)


class FormFamily:
    """All forms L_1 .. L_{q-1} for a prime q, in sparse row storage."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise DomainError(f"q must be prime (got {q})")
        if q < 3:
            raise DomainError(f"q must be >= 3 (got {q})")
        self.q = q
        sieve = primes_up_to(q - 1)
        self.primes = sieve.primes
        self.d = len(sieve.primes)
        self.prime_index = {p: i for i, p in enumerate(sieve.primes)}
        pidx = np.full(q, -1, np.int32)
        for i, p in enumerate(sieve.primes):
            pidx[p] = i
        spf = _kernels.spf_sieve(q)
        self._indptr, self._cols, self._coefs = _kernels.forms_csr(q, spf, pidx)
        self._packed = None
        self._smooth = None

    def form(self, n: int) -> LinForm:
        if not 1 <= n <= self.q - 1:
            raise DomainError(f"n must lie in [1, {self.q - 1}] (got {n})")
        lo, hi = int(self._indptr[n]), int(self._indptr[n + 1])
        return LinForm(
            n,
            {int(self._cols[t]): int(self._coefs[t]) for t in range(lo, hi)},
        )

    def iter_forms(self) -> Iterable[LinForm]:
        """L_2 through L_{q-1} in ascending n."""
        for n in range(2, self.q):
            yield self.form(n)

    def dense_rows(self, ns: Sequence[int]) -> np.ndarray:
        """Stack of full-width coefficient rows for the given n values."""
        out = np.zeros((len(ns), self.d), dtype=np.int64)
        for i, n in enumerate(ns):
            for c, e in self.form(n).coeffs.items():
                out[i, c] = e
        return out

    def _packed_entries(self):
        if self._packed is None:
            self._packed = _kernels.pack_entries(self._cols, self._coefs)
        return self._packed

    def _smooth_split(self):
        """Lazy smooth-tree decomposition used by the fast MC kernel."""
        if self._smooth is None:
            primes = np.array(self.primes, dtype=np.int64)
            nsmall = int(
                np.searchsorted(primes, math.isqrt(self.q - 1), side="right")
            )
            values, parent, coord = _kernels.smooth_tree(self.q, primes, nsmall)
            mmax = (self.q - 1) // int(primes[nsmall]) if nsmall < self.d else 1
            m_node = np.full(mmax + 1, -1, np.int64)
            index_of = {int(v): i for i, v in enumerate(values)}
            for m in range(2, mmax + 1):
                m_node[m] = index_of[m]
            self._smooth = (primes, nsmall, parent, coord, m_node)
        return self._smooth


@lru_cache(maxsize=4)
def build_family(q: int) -> FormFamily:
    return FormFamily(q)


def eval_form(form: LinForm, v: Sequence[int], q: int) -> int:
    """L_n(v) mod q; cost proportional to the number of nonzero coefficients."""
    acc = 0
    n_coords = len(v)
    for c, e in form.coeffs.items():
        if c >= n_coords:
            raise DomainError(
                f"vector has {n_coords} coordinates but the form uses index {c}"
            )
        acc += e * (v[c] % q)
    return acc % q


def vector_avoids(family: FormFamily, v: Sequence[int], x0: int) -> bool:
    """True when every form L_2 .. L_{q-1} evaluates away from x0 at v."""
    if len(v) != family.d:
        raise DomainError(f"vector must have {family.d} coordinates (got {len(v)})")
    q = family.q
    indptr, cols, coefs = family._indptr, family._cols, family._coefs
    for n in range(2, q):
        acc = 0
        for t in range(int(indptr[n]), int(indptr[n + 1])):
            acc += int(coefs[t]) * (v[int(cols[t])] % q)
        if acc % q == x0:
            return False
    return True


def _eliminate_mod_q(rows: list[dict[int, int]], q: int) -> tuple[int, bool]:
    """(rank of the homogeneous part, consistency of {row = 1}).

    Rows are sparse dicts over column indices; an extra virtual column
    carries the affine right-hand side 1. Elimination works on the union
    of occupied columns only, so the ambient dimension never matters.
    """
    RHS = -1
    work = [{**r, RHS: 1} for r in rows]
    cols_seen = sorted({c for r in rows for c in r})
    rank = 0
    for col in cols_seen:
        piv = None
        for i in range(rank, len(work)):
            if work[i].get(col, 0) % q != 0:
                piv = i
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = pow(work[rank][col] % q, -1, q)
        work[rank] = {c: (val * inv) % q for c, val in work[rank].items()}
        for i in range(len(work)):
            if i != rank:
                f = work[i].get(col, 0) % q
                if f:
                    row = work[rank]
                    tgt = work[i]
                    for c, val in row.items():
                        tgt[c] = (tgt.get(c, 0) - f * val) % q
        rank += 1
        if rank == len(work):
            break
    consistent = all(
        r.get(RHS, 0) % q == 0
        for r in work[rank:]
    )
    # rows reduced to nothing but a nonzero RHS are contradictions
    for i in range(rank, len(work)):
        if any(c != RHS and v % q != 0 for c, v in work[i].items()):
            raise AssertionError("elimination left an unreduced row")
    return rank, consistent


def rank_mod_q(forms: Sequence[LinForm], q: int) -> int:
    """Rank over F_q of the given forms."""
    if not forms:
        raise DomainError("rank of an empty set of forms is not defined")
    rank, _ = _eliminate_mod_q([f.coeffs for f in forms], q)
    return rank


@dataclass(frozen=True)
class AffineCount:
    """Solution count of {L_n(v) = 1, n in S} as a power of q.

    ``exponent`` is d - rank for a consistent system and None for an
    inconsistent one (zero solutions). ``zero_form_conflict`` flags that
    S contained n = 1, whose zero form can never equal 1.
    """

    q: int
    d: int
    exponent: int | None
    zero_form_conflict: bool = False

    @property
    def count(self) -> int:
        return 0 if self.exponent is None else self.q**self.exponent


def count_affine_solutions(family: FormFamily, ns: Sequence[int]) -> AffineCount:
    """Number of v in F_q^d with L_n(v) = 1 for every n in ns."""
    ns = list(ns)
    q, d = family.q, family.d
    if not ns:
        return AffineCount(q, d, d)
    if any(not 1 <= n <= q - 1 for n in ns):
        raise DomainError(f"all n must lie in [1, {q - 1}] (got {ns})")
    if 1 in ns:
        return AffineCount(q, d, None, zero_form_conflict=True)
    rank, consistent = _eliminate_mod_q([family.form(n).coeffs for n in ns], q)
    return AffineCount(q, d, d - rank if consistent else None)


def _check_budget(q: int, d: int, budget: int) -> int:
    total = q**d
    if total > budget:
        raise BudgetError(
            f"exhaustive enumeration needs q^d = {q}^{d} = {total} vectors, "
            f"above the budget of {budget}",
            required=total,
            budget=budget,
        )
    return total


def _avoid_counts_dense(
    q: int, rows: np.ndarray, x0s: Sequence[int], budget: int
) -> list[int]:
    """Exhaustive avoidance counts over F_q^d for each target in x0s.

    Enumerates all q^d vectors in mixed-radix chunks and evaluates the
    dense form matrix on each chunk.
    """
    d = rows.shape[1] if rows.size else 0
    total = _check_budget(q, d, budget)
    counts = [0] * len(x0s)
    if rows.shape[0] == 0:
        return [total] * len(x0s)
    chunk = 1 << 16
    radix = np.array([q**j for j in range(d)], dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        V = (idx[None, :] // radix[:, None]) % q
        R = (rows @ V) % q
        for i, x0 in enumerate(x0s):
            counts[i] += int(np.all(R != x0, axis=0).sum())
    return counts


def exact_Nq(q: int, x0: int = 1, budget: int = DEFAULT_EXACT_BUDGET) -> int:
    """N_q(x0): vectors avoiding x0 under every form, by full enumeration."""
    family = build_family(q)
    if not 1 <= x0 <= q - 1:
        raise DomainError(f"x0 must be a nonzero residue mod {q} (got {x0})")
    rows = family.dense_rows(list(range(2, q)))
    return _avoid_counts_dense(q, rows, [x0], budget)[0]


def exact_Nq_all_targets(q: int, budget: int = DEFAULT_EXACT_BUDGET) -> list[int]:
    """N_q(x0) for every x0 in [1, q-1], sharing one enumeration pass."""
    family = build_family(q)
    rows = family.dense_rows(list(range(2, q)))
    return _avoid_counts_dense(q, rows, list(range(1, q)), budget)


def check_scaling_symmetry(q: int, budget: int = DEFAULT_EXACT_BUDGET) -> bool:
    """True when N_q(x0) is the same for every nonzero x0 (it always is:
    v -> x0*v bijects the two avoidance sets)."""
    counts = exact_Nq_all_targets(q, budget)
    return len(set(counts)) == 1


@dataclass(frozen=True)
class AvoidanceEstimate:
    """Exact or sampled value of c(q) = N_q / q^d."""

    q: int
    x0: int
    mode: str  # "exact" | "mc"
    value: float
    samples: int
    stderr: float
    seed: int | None
    generator: str | None
    exact_count: int | None = None
    d: int = 0

    @property
    def exact_fraction_str(self) -> str | None:
        if self.exact_count is None:
            return None
        return f"{self.exact_count}/{self.q ** self.d}"


def exact_estimate(q: int, x0: int = 1, budget: int = DEFAULT_EXACT_BUDGET) -> AvoidanceEstimate:
    family = build_family(q)
    n = exact_Nq(q, x0, budget)
    total = q**family.d
    return AvoidanceEstimate(
        q=q,
        x0=x0,
        mode="exact",
        value=n / total,
        samples=total,
        stderr=0.0,
        seed=None,
        generator=None,
        exact_count=n,
        d=family.d,
    )


def mc_estimate_c(
    q: int,
    x0: int = 1,
    samples: int = 10**5,
    seed: int = 0,
    use_reference_kernel: bool = False,
) -> AvoidanceEstimate:
    """Monte-Carlo estimate of c(q) with binomial standard error.

    Each sample draws v uniformly from F_q^d coordinate-by-coordinate
    with the splitmix64 counter generator (value of coordinate c in
    sample s depends only on (seed, s, c)), counts a hit when every form
    avoids x0, and early-exits on the first violation. The default
    kernel groups forms by largest prime factor; the reference kernel
    walks forms in ascending n. Both see identical coordinates, so their
    hit counts agree exactly.
    """
    family = build_family(q)
    if not 1 <= x0 <= q - 1:
        raise DomainError(f"x0 must be a nonzero residue mod {q} (got {x0})")
    if samples < 1:
        raise DomainError(f"samples must be >= 1 (got {samples})")
    seed_u = np.uint64(seed & _MASK64)
    nchunks = min(64, samples)
    if use_reference_kernel:
        hits = _kernels.mc_avoidance_hits(
            q, x0, family.d, family._indptr, family._packed_entries(),
            seed_u, samples, nchunks,
        )
    else:
        primes, nsmall, parent, coord, m_node = family._smooth_split()
        hits = _kernels.mc_avoidance_hits_split(
            q, x0, primes, nsmall, parent, coord, m_node,
            seed_u, samples, nchunks,
        )
    value = hits / samples
    return AvoidanceEstimate(
        q=q,
        x0=x0,
        mode="mc",
        value=value,
        samples=samples,
        stderr=math.sqrt(value * (1.0 - value) / samples),
        seed=seed,
        generator=RNG_NAME,
        d=family.d,
    )


@dataclass(frozen=True)
class RankComparison:
    """Multiplicative rank vs F_q rank of the forms of a tuple."""

    q: int
    ns: tuple[int, ...]
    mult_rank: int
    fq_rank: int
    agree: bool
    hadamard_bound: float
    k_hypothesis_ok: bool  # k < log(q) / (10 * loglog(q)), clamped logs


def check_lemma22(q: int, ns: Sequence[int]) -> RankComparison:
    """Compare the two ranks for a tuple of distinct n in [2, q-1].

    Multiplicative dependence always forces F_q dependence (reducing the
    integer relation mod q), so fq_rank <= mult_rank. Equality can only
    fail when q divides every maximal minor of the exponent matrix; the
    reported Hadamard bound k^(k/2) * prod_j log(q)/log(p_j) caps those
    minors, and when it is below q equality is forced.
    """
    family = build_family(q)
    ns = tuple(ns)
    if any(not 2 <= n <= q - 1 for n in ns):
        raise DomainError(f"tuple entries must lie in [2, {q - 1}] (got {ns})")
    k = len(ns)
    mrank = multiplicative_rank(ns)
    frank = rank_mod_q([family.form(n) for n in ns], q)
    logq = log_iter(1, q)
    bound = k ** (k / 2.0)
    for j in range(k):
        bound *= logq / log_iter(1, family.primes[j])
    hyp = k < logq / (10.0 * log_iter(2, q))
    return RankComparison(q, ns, mrank, frank, mrank == frank, bound, hyp)


@dataclass(frozen=True)
class BonferroniBounds:
    """Truncated inclusion-exclusion sandwich around an avoidance count.

    lower (depth 2K-1) <= #{v : L_n(v) != 1 for all n in the family}
    <= upper (depth 2K); ``exact`` is filled by enumeration when q^d
    fits the budget, and ``is_tight`` marks truncation depths that
    already cover every subset size.
    """

    q: int
    K: int
    lower: int
    upper: int
    exact: int | None
    is_tight: bool


def bonferroni_bounds(
    q: int,
    members: Sequence[int],
    K: int,
    exact_budget: int | None = DEFAULT_EXACT_BUDGET,
) -> BonferroniBounds:
    """Alternating-sum sandwich over subsets S of the given family.

    Sums (-1)^|S| * M_{q,S} with M_{q,S} the count of {L_n(v) = 1 for
    n in S}; truncation after an odd subset size bounds the avoidance
    count from below, after an even size from above.
    """
    members = sorted(set(int(n) for n in members))
    family = build_family(q)
    if len(members) > 20:
        raise BudgetError(
            f"family of {len(members)} forms would need 2^{len(members)} subsets",
            required=2 ** len(members),
            budget=2**20,
        )
    if any(not 2 <= n <= q - 1 for n in members):
        raise DomainError(f"members must lie in [2, {q - 1}] (got {members})")
    if K < 1:
        raise DomainError(f"K must be >= 1 (got {K})")
    m = len(members)
    d = family.d
    # every term is divisible by q^(d - m); sum the reduced terms
    base = max(d - m, 0)
    layer: list[int] = []
    for size in range(0, min(2 * K, m) + 1):
        tot = 0
        for subset in combinations(members, size):
            ac = count_affine_solutions(family, subset)
            if ac.exponent is not None:
                tot += q ** (ac.exponent - base)
        layer.append(tot)

    def truncated(depth: int) -> int:
        s = 0
        for size in range(0, min(depth, m) + 1):
            s += (-1) ** size * layer[size]
        return s * q**base

    lower, upper = truncated(2 * K - 1), truncated(2 * K)
    exact = None
    if exact_budget is not None and q**d <= exact_budget:
        rows = family.dense_rows(members)
        exact = _avoid_counts_dense(q, rows, [1], exact_budget)[0]
    return BonferroniBounds(
        q=q,
        K=K,
        lower=lower,
        upper=upper,
        exact=exact,
        is_tight=2 * K - 1 >= m,
    )
