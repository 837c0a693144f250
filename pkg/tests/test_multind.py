"""Tests for multiplicative-independence machinery.

The central oracle enumerates exponent vectors with entries in [-6, 6]
and accepts a relation only after an exact big-integer product check;
float log sums are used purely to prescreen candidates (a true relation
sums to zero exactly, so rounding noise below 1e-9 cannot hide one).
"""

import itertools
import math
import random

import numpy as np
import pytest

from xpowx.errors import DomainError
from xpowx.multind import (
    MultRelation,
    dependent_pair_count_bruteforce,
    dependent_pair_count_exact,
    exponent_matrix,
    find_relation,
    integer_root,
    is_mult_independent,
    is_perfect_power,
    multiplicative_rank,
    sample_dependence_rate,
)


def exact_product_is_one(nums, alphas) -> bool:
    num = den = 1
    for n, a in zip(nums, alphas):
        if a > 0:
            num *= n**a
        elif a < 0:
            den *= n ** (-a)
    return num == den


def alpha_search_dependent(nums, bound=6) -> bool:
    """Brute-force dependence oracle over the exponent box [-bound, bound]^k.

    Prescreens with float log sums, then verifies candidates exactly.
    """
    k = len(nums)
    logs = np.array([math.log(n) for n in nums])
    grid = np.array(
        list(itertools.product(range(-bound, bound + 1), repeat=k)), dtype=np.int64
    )
    sums = grid.astype(np.float64) @ logs
    for idx in np.flatnonzero(np.abs(sums) < 1e-9):
        alpha = grid[idx]
        if not np.any(alpha):
            continue
        if exact_product_is_one(nums, alpha.tolist()):
            return True
    return False


# --- exponent matrices -----------------------------------------------------------


def test_exponent_matrix_examples():
    assert exponent_matrix((2, 3)).entries == ((1, 0), (0, 1))
    em = exponent_matrix((2, 3, 6))
    assert em.primes == (2, 3) and em.entries == ((1, 0), (0, 1), (1, 1))
    assert exponent_matrix((4, 8)).entries == ((2,), (3,))


def test_exponent_matrix_reconstructs_rows():
    rng = random.Random(4)
    for _ in range(50):
        nums = rng.sample(range(2, 5000), rng.randint(1, 6))
        em = exponent_matrix(nums)
        for n, row in zip(em.tuple, em.entries):
            prod = 1
            for p, e in zip(em.primes, row):
                prod *= p**e
            assert prod == n
            assert any(row)  # no all-zero row for n >= 2


def test_exponent_matrix_rejects_bad_input():
    with pytest.raises(DomainError):
        exponent_matrix((1, 3))
    with pytest.raises(DomainError):
        exponent_matrix((2, 2))


# --- rank -------------------------------------------------------------------------


def test_rank_examples():
    assert multiplicative_rank((2, 3, 5)) == 3
    assert multiplicative_rank((2, 3, 6)) == 2  # row3 = row1 + row2
    assert multiplicative_rank((4, 8)) == 1  # 4^3 = 8^2


def test_rank_bounds_and_coprime_case():
    rng = random.Random(11)
    for _ in range(100):
        nums = rng.sample(range(2, 2000), rng.randint(2, 5))
        em = exponent_matrix(nums)
        r = multiplicative_rank(nums)
        assert r <= min(len(nums), len(em.primes))
        if all(math.gcd(a, b) == 1 for a, b in itertools.combinations(nums, 2)):
            assert r == len(nums)


def test_independence_examples():
    assert is_mult_independent((2, 3))
    assert not is_mult_independent((2, 4))
    assert is_mult_independent((6, 10, 15))  # det = -2 over primes 2, 3, 5


def _check_against_search(subset, search_dependent: bool) -> None:
    """Two-sided certificate check of the rank decision.

    The boxed search is sound but not complete (the minimal relation of
    (9, 24, 48) is (1, -8, 6), outside the box), so: a search hit must
    coincide with rank dependence, and every rank dependence must be
    backed by an exactly verified relation from find_relation.
    """
    independent = is_mult_independent(subset)
    if search_dependent:
        assert not independent, subset
    if independent:
        assert not search_dependent, subset
        assert find_relation(subset) is None, subset
    else:
        rel = find_relation(subset)
        assert rel is not None and exact_product_is_one(subset, rel.alphas), subset


def test_independence_certified_against_alpha_search_pairs():
    for pair in itertools.combinations(range(2, 51), 2):
        _check_against_search(pair, alpha_search_dependent(pair))


def test_independence_certified_against_alpha_search_all_small_subsets():
    # every k-subset of [2, 50] for k = 3, 4 (pairs covered exhaustively above)
    logs = {n: math.log(n) for n in range(2, 51)}
    for k in (3, 4):
        grid = np.array(
            list(itertools.product(range(-6, 7), repeat=k)), dtype=np.int64
        )
        gridf = grid.astype(np.float64)
        nonzero = np.any(grid != 0, axis=1)
        subsets = list(itertools.combinations(range(2, 51), k))
        lows = np.array([[logs[n] for n in s] for s in subsets])
        chunk = 2048
        for start in range(0, len(subsets), chunk):
            block = subsets[start : start + chunk]
            sums = gridf @ lows[start : start + chunk].T
            near = (np.abs(sums) < 1e-9) & nonzero[:, None]
            for j, subset in enumerate(block):
                dependent = False
                for idx in np.flatnonzero(near[:, j]):
                    if exact_product_is_one(subset, grid[idx].tolist()):
                        dependent = True
                        break
                _check_against_search(subset, dependent)


# --- relations ----------------------------------------------------------------------


def test_relation_examples():
    assert find_relation((2, 3, 6)) == MultRelation((1, 1, -1))
    assert find_relation((4, 8)) == MultRelation((3, -2))
    assert find_relation((2, 3)) is None


def test_relation_verifies_exactly_on_random_dependent_tuples():
    rng = random.Random(23)
    found = 0
    for _ in range(500):
        base = rng.randint(2, 30)
        tup = [base ** rng.randint(1, 3), base ** rng.randint(2, 4)]
        tup.extend(rng.sample(range(2, 400), rng.randint(0, 3)))
        tup = list(dict.fromkeys(tup))
        rel = find_relation(tup)
        if rel is None:
            assert is_mult_independent(tup)
            continue
        found += 1
        alphas = rel.alphas
        assert any(alphas)
        assert math.gcd(*alphas) == 1
        assert next(a for a in alphas if a) > 0
        assert exact_product_is_one(tup, alphas)
    assert found > 300


def test_relation_is_deterministic():
    tup = (12, 18, 8, 27)
    assert find_relation(tup) == find_relation(tup)


# --- perfect powers and pair counts ---------------------------------------------------


def test_integer_root_exact():
    for n in list(range(0, 200)) + [10**12, 10**12 + 1, 2**60 - 1]:
        for k in (1, 2, 3, 5, 7):
            r = integer_root(n, k)
            assert r**k <= n < (r + 1) ** k, (n, k)


def test_perfect_power_detection_vs_enumeration():
    powers = set()
    for a in range(2, 1500):
        v = a * a
        while v < 2_000_000:
            powers.add(v)
            v *= a
    for n in list(range(2, 5000)) + [1024, 59049, 1048576, 1000003]:
        assert is_perfect_power(n) == (n in powers), n


def test_dependent_pair_counts_regressions():
    assert dependent_pair_count_exact(5) == 1  # {2, 4}
    assert dependent_pair_count_exact(10) == 4  # {2,4} {2,8} {4,8} {3,9}
    assert dependent_pair_count_exact(17) == 7  # six inside {2,4,8,16} plus {3,9}


def test_dependent_pair_counts_match_rank_bruteforce():
    for q in (3, 5, 10, 17, 30, 100, 300):
        assert dependent_pair_count_exact(q) == dependent_pair_count_bruteforce(q), q


def test_dependent_pair_count_monotone():
    counts = [dependent_pair_count_exact(q) for q in range(3, 400)]
    assert counts == sorted(counts)


# --- sampling -------------------------------------------------------------------------


def test_sampler_on_power_pool_is_always_dependent():
    frac, stderr = sample_dependence_rate([2, 4, 8, 16, 32, 64], 3, 200, seed=5)
    assert frac == 1.0 and stderr == 0.0


def test_sampler_matches_exhaustive_pair_rate():
    # [2, 9] holds 4 dependent pairs out of C(8, 2) = 28
    pool = list(range(2, 10))
    dependent = sum(
        1 for pair in itertools.combinations(pool, 2) if not is_mult_independent(pair)
    )
    assert dependent == 4
    frac, stderr = sample_dependence_rate(pool, 2, 20000, seed=1)
    assert abs(frac - dependent / 28) <= 4 * max(stderr, 1e-6)


def test_sampler_is_deterministic_in_seed():
    pool = list(range(2, 500))
    a = sample_dependence_rate(pool, 3, 500, seed=42)
    b = sample_dependence_rate(pool, 3, 500, seed=42)
    assert a == b


def test_sampler_rejects_bad_arguments():
    with pytest.raises(DomainError):
        sample_dependence_rate([2, 3], 2, 0, seed=1)
    with pytest.raises(DomainError):
        sample_dependence_rate([2, 3], 3, 10, seed=1)
