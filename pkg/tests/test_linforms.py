"""Tests for the sparse form family, rank/count machinery, and estimators."""

import itertools
import math
import random

import numpy as np
import pytest

from xpowx.errors import BudgetError, DomainError
from xpowx import _kernels
from xpowx.linforms import (
    bonferroni_bounds,
    build_family,
    check_lemma22,
    check_scaling_symmetry,
    count_affine_solutions,
    eval_form,
    exact_Nq,
    exact_Nq_all_targets,
    exact_estimate,
    mc_estimate_c,
    rank_mod_q,
    vector_avoids,
)
from xpowx.modmath import factorize, primes_up_to
from xpowx.multind import multiplicative_rank


def naive_Nq(q: int, x0: int) -> int:
    """Independent enumeration straight from the definitions: factor each
    n by trial division, evaluate each form by a dict product, loop all
    vectors with itertools."""
    primes = [p for p in range(2, q) if all(p % r for r in range(2, p))]
    d = len(primes)
    coeff_rows = []
    for n in range(2, q):
        row = {}
        m, i = n, 0
        for i, p in enumerate(primes):
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e:
                row[i] = e
        coeff_rows.append(row)
    count = 0
    for v in itertools.product(range(q), repeat=d):
        if all(sum(e * v[i] for i, e in row.items()) % q != x0 for row in coeff_rows):
            count += 1
    return count


def brute_affine_count(q: int, rows: list[dict[int, int]], d: int) -> int:
    count = 0
    for v in itertools.product(range(q), repeat=d):
        if all(sum(e * v[i] for i, e in row.items()) % q == 1 for row in rows):
            count += 1
    return count


# --- family construction ----------------------------------------------------------


def test_family_examples():
    fam = build_family(5)
    assert fam.d == 2 and fam.primes == (2, 3)
    assert fam.form(2).coeffs == {0: 1}
    assert fam.form(3).coeffs == {1: 1}
    assert fam.form(4).coeffs == {0: 2}
    fam7 = build_family(7)
    assert fam7.d == 3
    assert fam7.form(6).coeffs == {0: 1, 1: 1}
    assert fam7.form(1).coeffs == {}  # the zero form


def test_family_rejects_composite_or_tiny_q():
    with pytest.raises(DomainError):
        build_family(9)
    with pytest.raises(DomainError):
        build_family(2)


def test_form_sparsity_matches_omega():
    for q in (5, 7, 101, 1009):
        fam = build_family(q)
        for n in range(2, q):
            assert fam.form(n).omega == factorize(n).omega, (q, n)


def test_form_coefficients_reconstruct_n():
    fam = build_family(101)
    for n in range(1, 101):
        prod = 1
        for c, e in fam.form(n).coeffs.items():
            prod *= fam.primes[c] ** e
        assert prod == n


# --- evaluation ---------------------------------------------------------------------


def test_eval_examples():
    fam = build_family(5)
    assert eval_form(fam.form(4), (3, 1), 5) == 1  # 2*3 mod 5
    fam7 = build_family(7)
    for v in itertools.product(range(7), repeat=3):
        assert eval_form(fam7.form(1), v, 7) == 0
    assert eval_form(fam7.form(6), (0, 0, 0), 7) == 0


def test_eval_dimension_mismatch():
    fam = build_family(7)
    with pytest.raises(DomainError):
        eval_form(fam.form(5), (1,), 7)


# --- rank ----------------------------------------------------------------------------


def test_rank_examples():
    fam = build_family(5)
    assert rank_mod_q([fam.form(2), fam.form(3)], 5) == 2
    assert rank_mod_q([fam.form(2), fam.form(4)], 5) == 1
    fam7 = build_family(7)
    assert rank_mod_q([fam7.form(2), fam7.form(3), fam7.form(6)], 7) == 2


def test_rank_empty_set_rejected():
    with pytest.raises(DomainError):
        rank_mod_q([], 7)


def test_rank_sandwich_random_tuples():
    rng = random.Random(2024)
    for q in (101, 10007):
        fam = build_family(q)
        for _ in range(300):
            k = rng.randint(1, 5)
            ns = rng.sample(range(2, q), k)
            fq = rank_mod_q([fam.form(n) for n in ns], q)
            mr = multiplicative_rank(ns)
            assert fq <= mr <= k, (q, ns)


# --- affine counts -------------------------------------------------------------------


def test_affine_count_examples():
    fam = build_family(5)
    assert count_affine_solutions(fam, []).count == 25
    assert count_affine_solutions(fam, [2, 4]).count == 0
    assert count_affine_solutions(fam, [2, 3]).count == 1
    conflicted = count_affine_solutions(fam, [1, 3])
    assert conflicted.count == 0 and conflicted.zero_form_conflict


def test_affine_count_matches_enumeration_random():
    rng = random.Random(7)
    for q in (5, 7, 11):
        fam = build_family(q)
        for _ in range(40):
            k = rng.randint(1, 5)
            ns = rng.sample(range(2, q), min(k, q - 3))
            expect = brute_affine_count(q, [fam.form(n).coeffs for n in ns], fam.d)
            assert count_affine_solutions(fam, ns).count == expect, (q, ns)


# --- exact avoidance -----------------------------------------------------------------


def test_exact_Nq_matches_naive_oracle_small():
    for q in (3, 5, 7):
        for x0 in (1, q - 1):
            assert exact_Nq(q, x0) == naive_Nq(q, x0), (q, x0)


def test_exact_Nq_regressions():
    assert exact_Nq(3) == 2
    assert exact_Nq(5) == 12
    assert exact_Nq(7) == 156
    assert exact_Nq(11) == 5940
    assert exact_Nq(13) == 148896


def test_exact_estimate_fraction_string():
    est = exact_estimate(7)
    assert est.exact_fraction_str == "156/343"
    assert est.value == pytest.approx(156 / 343)


def test_scaling_symmetry_small():
    for q in (3, 5, 7, 11):
        assert check_scaling_symmetry(q)
        counts = exact_Nq_all_targets(q)
        assert len(set(counts)) == 1 and len(counts) == q - 1


def test_budget_refusal_names_requirement():
    with pytest.raises(BudgetError) as exc:
        exact_Nq(23)
    assert exc.value.required == 23**8
    assert "23^8" in str(exc.value)


def test_exact_Nq_validates_x0():
    with pytest.raises(DomainError):
        exact_Nq(7, 0)
    with pytest.raises(DomainError):
        exact_Nq(7, 7)


# --- Monte Carlo ---------------------------------------------------------------------


def test_zero_vector_always_avoids():
    fam = build_family(7)
    assert vector_avoids(fam, [0, 0, 0], 1)
    assert vector_avoids(fam, [0, 0, 0], 6)
    assert not vector_avoids(fam, [1, 0, 0], 1)  # L_2 hits


def test_mc_within_four_stderr_of_exact():
    exact = 156 / 343
    est = mc_estimate_c(7, samples=200000, seed=20240809)
    assert est.mode == "mc" and est.generator == "splitmix64-counter"
    assert abs(est.value - exact) <= 4 * est.stderr


def test_mc_deterministic_and_kernels_agree():
    for q in (3, 101, 1009):
        a = mc_estimate_c(q, samples=5000, seed=5)
        b = mc_estimate_c(q, samples=5000, seed=5)
        ref = mc_estimate_c(q, samples=5000, seed=5, use_reference_kernel=True)
        assert a.value == b.value == ref.value


def test_mc_hits_independent_of_chunking():
    q = 101
    fam = build_family(q)
    primes, nsmall, parent, coord, m_node = fam._smooth_split()
    seed = np.uint64(99)
    hits = [
        _kernels.mc_avoidance_hits_split(
            q, 1, primes, nsmall, parent, coord, m_node, seed, 4000, nchunks
        )
        for nchunks in (1, 3, 16, 64)
    ]
    assert len(set(hits)) == 1


def test_mc_matches_per_sample_python_checker():
    q = 11
    fam = build_family(q)
    seed = np.uint64(7)
    samples = 400
    expected_hits = 0
    for s in range(samples):
        v = [int(_kernels.draw_coordinate(seed, s, c, q)) for c in range(fam.d)]
        if vector_avoids(fam, v, 1):
            expected_hits += 1
    est = mc_estimate_c(q, samples=samples, seed=7)
    assert round(est.value * samples) == expected_hits


def test_mc_validates_arguments():
    with pytest.raises(DomainError):
        mc_estimate_c(7, samples=0, seed=1)
    with pytest.raises(DomainError):
        mc_estimate_c(7, x0=0, samples=10, seed=1)


# --- rank comparison record ------------------------------------------------------------


def test_lemma22_record_example():
    rc = check_lemma22(7, (2, 3, 6))
    assert rc.mult_rank == 2 and rc.fq_rank == 2 and rc.agree


def test_lemma22_distinct_primes_full_rank():
    qs = (101, 10007)
    for q in qs:
        ps = [p for p in primes_up_to(50).primes]
        rc = check_lemma22(q, ps[:4])
        assert rc.mult_rank == rc.fq_rank == 4
        assert rc.hadamard_bound > 0


def test_lemma22_dependent_direction():
    rng = random.Random(31)
    for _ in range(200):
        q = 10007
        k = rng.randint(2, 5)
        ns = rng.sample(range(2, 10007), k)
        rc = check_lemma22(q, ns)
        assert rc.fq_rank <= rc.mult_rank


# --- Bonferroni -------------------------------------------------------------------------


def test_bonferroni_hand_example():
    bb = bonferroni_bounds(5, [2, 3, 4], 1)
    assert (bb.lower, bb.upper, bb.exact) == (10, 12, 12)
    assert not bb.is_tight


def test_bonferroni_tight_when_depth_covers_family():
    bb = bonferroni_bounds(5, [2, 3, 4], 2)
    assert bb.lower == bb.upper == bb.exact == 12
    assert bb.is_tight


def test_bonferroni_sandwich_random_families():
    rng = random.Random(99)
    for q in (5, 7, 11):
        for _ in range(25):
            size = rng.randint(1, min(8, q - 2))
            members = rng.sample(range(2, q), size)
            for K in range(1, size // 2 + 2):
                bb = bonferroni_bounds(q, members, K)
                assert bb.lower <= bb.exact <= bb.upper, (q, members, K)


def test_bonferroni_refuses_oversized_family():
    with pytest.raises(BudgetError):
        bonferroni_bounds(101, list(range(2, 30)), 1)
