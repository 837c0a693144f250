"""Numba kernels for the bulk computations.

Everything here is deterministic. The Monte-Carlo kernel uses a
counter-based generator (splitmix64 evaluated at index seed + key*phi64,
key = sample << 32 | coordinate, with rejection to kill modulo bias), so
results depend only on (seed, sample count) and never on thread count or
chunking.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U32 = np.uint64(32)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _reject_threshold(q):
    """Largest acceptable raw draw: values above it would bias z % q."""
    qu = np.uint64(q)
    rem = (_MASK64 % qu + np.uint64(1)) % qu  # 2^64 mod q
    return _MASK64 - rem


@njit(cache=True, inline="always")
def _draw(seed, sample, coord, q, threshold):
    """Uniform residue in [0, q) for the (sample, coord) counter."""
    key = (np.uint64(sample) << _U32) ^ np.uint64(coord)
    z = _mix64(np.uint64(seed) + key * _GOLDEN)
    while z > threshold:
        z = _mix64(z + _GOLDEN)
    return np.int64(z % np.uint64(q))


@njit(cache=True)
def draw_coordinate(seed, sample, coord, q):
    """Python-visible wrapper used by tests and the scalar fallbacks."""
    return _draw(np.uint64(seed), sample, coord, q, _reject_threshold(q))


@njit(cache=True)
def spf_sieve(limit):
    """Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, np.int32)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            for j in range(i, limit + 1, i):
                if spf[j] == 0:
                    spf[j] = i
    return spf


@njit(cache=True)
def forms_csr(q, spf, prime_index):
    """Sparse rows of prime-exponent coefficient vectors for n in [0, q).

    Row n holds (column, exponent) pairs for each prime power dividing n,
    columns ordered by increasing prime. Rows 0 and 1 are empty.
    """
    counts = np.zeros(q + 1, np.int64)
    for n in range(2, q):
        m = n
        while m > 1:
            p = spf[m]
            counts[n + 1] += 1
            while m % p == 0:
                m //= p
    indptr = np.zeros(q + 1, np.int64)
    for n in range(1, q + 1):
        indptr[n] = indptr[n - 1] + counts[n]
    cols = np.empty(indptr[q], np.int32)
    coefs = np.empty(indptr[q], np.int64)
    for n in range(2, q):
        pos = indptr[n]
        m = n
        while m > 1:
            p = spf[m]
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            cols[pos] = prime_index[p]
            coefs[pos] = e
            pos += 1
    return indptr, cols, coefs


def pack_entries(cols, coefs):
    """Fuse (column, coefficient) into one int64 per entry for the kernel."""
    return (coefs.astype(np.int64) << 32) | cols.astype(np.int64)


@njit(cache=True, parallel=True)
def mc_avoidance_hits(q, x0, d, indptr, packed, seed, nsamples, nchunks):
    """Number of sampled vectors whose every form value misses x0.

    Vectors are implicit: coordinate i of sample s is drawn lazily on
    first touch via the counter-based generator. Forms are checked in
    ascending n with early exit on the first hit. The residue test uses
    an exact float-reciprocal reduction: accumulators stay below
    2^45 << 2^53, so the rounded quotient is off by at most one and two
    conditional corrections restore the true remainder.
    """
    threshold = _reject_threshold(q)
    seed_u = np.uint64(seed)
    qinv = 1.0 / q
    hits = 0
    for chunk in prange(nchunks):
        lo = chunk * nsamples // nchunks
        hi = (chunk + 1) * nsamples // nchunks
        # stamp and value for coordinate c sit in one cache line at 2c
        sv = np.full(2 * d, -1, np.int64)
        local = 0
        for s in range(lo, hi):
            ok = True
            for n in range(2, q):
                acc = np.int64(0)
                for t in range(indptr[n], indptr[n + 1]):
                    e = packed[t]
                    c = (e & 0xFFFFFFFF) * 2
                    if sv[c] != s:
                        sv[c] = s
                        sv[c + 1] = _draw(seed_u, s, e & 0xFFFFFFFF, q, threshold)
                    acc += (e >> 32) * sv[c + 1]
                if acc >= q:
                    r = acc - np.int64(acc * qinv) * q
                    if r < 0:
                        r += q
                    elif r >= q:
                        r -= q
                    acc = r
                if acc == x0:
                    ok = False
                    break
            if ok:
                local += 1
        hits += local
    return hits


@njit(cache=True)
def smooth_tree(q, primes, nsmall):
    """Preorder enumeration of the sqrt(q)-smooth integers in [2, q).

    Returns (values, parent, coord): node i is values[i] =
    values[parent[i]] * primes[coord[i]] (parent -1 encodes the root
    value 1), with every parent listed before its children. A linear-form
    evaluation at a vector v then folds each node with a single modular
    add of v[coord[i]], because exponents enter coordinate-by-coordinate
    along power chains.
    """
    cap = 512
    est = q  # upper bound on node count; trimmed on return
    values = np.empty(est, np.int64)
    parent = np.empty(est, np.int32)
    coord = np.empty(est, np.int32)
    stack_val = np.empty(cap, np.int64)
    stack_node = np.empty(cap, np.int32)
    stack_j = np.empty(cap, np.int32)
    top = 0
    stack_val[0] = 1
    stack_node[0] = -1
    stack_j[0] = 0
    top = 1
    count = 0
    while top > 0:
        top -= 1
        value = stack_val[top]
        node = stack_node[top]
        j = stack_j[top]
        if j >= nsmall or value * primes[j] >= q:
            continue
        # revisit this node later for primes beyond j
        stack_val[top] = value
        stack_node[top] = node
        stack_j[top] = j + 1
        top += 1
        # descend the power chain of primes[j]
        v2 = value * primes[j]
        par = node
        while v2 < q:
            values[count] = v2
            parent[count] = par
            coord[count] = j
            par = count
            count += 1
            if top >= cap:
                raise ValueError("smooth enumeration stack overflow")
            stack_val[top] = v2
            stack_node[top] = par
            stack_j[top] = j + 1
            top += 1
            v2 *= primes[j]
    return values[:count].copy(), parent[:count].copy(), coord[:count].copy()


@njit(cache=True, parallel=True)
def mc_avoidance_hits_split(
    q, x0, primes, nsmall, parent, coord, m_node, seed, nsamples, nchunks
):
    """Fast path of mc_avoidance_hits; produces identical hit counts.

    Splits the forms by largest prime factor: the smooth ones are folded
    over the precomputed tree, and for each prime p > sqrt(q-1) the forms
    indexed by n = m*p (m <= (q-1)/p) all read the single coordinate
    v_p, so they reduce to one membership test of v_p against the marked
    values {x0 - L_m}. Coordinates are drawn by the same counter-based
    generator as the reference kernel, hence the exact equality of
    results.
    """
    d = primes.shape[0]
    nnodes = parent.shape[0]
    threshold = _reject_threshold(q)
    seed_u = np.uint64(seed)
    hits = 0
    for chunk in prange(nchunks):
        lo = chunk * nsamples // nchunks
        hi = (chunk + 1) * nsamples // nchunks
        lvals = np.empty(nnodes, np.int64)
        marks = np.full(q, -1, np.int64)
        u = np.empty(nsmall, np.int64)
        local = 0
        for s in range(lo, hi):
            for j in range(nsmall):
                u[j] = _draw(seed_u, s, j, q, threshold)
            ok = True
            for i in range(nnodes):
                par = parent[i]
                l = u[coord[i]] if par < 0 else lvals[par] + u[coord[i]]
                if l >= q:
                    l -= q
                lvals[i] = l
                if l == x0:
                    ok = False
                    break
            if ok:
                mprev = 0
                for idx in range(d - 1, nsmall - 1, -1):
                    mp = (q - 1) // primes[idx]
                    while mprev < mp:
                        mprev += 1
                        lm = np.int64(0) if mprev == 1 else lvals[m_node[mprev]]
                        t = x0 - lm
                        if t < 0:
                            t += q
                        marks[t] = s
                    vp = _draw(seed_u, s, idx, q, threshold)
                    if marks[vp] == s:
                        ok = False
                        break
            if ok:
                local += 1
        hits += local
    return hits


@njit(cache=True)
def _pow_mod_i64(base, exp, m):
    r = np.int64(1)
    b = base % m
    e = exp
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(cache=True)
def _gcd_i64(a, b):
    while b != 0:
        a, b = b, a % b
    return a


@njit(cache=True)
def _distinct_prime_factors(m, small_primes, out):
    """Fill ``out`` with the distinct prime factors of m; return count."""
    cnt = 0
    for idx in range(small_primes.shape[0]):
        p = small_primes[idx]
        if p * p > m:
            break
        if m % p == 0:
            out[cnt] = p
            cnt += 1
            while m % p == 0:
                m //= p
    if m > 1:
        out[cnt] = m
        cnt += 1
    return cnt


@njit(cache=True)
def _find_generator(p, factors, nfac):
    g = np.int64(2)
    while True:
        ok = True
        for i in range(nfac):
            if _pow_mod_i64(g, (p - 1) // factors[i], p) == 1:
                ok = False
                break
        if ok:
            return g
        g += 1


@njit(cache=True, parallel=True)
def fixed_point_counts(ps, small_primes):
    """F(p) for each odd prime in ps.

    Walks x through powers of a generator g: x = g^i is a fixed point of
    x -> x^x mod p exactly when x^(x-1) = g^(i(x-1)) is 1, i.e. when
    p - 1 divides i*(x - 1). One multiplication per x.
    """
    out = np.zeros(ps.shape[0], np.int64)
    for k in prange(ps.shape[0]):
        p = ps[k]
        pm1 = p - 1
        fac = np.empty(16, np.int64)
        nfac = _distinct_prime_factors(pm1, small_primes, fac)
        g = _find_generator(p, fac, nfac)
        cnt = 0
        y = np.int64(1)
        for i in range(pm1):
            if i * (y - 1) % pm1 == 0:
                cnt += 1
            y = y * g % p
        out[k] = cnt
    return out


@njit(cache=True, parallel=True)
def psi_stats_bulk(ps, small_primes):
    """(F, image size, preimages of 1, collision pairs) per odd prime.

    Uses a full power table of a generator so each x^x mod p costs one
    multiplication: x = g^i gives x^x = g^(i*x mod (p-1)).
    """
    m = ps.shape[0]
    fixed = np.zeros(m, np.int64)
    image = np.zeros(m, np.int64)
    n_of_1 = np.zeros(m, np.int64)
    coll = np.zeros(m, np.int64)
    for k in prange(m):
        p = ps[k]
        pm1 = p - 1
        fac = np.empty(16, np.int64)
        nfac = _distinct_prime_factors(pm1, small_primes, fac)
        g = _find_generator(p, fac, nfac)
        pw = np.empty(pm1, np.int64)
        pw[0] = 1
        for i in range(1, pm1):
            pw[i] = pw[i - 1] * g % p
        counts = np.zeros(p, np.int64)
        f = 0
        for i in range(pm1):
            x = pw[i]
            v = pw[(i * x) % pm1]
            counts[v] += 1
            if v == x:
                f += 1
        img = 0
        pairs = np.int64(0)
        for a in range(1, p):
            c = counts[a]
            if c > 0:
                img += 1
                pairs += c * c
        fixed[k] = f
        image[k] = img
        n_of_1[k] = counts[1]
        coll[k] = pairs
    return fixed, image, n_of_1, coll
