"""Compiled inner loops.

Two hot paths live here: the greedy sweep over one or two m-ary trees, and
the suffix-add segment tree that tracks max/min of the prefix-sum function.
Everything else in the package is plain Python/numpy and calls into these.
"""

import math

import numpy as np
from numba import njit

# |lambda * d| above this switches sinh sums to a rescaled evaluation.
EXP_LIMIT = 700.0


@njit(cache=True)
def first_leaf(m, h):
    # number of internal nodes in a complete m-ary tree of height h
    return (m**h - 1) // (m - 1)


@njit(cache=True)
def sinh_sum_sign(ds, k, lam):
    """Sign of sum(sinh(lam * ds[:k])), robust to huge arguments.

    Entries are grouped by |d| so that opposite imbalances cancel exactly;
    the groups are then summed in increasing |d| order.
    """
    mags = np.abs(ds[:k])
    order = np.argsort(mags, kind="mergesort")
    big = lam * mags[order[k - 1]] if k else 0.0
    s = 0.0
    i = 0
    while i < k:
        a = mags[order[i]]
        net = 0
        while i < k and mags[order[i]] == a:
            net += 1 if ds[order[i]] > 0 else (-1 if ds[order[i]] < 0 else 0)
            i += 1
        if net != 0:
            x = lam * a
            if big <= EXP_LIMIT:
                s += net * math.sinh(x)
            else:
                # 2*sinh(x)*exp(-big), same sign as the plain sum
                s += net * (math.exp(x - big) - math.exp(-x - big))
    if s > 0.0:
        return 1
    if s < 0.0:
        return -1
    return 0


@njit(cache=True)
def drive_trees(leaves, m, h, lam, fixed_signs, use_fixed):
    """Run arrivals through K trees sharing one sign per arrival.

    leaves: (n, K) leaf indices. With use_fixed the signs are taken from
    fixed_signs, otherwise chosen greedily as -sign(sum of path sinh over all
    K trees), ties to +1.

    Returns (signs, d, max_abs) where d is (K, nodes) and max_abs (K,) the
    running maximum of |d_v| per tree.
    """
    n, K = leaves.shape
    base = first_leaf(m, h)
    nodes = base + m**h
    d = np.zeros((K, nodes), dtype=np.int64)
    max_abs = np.zeros(K, dtype=np.int64)
    signs = np.empty(n, dtype=np.int8)
    path = np.empty((K, h + 1), dtype=np.int64)
    ds = np.empty(K * (h + 1), dtype=np.int64)
    for t in range(n):
        k = 0
        for j in range(K):
            v = base + leaves[t, j]
            for depth in range(h, -1, -1):
                path[j, depth] = v
                ds[k] = d[j, v]
                k += 1
                v = (v - 1) // m
        if use_fixed:
            chi = np.int64(fixed_signs[t])
        else:
            chi = np.int64(-1) if sinh_sum_sign(ds, k, lam) > 0 else np.int64(1)
        signs[t] = chi
        for j in range(K):
            for depth in range(h + 1):
                v = path[j, depth]
                d[j, v] += chi
                a = abs(d[j, v])
                if a > max_abs[j]:
                    max_abs[j] = a
    return signs, d, max_abs


# --- suffix-add / global max-min segment tree ------------------------------
#
# Leaves hold F(rank) for compressed coordinates; an arrival at rank r with
# sign s adds s to every leaf >= r.  Internal node x stores the max (min) of
# its subtree including the pending add tag[x] that applies to all of it.


@njit(cache=True)
def _apply(hi, lo, tag, size, x, v):
    hi[x] += v
    lo[x] += v
    if x < size:
        tag[x] += v


@njit(cache=True)
def _rebuild(hi, lo, tag, x):
    while x > 1:
        x >>= 1
        a = hi[2 * x]
        b = hi[2 * x + 1]
        hi[x] = (a if a > b else b) + tag[x]
        a = lo[2 * x]
        b = lo[2 * x + 1]
        lo[x] = (a if a < b else b) + tag[x]


@njit(cache=True)
def tracker_add(hi, lo, tag, size, rank, v):
    """Add v to F on [rank, size-1]; afterwards hi[1]/lo[1] are max/min of F."""
    l = rank + size
    r = 2 * size
    l0 = l
    while l < r:
        if l & 1:
            _apply(hi, lo, tag, size, l, v)
            l += 1
        if r & 1:
            r -= 1
            _apply(hi, lo, tag, size, r, v)
        l >>= 1
        r >>= 1
    _rebuild(hi, lo, tag, l0)


@njit(cache=True)
def tracker_profile(ranks, signs, size):
    """Per-step max F, min F (0 included) and total after each arrival."""
    n = ranks.shape[0]
    hi = np.zeros(2 * size, dtype=np.int64)
    lo = np.zeros(2 * size, dtype=np.int64)
    tag = np.zeros(size, dtype=np.int64)
    fmax = np.empty(n, dtype=np.int64)
    fmin = np.empty(n, dtype=np.int64)
    total = np.empty(n, dtype=np.int64)
    s = 0
    for t in range(n):
        tracker_add(hi, lo, tag, size, ranks[t], np.int64(signs[t]))
        s += signs[t]
        fmax[t] = hi[1] if hi[1] > 0 else 0
        fmin[t] = lo[1] if lo[1] < 0 else 0
        total[t] = s
    return fmax, fmin, total


# --- ordinal envy, one instance at a time -------------------------------------
#
# Used for exhaustive sweeps over (ranking, allocation) pairs, where calling
# the Python versions millions of times would be too slow.


@njit(cache=True)
def envy_row(v, owned, eps, order, taken, worst):
    """(prefix, cancellation, ordinal discrepancy, cardinal envy, worst-case cardinal envy).

    ``owned`` marks S; scratch arrays must have length len(v).
    """
    n = v.shape[0]
    o = np.argsort(-v, kind="mergesort")
    for i in range(n):
        order[i] = o[i]
    # prefix maximum over top-t items, and its arg
    run = 0
    best = 0
    t_star = 0
    lo = 0
    hi = 0
    for i in range(n):
        run += -1 if owned[order[i]] else 1
        if run > best:
            best = run
            t_star = i + 1
        if run > hi:
            hi = run
        if run < lo:
            lo = run
    disc = hi - lo
    # cancellation: each owned item, most valuable first, removes the most
    # valuable remaining unowned item below it
    for i in range(n):
        taken[i] = False
    for i in range(n):
        if owned[order[i]]:
            for j in range(i + 1, n):
                if not owned[order[j]] and not taken[j]:
                    taken[j] = True
                    break
    left = 0
    for i in range(n):
        if not owned[order[i]] and not taken[i]:
            left += 1
    card = 0.0
    for i in range(n):
        card += -v[i] if owned[i] else v[i]
    if card < 0.0:
        card = 0.0
    for r in range(n):
        rank = r + 1
        worst[order[r]] = 1.0 - rank * eps if rank <= t_star else (n + 1 - rank) * eps / n
    wcard = 0.0
    for i in range(n):
        wcard += -worst[i] if owned[i] else worst[i]
    if wcard < 0.0:
        wcard = 0.0
    return best, left, disc, card, wcard


@njit(cache=True)
def envy_check_row(v, owned, eps, order, taken, worst, counts):
    """Accumulate violation counts: [instances, prefix!=cancel, sandwich, chain]."""
    n = v.shape[0]
    best, left, disc, card, wcard = envy_row(v, owned, eps, order, taken, worst)
    counts[0] += 1
    if best != left:
        counts[1] += 1
    if not (wcard <= best + 1e-12 and wcard >= best - n * n * eps - 1e-12):
        counts[2] += 1
    if not (disc >= best and best + 1e-12 >= card):
        counts[3] += 1


@njit(cache=True)
def envy_exhaustive(n, eps):
    """Check every ranking of n items against every allocation S.

    Values are rank / (n + 1).  Permutations are generated by Heap's method.
    Returns [instances, prefix/cancellation mismatches, sandwich failures,
    dominance-chain failures].
    """
    counts = np.zeros(4, dtype=np.int64)
    perm = np.arange(n)
    c = np.zeros(n, dtype=np.int64)
    v = np.empty(n)
    owned = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    taken = np.zeros(n, dtype=np.bool_)
    worst = np.empty(n)
    i = 0
    while True:
        for k in range(n):
            v[k] = (perm[k] + 1) / (n + 1)
        for mask in range(1 << n):
            for k in range(n):
                owned[k] = (mask >> k) & 1 == 1
            envy_check_row(v, owned, eps, order, taken, worst, counts)
        # next permutation (iterative Heap)
        while i < n and c[i] >= i:
            c[i] = 0
            i += 1
        if i >= n:
            break
        if i % 2 == 0:
            perm[0], perm[i] = perm[i], perm[0]
        else:
            perm[c[i]], perm[i] = perm[i], perm[c[i]]
        c[i] += 1
        i = 1
    return counts
