"""Bitset kernels (numba) shared by the graph, model and experiment layers.

Adjacency is stored as an ``(n, W)`` array of ``uint64`` words with
``W = ceil(n / 64)``; vertex ``w`` lives in word ``w >> 6`` at bit ``w & 63``.
"""

import numpy as np
from numba import njit

ZERO = np.uint64(0)
ONE = np.uint64(1)
ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
LOW6 = np.uint64(63)

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


def n_words(n):
    return (n + 63) // 64


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(cache=True, inline="always")
def _bit(v):
    return ONE << (np.uint64(v) & LOW6)


@njit(cache=True)
def full_mask(n):
    """Words with exactly bits 0..n-1 set."""
    w = (n + 63) // 64
    mask = np.empty(w, dtype=np.uint64)
    for k in range(w):
        mask[k] = ALL
    rem = n & 63
    if rem:
        mask[w - 1] = (ONE << np.uint64(rem)) - ONE
    return mask


@njit(cache=True)
def out_degrees(rows, n):
    w = (n + 63) // 64
    out = np.zeros(n, dtype=np.int64)
    for v in range(n):
        c = 0
        for k in range(w):
            c += popcount(rows[v, k])
        out[v] = c
    return out


@njit(cache=True)
def in_degrees(rows, n):
    w = (n + 63) // 64
    indeg = np.zeros(n, dtype=np.int64)
    for u in range(n):
        for k in range(w):
            x = rows[u, k]
            while x:
                low = x & (~x + ONE)
                indeg[k * 64 + popcount(low - ONE)] += 1
                x ^= low
    return indeg


@njit(cache=True)
def first_second_counts(rows, n):
    """|N1(v)| and |N2(v)| for every v by OR-accumulating out-neighbour rows."""
    w = (n + 63) // 64
    n1 = np.zeros(n, dtype=np.int64)
    n2 = np.zeros(n, dtype=np.int64)
    acc = np.empty(w, dtype=np.uint64)
    for v in range(n):
        for k in range(w):
            acc[k] = ZERO
        c1 = 0
        for k in range(w):
            x = rows[v, k]
            c1 += popcount(x)
            while x:
                low = x & (~x + ONE)
                u = k * 64 + popcount(low - ONE)
                for j in range(w):
                    acc[j] |= rows[u, j]
                x ^= low
        acc[v >> 6] &= ~_bit(v)
        c2 = 0
        for k in range(w):
            c2 += popcount(acc[k] & ~rows[v, k])
        n1[v] = c1
        n2[v] = c2
    return n1, n2


@njit(cache=True)
def eccentricity_at_most_2(rows, n):
    """True iff every vertex reaches every other within two arcs.

    Accumulation for a vertex stops as soon as its reach mask is full, which
    makes the check cheap on random tournaments.
    """
    w = (n + 63) // 64
    full = full_mask(n)
    acc = np.empty(w, dtype=np.uint64)
    for v in range(n):
        done = True
        for k in range(w):
            acc[k] = rows[v, k]
        acc[v >> 6] |= _bit(v)
        for k in range(w):
            if acc[k] != full[k]:
                done = False
                break
        if done:
            continue
        for k in range(w):
            x = rows[v, k]
            while x and not done:
                low = x & (~x + ONE)
                u = k * 64 + popcount(low - ONE)
                done = True
                for j in range(w):
                    acc[j] |= rows[u, j]
                    if acc[j] != full[j]:
                        done = False
                x ^= low
            if done:
                break
        if not done:
            return False
    return True


@njit(cache=True)
def fill_pairs(rows, uniforms, p, two_p, i0, i1, n):
    """Apply the three-way pair draw to all pairs (i, j), i0 <= i < i1, j > i.

    ``uniforms`` holds one value per pair in row-major order.  Returns the
    number of values consumed.
    """
    k = 0
    for i in range(i0, i1):
        for j in range(i + 1, n):
            x = uniforms[k]
            k += 1
            if x < p:
                rows[i, j >> 6] |= _bit(j)
            elif x < two_p:
                rows[j, i >> 6] |= _bit(i)
    return k


@njit(cache=True)
def _count_seymour_small(adj, n):
    # adj[v] is a single-word row; n <= 64
    s = 0
    for v in range(n):
        row = adj[v]
        acc = ZERO
        x = row
        while x:
            low = x & (~x + ONE)
            acc |= adj[popcount(low - ONE)]
            x ^= low
        acc &= ~(row | _bit(v))
        if popcount(acc) >= popcount(row):
            s += 1
    return s


@njit(cache=True)
def enumerate_tournaments(n, pair_i, pair_j):
    """Histogram of |S| over all 2^m labelled tournaments (m = len(pair_i)).

    Bit b of the enumeration index set means pair_i[b] -> pair_j[b].
    """
    m = pair_i.shape[0]
    hist = np.zeros(n + 1, dtype=np.int64)
    adj = np.zeros(n, dtype=np.uint64)
    for mask in range(1 << m):
        for v in range(n):
            adj[v] = ZERO
        for b in range(m):
            if (mask >> b) & 1:
                adj[pair_i[b]] |= _bit(pair_j[b])
            else:
                adj[pair_j[b]] |= _bit(pair_i[b])
        hist[_count_seymour_small(adj, n)] += 1
    return hist


@njit(cache=True)
def enumerate_oriented(n, pair_i, pair_j):
    """Histogram of |S| over all 3^m digraphs without anti-parallel pairs.

    Base-3 digit b of the index: 0 no arc, 1 pair_i -> pair_j, 2 the reverse.
    """
    m = pair_i.shape[0]
    total = 1
    for _ in range(m):
        total *= 3
    hist = np.zeros(n + 1, dtype=np.int64)
    adj = np.zeros(n, dtype=np.uint64)
    for idx in range(total):
        for v in range(n):
            adj[v] = ZERO
        r = idx
        for b in range(m):
            d = r % 3
            r //= 3
            if d == 1:
                adj[pair_i[b]] |= _bit(pair_j[b])
            elif d == 2:
                adj[pair_j[b]] |= _bit(pair_i[b])
        hist[_count_seymour_small(adj, n)] += 1
    return hist


@njit(cache=True)
def _min_ratio(n1, n2, n):
    best = np.inf
    for v in range(n):
        if n1[v] > 0:
            r = n2[v] / n1[v]
            if r < best:
                best = r
    if best == np.inf:
        return np.nan
    return best


@njit(cache=True)
def summarize_full(rows, n):
    """(|S|, min_v |N2|/|N1| over non-sinks) from a full N2 pass."""
    n1, n2 = first_second_counts(rows, n)
    s = 0
    for v in range(n):
        if n2[v] >= n1[v]:
            s += 1
    return s, _min_ratio(n1, n2, n)


@njit(cache=True)
def summarize_tournament(rows, n, force_full):
    """(|S|, min ratio, used_degree_criterion) for a tournament.

    With diameter <= 2 every vertex has N1 and N2 covering the other n - 1
    vertices, so both |S| and the ratio follow from out-degrees alone.
    """
    if not force_full and eccentricity_at_most_2(rows, n):
        out = out_degrees(rows, n)
        n2 = (n - 1) - out
        s = 0
        for v in range(n):
            if out[v] <= n2[v]:
                s += 1
        return s, _min_ratio(out, n2, n), True
    s, r = summarize_full(rows, n)
    return s, r, False


@njit(cache=True)
def evolve_tournament(rows, uniforms, n_start, n_end, audit_every):
    """Grow a tournament from n_start to n_end vertices one vertex at a time.

    ``uniforms`` holds C(n_end, 2) values: the row-major pair draws for the
    initial tournament followed by k draws for each added vertex k.  Returns
    per-size arrays and the number of audit mismatches between the degree
    criterion and a full N2 pass.
    """
    steps = n_end - n_start + 1
    s_out = np.zeros(steps, dtype=np.int64)
    border_s = np.zeros(steps, dtype=np.int64)
    border_ns = np.zeros(steps, dtype=np.int64)
    diam2 = np.zeros(steps, dtype=np.bool_)
    gained = np.zeros(steps, dtype=np.int64)
    lost = np.zeros(steps, dtype=np.int64)
    mismatches = 0

    used = fill_pairs(rows, uniforms, 0.5, 1.0, 0, n_start, n_start)
    outdeg = np.zeros(n_end, dtype=np.int64)
    od = out_degrees(rows, n_start)
    for v in range(n_start):
        outdeg[v] = od[v]
    prev = np.zeros(n_end, dtype=np.bool_)
    cur = np.zeros(n_end, dtype=np.bool_)

    for step in range(steps):
        m = n_start + step
        if step > 0:
            new = m - 1
            for j in range(new):
                if uniforms[used + j] < 0.5:
                    rows[j, new >> 6] |= _bit(new)
                    outdeg[j] += 1
                else:
                    rows[new, j >> 6] |= _bit(j)
                    outdeg[new] += 1
            used += new
        sub = rows[:m]
        fast = eccentricity_at_most_2(sub, m)
        diam2[step] = fast
        if fast:
            for v in range(m):
                cur[v] = outdeg[v] <= (m - 1) - outdeg[v]
            if audit_every > 0 and step % audit_every == 0:
                n1, n2 = first_second_counts(sub, m)
                for v in range(m):
                    if (n2[v] >= n1[v]) != cur[v]:
                        mismatches += 1
        else:
            n1, n2 = first_second_counts(sub, m)
            for v in range(m):
                cur[v] = n2[v] >= n1[v]
        s = 0
        bs = 0
        bns = 0
        for v in range(m):
            if cur[v]:
                s += 1
            d = (m - 1) - 2 * outdeg[v]  # indeg - outdeg
            if d == 0 or d == 1:
                bs += 1
            elif d == -1 or d == -2:
                bns += 1
        s_out[step] = s
        border_s[step] = bs
        border_ns[step] = bns
        if step > 0:
            g = 0
            lo = 0
            for v in range(m - 1):
                if cur[v] and not prev[v]:
                    g += 1
                elif prev[v] and not cur[v]:
                    lo += 1
            gained[step] = g
            lost[step] = lo
        for v in range(m):
            prev[v] = cur[v]
    return s_out, border_s, border_ns, diam2, gained, lost, mismatches
