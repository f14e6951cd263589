"""Compiled inner loops for residue tables.

The quadratic character mod an odd prime p is determined by its values on
1..h with h = (p-1)/2, because chi(p - n) = chi(-1) chi(n).  The "folded"
table stores only those h bits (bit n set <=> n is a residue) in uint64 words.
"""

import numba
import numpy as np
from llvmlite import ir
from numba import types
from numba.extending import intrinsic

_ONE = np.uint64(1)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@intrinsic
def _cttz(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.cttz(args[0], ir.Constant(ir.IntType(1), 0))

    return sig, codegen


@intrinsic
def _ctlz(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctlz(args[0], ir.Constant(ir.IntType(1), 0))

    return sig, codegen


def folded_words(p):
    return ((p - 1) // 2 >> 6) + 2


@numba.njit(cache=True, nogil=True)
def mark_folded(p, w):
    """Fill w[:folded_words(p)] with the folded residue bits of p."""
    h = (p - 1) // 2
    nw = (h >> 6) + 2
    w[:nw] = 0
    fold = (p & 3) == 1
    # four independent square sequences k, k+1, k+2, k+3 stepping by 4:
    # (k+4)^2 - k^2 = 8k + 16, and that step itself grows by 32
    s0 = 1 % p
    s1 = 4 % p
    s2 = 9 % p
    s3 = 16 % p
    d0 = 24 % p
    d1 = 32 % p
    d2 = 40 % p
    d3 = 48 % p
    e = 32 % p
    k = 1
    while k + 3 <= h:
        if fold:
            t0 = min(s0, p - s0)
            t1 = min(s1, p - s1)
            t2 = min(s2, p - s2)
            t3 = min(s3, p - s3)
        else:
            # p = 3 mod 4: a square above h says nothing about 1..h
            t0 = s0 if s0 <= h else h + 1
            t1 = s1 if s1 <= h else h + 1
            t2 = s2 if s2 <= h else h + 1
            t3 = s3 if s3 <= h else h + 1
        w[t0 >> 6] |= _ONE << np.uint64(t0 & 63)
        w[t1 >> 6] |= _ONE << np.uint64(t1 & 63)
        w[t2 >> 6] |= _ONE << np.uint64(t2 & 63)
        w[t3 >> 6] |= _ONE << np.uint64(t3 & 63)
        s0 += d0
        s0 -= p & -(s0 >= p)
        s1 += d1
        s1 -= p & -(s1 >= p)
        s2 += d2
        s2 -= p & -(s2 >= p)
        s3 += d3
        s3 -= p & -(s3 >= p)
        d0 += e
        d0 -= p & -(d0 >= p)
        d1 += e
        d1 -= p & -(d1 >= p)
        d2 += e
        d2 -= p & -(d2 >= p)
        d3 += e
        d3 -= p & -(d3 >= p)
        k += 4
    while k <= h:
        s = (k * k) % p
        if fold:
            t = min(s, p - s)
        else:
            t = s if s <= h else h + 1
        w[t >> 6] |= _ONE << np.uint64(t & 63)
        k += 1


@numba.njit(cache=True, nogil=True, inline="always")
def _has_run(y, length):
    # nonzero iff y holds `length` consecutive set bits
    n = 1
    while n < length and y != 0:
        s = min(n, length - n)
        y &= y >> np.uint64(s)
        n += s
    return y != 0


@numba.njit(cache=True, nogil=True)
def ones_runs(w, h, invert):
    """Runs of set bits (or of clear bits if invert) over positions 1..h.

    Returns (best, first_start, last_end, trailing): the longest run length,
    the smallest start among runs of that length, the largest end among them,
    and the length of the run ending exactly at h (0 if none).
    """
    best = 0
    first_start = 0
    last_end = 0
    cur = 0  # length of the run reaching the current word boundary
    pad = 0
    nw = (h >> 6) + 1
    for wi in range(nw):
        x = w[wi]
        if invert:
            x = ~x
        base = wi << 6
        if wi == 0:
            x &= ~_ONE
        if wi == nw - 1:
            top = h - base  # last valid bit index in this word
            if top < 63:
                # pad with ones so a run reaching h flows into the carry
                x |= ~((_ONE << np.uint64(top + 1)) - _ONE)
                pad = 63 - top
        if x == _ALL:
            cur += 64
            continue
        low = np.int64(_cttz(~x))
        total = cur + low
        if total > 0:
            if total > best:
                best = total
                first_start = base + low - total
                last_end = base + low - 1
            elif total == best:
                last_end = base + low - 1
        topr = np.int64(_ctlz(~x))
        # interior bits lie strictly between the low run and the top run
        interior = x
        if low > 0:
            interior &= ~((_ONE << np.uint64(low)) - _ONE)
        if topr > 0:
            interior &= ~(_ALL << np.uint64(64 - topr))
        if interior != 0 and _has_run(interior, max(best, 1)):
            run = 0
            for j in range(low + 1, 64 - topr + 1):
                bit = (interior >> np.uint64(j)) & _ONE if j < 64 else np.uint64(0)
                if bit:
                    run += 1
                elif run > 0:
                    if run > best:
                        best = run
                        first_start = base + j - run
                        last_end = base + j - 1
                    elif run == best:
                        last_end = base + j - 1
                    run = 0
        cur = topr
    cur -= pad
    if cur > 0:
        if cur > best:
            best = cur
            first_start = h - cur + 1
            last_end = h
        elif cur == best:
            last_end = h
    return best, first_start, last_end, cur


@numba.njit(cache=True, nogil=True)
def run_summary(p, w):
    """Longest non-residue run over 1..p-1 and longest constant run.

    Returns (length, smallest start, longest constant-character run).
    Requires p odd prime >= 3 and a scratch buffer of folded_words(p) words.
    """
    mark_folded(p, w)
    h = (p - 1) // 2
    n_best, n_first, n_last, n_tail = ones_runs(w, h, True)
    r_best, r_first, r_last, r_tail = ones_runs(w, h, False)
    if (p & 3) == 1:
        # chi symmetric about p/2; a run touching h continues mirrored past it
        length = n_best
        start = n_first
        if 2 * n_tail > n_best:
            length = 2 * n_tail
            start = h - n_tail + 1
        const = max(length, r_best, 2 * r_tail)
    else:
        # chi antisymmetric: residue runs below h mirror to non-residue runs
        # above it, and nothing crosses the middle
        if n_best >= r_best:
            length = n_best
            start = n_first
        else:
            length = r_best
            start = p - r_last
        const = max(n_best, r_best)
    return length, start, const


@numba.njit(cache=True, nogil=True)
def expand_folded(p, w, out):
    """Write the full 0/1 residue indicator for 0..p-1 into out (uint8)."""
    h = (p - 1) // 2
    out[0] = 0
    flip = 0 if (p & 3) == 1 else 1
    for n in range(1, h + 1):
        b = (w[n >> 6] >> np.uint64(n & 63)) & _ONE
        out[n] = b
        out[p - n] = b ^ flip


@numba.njit(cache=True, nogil=True)
def collect_runs(bits, n, want_residue, min_length):
    """All maximal runs in positions 1..n-1 of a packed little-endian table.

    Returns (starts, lengths) for runs of residues (want_residue) or
    non-residues with length >= min_length, plus (best, first start of best).
    """
    starts = []
    lengths = []
    best = 0
    best_start = 0
    run = 0
    for i in range(1, n + 1):
        if i < n:
            b = (bits[i >> 3] >> (i & 7)) & 1
            hit = b == 1 if want_residue else b == 0
        else:
            hit = False
        if hit:
            run += 1
        elif run > 0:
            s = i - run
            if run > best:
                best = run
                best_start = s
            if run >= min_length:
                starts.append(s)
                lengths.append(run)
            run = 0
    return np.array(starts, dtype=np.int64), np.array(lengths, dtype=np.int64), best, best_start
