"""Deterministic primality and class-filtered prime enumeration."""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from .integers import isqrt

# The first thirteen prime bases are deterministic below 3.317e24, well past
# the 64-bit range. Twelve bases would stop at 3.187e23.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_LIMIT = 3_317_044_064_679_887_385_961_981

_SMALL_PRIMES = _MR_BASES


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    if n >= MR_LIMIT:
        raise ValueError(f"{n} is beyond the deterministic Miller-Rabin range")
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _base_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve)


def iter_prime_segments(lo: int, hi: int, segment: int = 1 << 22) -> Iterator[np.ndarray]:
    """Yield ascending int64 arrays of the primes in [lo, hi], one per segment."""
    lo = max(lo, 2)
    if hi < lo:
        return
    base = _base_primes(isqrt(hi) + 1)
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)  # exclusive
        mark = np.ones(stop - start, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= stop:
                break
            first = max(q * q, -(-start // q) * q)
            mark[first - start :: q] = False
        found = np.flatnonzero(mark).astype(np.int64) + start
        if found.size:
            yield found
        start = stop


def primes_in_class(lo: int, hi: int, residue: int = 0, modulus: int = 1) -> list[int]:
    """Primes p in [lo, hi] with p ≡ residue (mod modulus), ascending.

    modulus 1 selects every prime.
    """
    if modulus < 1 or not 0 <= residue < modulus:
        raise ValueError(f"bad residue class {residue} mod {modulus}")
    out: list[int] = []
    for seg in iter_prime_segments(lo, hi):
        if modulus > 1:
            seg = seg[seg % modulus == residue]
        out.extend(seg.tolist())
    return out
