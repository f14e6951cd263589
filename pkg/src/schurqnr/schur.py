"""Batch verification: longest non-residue run against sqrt(p), prime by prime."""

from __future__ import annotations

import os
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import is_prime, isqrt, primes_in_class
from .residue import DEFAULT_BUDGET_BITS, fast_run_summary

# (p, longest run of consecutive non-residues, floor(sqrt(p))) for a sample
# of primes p ≡ 13 (mod 24) up to 38659, as published with the original proof.
PUBLISHED_SAMPLE: tuple[tuple[int, int, int], ...] = (
    (13, 4, 3),
    (757, 8, 27),
    (3181, 9, 56),
    (5869, 9, 76),
    (7237, 10, 85),
    (9397, 10, 96),
    (12037, 11, 109),
    (14389, 12, 119),
    (16477, 12, 128),
    (18517, 13, 136),
    (20509, 13, 143),
    (22381, 12, 149),
    (24061, 13, 155),
    (26029, 13, 161),
    (28429, 13, 168),
    (30469, 14, 174),
    (32749, 15, 180),
    (34693, 14, 186),
    (36709, 15, 191),
    (38653, 15, 196),
)

# the only prime whose longest run exceeds sqrt(p)
KNOWN_EXCEPTION = 13


@dataclass(frozen=True)
class VerificationRecord:
    p: int
    max_run: int
    run_start: int
    isqrt_p: int
    elapsed_micros: int = field(default=0, compare=False)

    @property
    def exceeds(self) -> bool:
        return self.max_run * self.max_run > self.p

    @property
    def ratio(self) -> Fraction:
        """max_run² / p, exact."""
        return Fraction(self.max_run * self.max_run, self.p)


@dataclass
class BatchSummary:
    lo: int
    hi: int
    residue: int
    modulus: int
    records: list[VerificationRecord]

    @property
    def primes_checked(self) -> int:
        return len(self.records)

    @property
    def exceedances(self) -> list[VerificationRecord]:
        return [r for r in self.records if r.exceeds]

    @property
    def max_ratio(self) -> Fraction | None:
        if not self.records:
            return None
        return max(r.ratio for r in self.records)

    @property
    def hudson_consistent(self) -> bool:
        """Every exceedance is a prime ≡ 13 (mod 24)."""
        return all(r.p % 24 == 13 for r in self.exceedances)

    @property
    def only_known_exception(self) -> bool:
        return all(r.p == KNOWN_EXCEPTION for r in self.exceedances)


def _record(p: int, budget_bits: int) -> VerificationRecord:
    t0 = time.perf_counter_ns()
    if p == 2:
        # 1 is the only nonzero class mod 2 and it is a square
        length, start = 0, 0
    else:
        length, start, _ = fast_run_summary(p, budget_bits)
    elapsed = (time.perf_counter_ns() - t0) // 1000
    return VerificationRecord(p, length, start, isqrt(p), elapsed)


def verify_prime(p: int, budget_bits: int = DEFAULT_BUDGET_BITS) -> VerificationRecord:
    """Longest non-residue run of one prime and whether its square exceeds p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return _record(p, budget_bits)


def _chunks(primes: Sequence[int], pieces: int) -> list[Sequence[int]]:
    # table work is linear in p, so balance chunks by the sum of p
    if not primes:
        return []
    target = max(sum(primes) // max(pieces, 1), 1)
    out = []
    begin = 0
    acc = 0
    for i, p in enumerate(primes):
        acc += p
        if acc >= target:
            out.append(primes[begin : i + 1])
            begin = i + 1
            acc = 0
    if begin < len(primes):
        out.append(primes[begin:])
    return out


def default_jobs() -> int:
    return os.cpu_count() or 1


def verify_range(
    lo: int,
    hi: int,
    residue: int = 0,
    modulus: int = 1,
    jobs: int | None = None,
    budget_bits: int = DEFAULT_BUDGET_BITS,
    progress: Callable[[int, int], None] | None = None,
) -> BatchSummary:
    """Verify every prime p in [lo, hi] with p ≡ residue (mod modulus).

    Work is spread over ``jobs`` threads (the compiled kernels release the
    GIL); records come back in ascending p whatever the job count.
    """
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    jobs = jobs or default_jobs()
    if jobs < 1:
        raise ValueError(f"jobs must be positive, got {jobs}")
    primes = primes_in_class(lo, hi, residue, modulus)
    if primes and primes[-1] - 1 > budget_bits:
        from .residue import MemoryBudgetError

        raise MemoryBudgetError(primes[-1], primes[-1] - 1, budget_bits)

    def work(chunk):
        return [_record(p, budget_bits) for p in chunk]

    chunks = _chunks(primes, jobs * 16)
    records: list[VerificationRecord] = []
    if jobs == 1:
        results = map(work, chunks)
        for part in results:
            records.extend(part)
            if progress:
                progress(len(records), len(primes))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(work, chunks):
                records.extend(part)
                if progress:
                    progress(len(records), len(primes))
    return BatchSummary(lo, hi, residue, modulus, records)


@dataclass(frozen=True)
class SampleRow:
    expected: tuple[int, int, int]
    computed: tuple[int, int, int]

    @property
    def diffs(self) -> dict[str, tuple[int, int]]:
        names = ("p", "max_run", "isqrt_p")
        return {
            n: (e, c) for n, e, c in zip(names, self.expected, self.computed) if e != c
        }


@dataclass(frozen=True)
class SampleCheck:
    rows: tuple[SampleRow, ...]

    @property
    def mismatches(self) -> list[SampleRow]:
        return [r for r in self.rows if r.diffs]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def check_published_sample() -> SampleCheck:
    """Recompute every published (p, longest run, floor sqrt p) triple."""
    rows = []
    for expected in PUBLISHED_SAMPLE:
        rec = verify_prime(expected[0])
        rows.append(SampleRow(expected, (rec.p, rec.max_run, rec.isqrt_p)))
    return SampleCheck(tuple(rows))
