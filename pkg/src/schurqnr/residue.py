"""Quadratic-character tables mod a prime and their run statistics."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .arith import RadicalExpr, cmp_radical, isqrt

DEFAULT_BUDGET_BITS = 1 << 31


class MemoryBudgetError(MemoryError):
    """A table would not fit the configured bit budget."""

    def __init__(self, p: int, required_bits: int, budget_bits: int):
        self.p = p
        self.required_bits = required_bits
        self.budget_bits = budget_bits
        super().__init__(
            f"residue table for p={p} needs {required_bits} bits "
            f"({required_bits / 8 / 2**20:.1f} MiB), budget is {budget_bits} bits "
            f"({budget_bits / 8 / 2**20:.1f} MiB)"
        )


def _check_prime_arg(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError(f"expected an odd prime p >= 3, got {p}")


def check_budget(p: int, budget_bits: int = DEFAULT_BUDGET_BITS) -> None:
    if p - 1 > budget_bits:
        raise MemoryBudgetError(p, p - 1, budget_bits)


@dataclass(frozen=True, eq=False)
class ResidueTable:
    """Bit-packed residue indicator for 1..p-1 (bit n set <=> n is a square).

    Bits are little-endian within bytes; bit 0 (the residue class of 0) is
    always clear and is not part of the table's domain.
    """

    p: int
    bits: np.ndarray

    def is_residue(self, n: int) -> bool:
        if not 1 <= n < self.p:
            raise IndexError(f"{n} outside 1..{self.p - 1}")
        return bool((self.bits[n >> 3] >> (n & 7)) & 1)

    def chi(self, n: int) -> int:
        """Quadratic character of n, with n reduced mod p first."""
        n %= self.p
        if n == 0:
            return 0
        return 1 if self.is_residue(n) else -1

    def mask(self) -> np.ndarray:
        """Boolean residue indicator of length p (index 0 is False)."""
        return np.unpackbits(self.bits, count=self.p, bitorder="little").astype(bool)

    def residues(self) -> np.ndarray:
        return np.flatnonzero(self.mask())

    def count(self) -> int:
        return int(np.unpackbits(self.bits, count=self.p, bitorder="little").sum())


@dataclass(frozen=True)
class Run:
    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length - 1


@dataclass(frozen=True)
class RunReport:
    """Longest non-residue run of a prime, with smallest start on ties."""

    p: int
    max_run: int
    run_start: int
    isqrt_p: int

    @property
    def exceeds(self) -> bool:
        return self.max_run * self.max_run > self.p


@dataclass(frozen=True)
class CharacterRunStat:
    p: int
    longest_constant_run: int


def build_residue_table(p: int, budget_bits: int = DEFAULT_BUDGET_BITS) -> ResidueTable:
    """Mark the nonzero squares mod p."""
    _check_prime_arg(p)
    check_budget(p, budget_bits)
    w = np.empty(_kernels.folded_words(p), dtype=np.uint64)
    _kernels.mark_folded(p, w)
    full = np.empty(p, dtype=np.uint8)
    _kernels.expand_folded(p, w, full)
    return ResidueTable(p, np.packbits(full, bitorder="little"))


def scan_runs(table: ResidueTable, min_length: int = 0) -> tuple[RunReport, list[Run]]:
    """Maximal non-residue runs in 1..p-1 (no wraparound), ascending by start.

    The list keeps only runs of length >= min_length.
    """
    starts, lengths, best, best_start = _kernels.collect_runs(
        table.bits, table.p, False, max(min_length, 1)
    )
    runs = [Run(int(s), int(n)) for s, n in zip(starts, lengths)]
    return RunReport(table.p, int(best), int(best_start), isqrt(table.p)), runs


def residue_runs(table: ResidueTable, min_length: int = 1) -> list[Run]:
    starts, lengths, _, _ = _kernels.collect_runs(table.bits, table.p, True, max(min_length, 1))
    return [Run(int(s), int(n)) for s, n in zip(starts, lengths)]


def least_odd_qnr(table: ResidueTable) -> int:
    """Smallest odd non-residue in 1..p-1.

    p = 3 has none (its only non-residue is 2) and is rejected.
    """
    for u in range(3, table.p, 2):
        if not table.is_residue(u):
            return u
    raise ValueError(f"no odd non-residue in 1..{table.p - 1}")


def gap_interval_contains(p: int, n: int) -> bool:
    """n in (sqrt(p) - 2^(3/2) p^(1/4) + 2, sqrt(p)), decided exactly."""
    root = RadicalExpr.term(p, 1, Fraction(1, 2))
    lower = root - RadicalExpr.term(p, 1, Fraction(1, 4), Fraction(3, 2)) + 2
    return bool(cmp_radical(RadicalExpr.const(p, n), lower)) and n * n < p


def find_qnr_2a2_gap(table: ResidueTable) -> int | None:
    """Some a with 2a² a non-residue just below sqrt(p), or None.

    Takes the largest a with 2a² < sqrt(p), as in the localization argument
    for p ≡ 13 (mod 24) where every 2a² is a non-residue.
    """
    p = table.p
    if p % 24 != 13:
        raise ValueError(f"p must be 13 mod 24, got {p} mod 24 = {p % 24}")
    a = 1
    while 4 * (a + 1) ** 4 < p:
        a += 1
    n = 2 * a * a
    if n >= p or not gap_interval_contains(p, n) or table.is_residue(n):
        return None
    return a


def char_run_stats(table: ResidueTable) -> CharacterRunStat:
    """Longest block of 1..p-1 on which the character is constant."""
    _, _, nr_best, _ = _kernels.collect_runs(table.bits, table.p, False, 1 << 62)
    _, _, r_best, _ = _kernels.collect_runs(table.bits, table.p, True, 1 << 62)
    return CharacterRunStat(table.p, int(max(nr_best, r_best)))


_scratch = threading.local()


def _scratch_words(p: int) -> np.ndarray:
    need = _kernels.folded_words(p)
    buf = getattr(_scratch, "buf", None)
    if buf is None or buf.size < need:
        buf = np.empty(max(need, 1024), dtype=np.uint64)
        _scratch.buf = buf
    return buf


def fast_run_summary(p: int, budget_bits: int = DEFAULT_BUDGET_BITS) -> tuple[int, int, int]:
    """(longest non-residue run, its smallest start, longest constant run).

    Same numbers as scan_runs / char_run_stats on a full table, computed from
    the half-size folded table in a per-thread scratch buffer.
    """
    _check_prime_arg(p)
    check_budget(p, budget_bits)
    length, start, const = _kernels.run_summary(p, _scratch_words(p))
    return int(length), int(start), int(const)


def fast_run_report(p: int, budget_bits: int = DEFAULT_BUDGET_BITS) -> RunReport:
    length, start, _ = fast_run_summary(p, budget_bits)
    return RunReport(p, length, start, isqrt(p))
