"""Executable checks for the localization and refutation steps of the proof
that 13 is the only prime with a non-residue run longer than sqrt(p).

Everything here is exact: radical inequalities go through ``cmp_radical``,
polynomial quantities are plain Python integers.
"""

from __future__ import annotations

import os
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import (
    Indeterminate,
    RadicalExpr,
    cmp_radical,
    floor_frac_sqrt,
    iroot,
    is_prime,
    isqrt,
    jacobi,
    mulmod,
    positive,
    primes_in_class,
)
from .residue import (
    build_residue_table,
    fast_run_summary,
    find_qnr_2a2_gap,
    least_odd_qnr,
    scan_runs,
)

# below this the numeric hypotheses of the refutation argument are not met
PROOF_RANGE_START = 38659

A_MIN = Fraction(1, 4)
A_MAX = Fraction(15, 32)
CASE_A = (Fraction(1, 4), Fraction(3, 8), Fraction(15, 32))


class PreconditionError(ValueError):
    """Inputs outside the range an operation is defined for."""


class VerificationFailure(AssertionError):
    """A claim that should hold was found false."""


def _root(p: int, coef=1) -> RadicalExpr:
    return RadicalExpr.term(p, coef, Fraction(1, 2))


def _require_13_mod_24(p: int) -> None:
    if p % 24 != 13:
        raise PreconditionError(f"p must be 13 mod 24, got {p} mod 24 = {p % 24}")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")


# ---------------------------------------------------------------- localization

@dataclass(frozen=True)
class TaggedRun:
    start: int
    length: int
    tag: str


@dataclass(frozen=True)
class Lemma1Report:
    p: int
    threshold: int
    gap_witness_n: int | None
    least_odd_qnr_u: int
    upper_half_residue: int | None
    runs: tuple[TaggedRun, ...]
    facts: dict[str, bool] = field(compare=False)

    @property
    def ok(self) -> bool:
        return all(self.facts.values())

    @property
    def failed_facts(self) -> list[str]:
        return [name for name, good in self.facts.items() if not good]


def localization_intervals(p: int) -> list[tuple[str, RadicalExpr, RadicalExpr]]:
    """Open intervals a long run may be confined to, most specific first.

    ``core`` is where a long run must start if it exists; the ``_mirror``
    entries are images under n -> p - n.
    """
    s = _root(p)
    q = RadicalExpr.term(p, 1, Fraction(3, 4), Fraction(1, 2))  # sqrt(2) p^(3/4)
    half = RadicalExpr.const(p, Fraction(p, 2))
    reach = q - s * Fraction(1, 2)
    return [
        ("core", (s + p + 3) * Fraction(1, 2), half + reach),
        ("core_mirror", half - reach, (p - 3 - s) * Fraction(1, 2)),
        ("upper_half", half, half + reach),
        ("lower_half", half - reach, half),
        ("middle", half - reach, half + reach),
        ("low_edge", RadicalExpr.const(p, 1), reach),
        ("high_edge", p - reach, RadicalExpr.const(p, p - 1)),
    ]


def classify_run(p: int, start: int, length: int, intervals=None) -> str:
    """Name of the first interval strictly containing start..start+length-1."""
    end = start + length - 1
    for tag, lo, hi in intervals or localization_intervals(p):
        if cmp_radical(RadicalExpr.const(p, start), lo) and cmp_radical(
            hi, RadicalExpr.const(p, end)
        ):
            return tag
    return "outside"


def lemma1_report(p: int, t: int) -> Lemma1Report:
    """Facts behind the localization of long runs, plus run classification.

    Long runs (length² > p) must land in ``core`` or its mirror image; the
    check is vacuous when there are none.
    """
    _require_13_mod_24(p)
    if t < 1:
        raise PreconditionError(f"threshold must be positive, got {t}")
    table = build_residue_table(p)
    a = find_qnr_2a2_gap(table)
    n = None if a is None else 2 * a * a
    u = least_odd_qnr(table)
    r = (p + u) // 2
    upper = r if table.is_residue(r) and (2 * r - p) ** 2 < p else None

    _, runs = scan_runs(table, t)
    intervals = localization_intervals(p)
    tagged = tuple(TaggedRun(x.start, x.length, classify_run(p, x.start, x.length, intervals))
                   for x in runs)
    facts = {
        "two_is_nonresidue": jacobi(2, p) == -1,
        "three_is_residue": jacobi(3, p) == 1,
        "minus_one_is_residue": jacobi(p - 1, p) == 1,
        "gap_witness_found": n is not None,
        "odd_nonresidue_below_sqrt": u * u < p,
        "upper_half_residue_found": upper is not None,
        "long_runs_localized": all(
            x.tag in ("core", "core_mirror") for x in tagged if x.length**2 > p
        ),
    }
    return Lemma1Report(p, t, n, u, upper, tagged, facts)


# ---------------------------------------------------------------- refutation

def shifted_square(p: int, k: int, x: int) -> int:
    """((p+1)/2 + k + x)² - p(k + x), written out as ((p+1)/2)² + k + k² + 2kx + x + x²."""
    h = (p + 1) // 2
    return h * h + k + k * k + 2 * k * x + x + x * x


def _check_a(a: Fraction) -> Fraction:
    a = Fraction(a)
    if not A_MIN <= a <= A_MAX:
        raise PreconditionError(f"a must lie in [1/4, 15/32], got {a}")
    return a


@dataclass(frozen=True)
class CriterionReport:
    p: int
    k: int
    a: Fraction
    span_holds: bool | Indeterminate
    diff_exceeds_p: bool
    x_low: int
    x_high: int
    diff_value: int

    @property
    def holds(self) -> bool:
        return self.span_holds is True and self.diff_exceeds_p


def _span_gap(p: int, k: int, a: Fraction) -> RadicalExpr:
    # (a sqrt p - 2)² - (2k + 2(1-a) sqrt p + 2 - floor sqrt p)
    lhs = (_root(p, a) - 2) ** 2
    rhs = _root(p, 2 * (1 - a)) + (2 * k + 2 - isqrt(p))
    return lhs - rhs


def lemma2_criterion(p: int, k: int, a: Fraction) -> CriterionReport:
    """Evaluate both numeric hypotheses of the refutation step for (p, k, a)."""
    _require_13_mod_24(p)
    a = _check_a(a)
    if k < 1:
        raise PreconditionError(f"k must be positive, got {k}")
    x_low = floor_frac_sqrt(a, p) - 2
    x_high = floor_frac_sqrt(1 - a, p)
    diff = shifted_square(p, k, x_high) - shifted_square(p, k, x_low)
    return CriterionReport(p, k, a, positive(_span_gap(p, k, a)), diff > p, x_low, x_high, diff)


@dataclass(frozen=True)
class Lemma2Witness:
    """A product of two window members that reduces back into the window.

    ``straddle_x`` is the x at which the shifted square crosses the level
    (c + 1/2)p + 1/2 + k + ⌊√p⌋. Usually the witness sweeps y there
    (``x == straddle_x``). When shifted_square(straddle_x - 1) itself already sits in the
    window, that square is the witness: ``x = straddle_x - 1`` and ``y = 0``.
    """

    p: int
    k: int
    a: Fraction
    x: int
    c: int
    y: int
    m: int
    n: int
    R: int
    straddle_x: int

    @property
    def window(self) -> tuple[int, int]:
        lo = (self.p + 1) // 2 + self.k
        return lo, lo + isqrt(self.p)

    @property
    def direct(self) -> bool:
        return self.x != self.straddle_x


def _levels(p: int, k: int, c: int) -> tuple[int, int]:
    # doubled (c + 1/2)p + 1/2 + k and the same plus ⌊√p⌋
    low = 2 * c * p + p + 1 + 2 * k
    return low, low + 2 * isqrt(p)


def _straddle(p: int, k: int, x: int) -> int | None:
    """The c with 2·shifted_square(x) above and 2·shifted_square(x-1) at or below the doubled upper level."""
    s = isqrt(p)
    v = 2 * shifted_square(p, k, x) - (p + 1 + 2 * k + 2 * s)
    if v <= 0:
        return None
    c = (v - 1) // (2 * p)
    if 2 * shifted_square(p, k, x - 1) > _levels(p, k, c)[1]:
        return None
    return c


def lemma2_witness(p: int, k: int, a: Fraction, report: CriterionReport | None = None) -> Lemma2Witness:
    """Find (x, c, y) whose product of two window members reduces into the window.

    x runs down from ⌊(1-a)√p⌋ over (⌊a√p⌋-2, ⌊(1-a)√p⌋]; at each x with a
    straddle, either shifted_square(x-1) lands in the window outright or y sweeps
    0..⌊a√p⌋-1. The first hit is returned.
    """
    report = report or lemma2_criterion(p, k, a)
    if not report.holds:
        raise PreconditionError(f"criterion not satisfied for p={p}, k={k}, a={a}")
    a = report.a
    s = isqrt(p)
    base = (p + 1) // 2 + k
    y_max = floor_frac_sqrt(a, p) - 1
    for x in range(report.x_high, report.x_low, -1):
        c = _straddle(p, k, x)
        if c is None:
            continue
        if 2 * shifted_square(p, k, x - 1) >= _levels(p, k, c)[0] and x - 1 > report.x_low:
            r = shifted_square(p, k, x - 1) % p
            return Lemma2Witness(p, k, a, x - 1, c, 0, x - 1, x - 1, r, x)
        top = shifted_square(p, k, x)
        for y in range(0, y_max + 1):
            m, n = x - y, x + y
            if m < 0 or n > s:
                break
            r = (top - y * y) % p
            if base <= r <= base + s:
                return Lemma2Witness(p, k, a, x, c, y, m, n, r, x)
    raise VerificationFailure(f"no witness for p={p}, k={k}, a={a} despite criterion holding")


def check_witness(w: Lemma2Witness) -> list[str]:
    """Recompute everything a witness claims; returns the list of broken claims."""
    p, k, s = w.p, w.k, isqrt(w.p)
    base = (p + 1) // 2 + k
    bad = []
    if not 0 <= w.m <= w.n <= s:
        bad.append("0 <= m <= n <= isqrt(p)")
    if (w.m, w.n) != (w.x - w.y, w.x + w.y):
        bad.append("m = x - y, n = x + y")
    if mulmod((base + w.m) % p, (base + w.n) % p, p) != w.R:
        bad.append("R is the reduced product")
    if not base <= w.R <= base + s:
        bad.append("R inside the window")
    x_low = floor_frac_sqrt(w.a, p) - 2
    if not x_low < w.x <= floor_frac_sqrt(1 - w.a, p):
        bad.append("x in range")
    low, high = _levels(p, k, w.c)
    sx = w.straddle_x
    if not 2 * shifted_square(p, k, sx) > high:
        bad.append("the shifted square above the upper level at the straddle")
    if not 2 * shifted_square(p, k, sx - 1) <= high:
        bad.append("the shifted square at or below the upper level one step before the straddle")
    if w.direct:
        if not (w.x == sx - 1 and w.y == 0 and low <= 2 * shifted_square(p, k, w.x)):
            bad.append("direct witness is the square just below the straddle")
    elif not 2 * shifted_square(p, k, sx - 1) < low:
        bad.append("the shifted square below the lower level one step before the straddle")
    return bad


def case_select(p: int, k: int) -> Fraction:
    """The a used for run start (p+1)/2 + k, by comparing k with 2√p and 8√p."""
    if k <= isqrt(p) // 2 + 1:
        raise PreconditionError(f"k={k} is not above floor(sqrt(p)/2) + 1 = {isqrt(p) // 2 + 1}")
    kk = k * k
    if kk <= 4 * p:
        return CASE_A[0]
    if kk <= 64 * p:
        return CASE_A[1]
    return CASE_A[2]


def k_window(p: int) -> tuple[int, int]:
    """Smallest and largest integer k with √p/2 + 1 < k < √2 p^(3/4) - √p."""
    lower = _root(p, Fraction(1, 2)) + 1
    upper = RadicalExpr.term(p, 1, Fraction(3, 4), Fraction(1, 2)) - _root(p)
    k_lo = isqrt(p) // 2 + 1
    while not cmp_radical(RadicalExpr.const(p, k_lo), lower):
        k_lo += 1
    while k_lo > 1 and cmp_radical(RadicalExpr.const(p, k_lo - 1), lower):
        k_lo -= 1
    k_hi = iroot(2 * p**3, 4) - isqrt(p) + 1
    while not cmp_radical(upper, RadicalExpr.const(p, k_hi)):
        k_hi -= 1
    while cmp_radical(upper, RadicalExpr.const(p, k_hi + 1)):
        k_hi += 1
    return k_lo, k_hi


@dataclass(frozen=True)
class KOutcome:
    k: int
    a: Fraction | None
    criterion_holds: bool
    witness: Lemma2Witness | None
    error: str | None = None

    @property
    def refuted(self) -> bool:
        return self.witness is not None


def refute_k(p: int, k: int, a: Fraction | None = None) -> KOutcome:
    try:
        a = case_select(p, k) if a is None else a
        report = lemma2_criterion(p, k, a)
        if not report.holds:
            return KOutcome(k, a, False, None, "criterion not satisfied")
        return KOutcome(k, a, True, lemma2_witness(p, k, a, report))
    except (PreconditionError, VerificationFailure) as exc:
        return KOutcome(k, a, False, None, str(exc))


def _refute_block(args: tuple[int, int, int]) -> list[KOutcome]:
    p, lo, hi = args
    return [refute_k(p, k) for k in range(lo, hi + 1)]


@dataclass(frozen=True)
class SweepSummary:
    p: int
    k_lo: int
    k_hi: int
    outcomes: tuple[KOutcome, ...] = field(repr=False)
    boundary: tuple[KOutcome, ...]

    @property
    def checked(self) -> int:
        return len(self.outcomes)

    @property
    def failures(self) -> list[KOutcome]:
        return [o for o in self.outcomes if not o.refuted]

    @property
    def witnesses(self) -> list[Lemma2Witness]:
        return [o.witness for o in self.outcomes if o.witness is not None]

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.failures


def sweep_k(p: int, jobs: int | None = None) -> SweepSummary:
    """Refute every candidate run start (p+1)/2 + k over the whole k window.

    The two integers just outside the window are probed too and reported
    separately; they do not count toward success.
    """
    _require_13_mod_24(p)
    if p <= PROOF_RANGE_START:
        raise PreconditionError(f"p must exceed {PROOF_RANGE_START}, got {p}")
    k_lo, k_hi = k_window(p)
    jobs = jobs or os.cpu_count() or 1
    if jobs == 1:
        outcomes = _refute_block((p, k_lo, k_hi))
    else:
        step = max((k_hi - k_lo + 1) // (jobs * 4), 1)
        blocks = [(p, lo, min(lo + step - 1, k_hi)) for lo in range(k_lo, k_hi + 1, step)]
        outcomes = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_refute_block, blocks):
                outcomes.extend(part)
    boundary = (refute_k(p, k_lo - 1, CASE_A[0]), refute_k(p, k_hi + 1))
    return SweepSummary(p, k_lo, k_hi, tuple(outcomes), boundary)


# ---------------------------------------------------------------- thresholds

def _case1(p: int) -> RadicalExpr:
    return (_root(p, Fraction(1, 4)) - 2) ** 2 - (_root(p, Fraction(9, 2)) + 3)


def _case2(p: int) -> RadicalExpr:
    return (_root(p, Fraction(3, 8)) - 2) ** 2 - (_root(p, Fraction(65, 4)) + 3)


def _case3(p: int) -> RadicalExpr:
    rhs = RadicalExpr.term(p, 1, Fraction(3, 4), Fraction(3, 2)) - _root(p, Fraction(31, 16)) + 3
    return (_root(p, Fraction(15, 32)) - 2) ** 2 - rhs


def brauer_bound(p: int) -> RadicalExpr:
    """2^(3/5) p^(2/5) + 25 * 2^(-6/5) p^(1/5) + 3."""
    return (
        RadicalExpr.term(p, 1, Fraction(2, 5), Fraction(3, 5))
        + RadicalExpr.term(p, 25, Fraction(1, 5), Fraction(-6, 5))
        + 3
    )


def _brauer_sqrt(p: int) -> RadicalExpr:
    return _root(p) - brauer_bound(p)


# inequality name -> (published threshold, positive-part expression builder)
INEQUALITIES = {
    "case1": (7711, _case1),
    "case2": (15917, _case2),
    "case3": (27250, _case3),
    "brauer_sqrt": (38659, _brauer_sqrt),
}

DEFAULT_THRESHOLD_LIMIT = 10**6


@dataclass(frozen=True)
class ThresholdReport:
    case_id: str
    paper_threshold: int
    checked_to: int
    verified_from: int
    holds_at_threshold: bool
    failures_above: tuple[int, ...]
    undecided: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.failures_above and not self.undecided

    @property
    def boundary_behavior(self) -> str:
        t = self.paper_threshold
        at = "holds" if self.holds_at_threshold else "fails"
        if self.verified_from == t + 1:
            return f"{at} at p={t}, holds from p={t + 1} on"
        return f"{at} at p={t}; holds on every integer from p={self.verified_from}"


def _decide(template: RadicalExpr, p: int):
    return positive(template.at(p))


def threshold_report(limit: int = DEFAULT_THRESHOLD_LIMIT, cases: Iterable[str] | None = None) -> list[ThresholdReport]:
    """Check each inequality on every integer in (threshold, limit] and locate its crossover."""
    out = []
    for name in cases or INEQUALITIES:
        t, build = INEQUALITIES[name]
        template = build(1)
        failures, undecided = [], []
        for p in range(t + 1, limit + 1):
            got = _decide(template, p)
            if isinstance(got, Indeterminate):
                undecided.append(p)
            elif not got:
                failures.append(p)
        at_t = _decide(template, t)
        if isinstance(at_t, Indeterminate):
            undecided.append(t)
            at_t = False
        # walk down from the threshold to the last integer where it fails
        start = t + 1
        if not failures and not undecided:
            p = t
            while p >= 1:
                got = _decide(template, p)
                if isinstance(got, Indeterminate):
                    undecided.append(p)
                    break
                if not got:
                    break
                p -= 1
            start = p + 1
        else:
            start = max(failures + undecided) + 1
        out.append(
            ThresholdReport(name, t, limit, start, bool(at_t), tuple(failures), tuple(undecided))
        )
    return out


# ---------------------------------------------------------------- external bounds

BOUNDS = ("brauer5mod8", "brauer4n1", "norton")


@dataclass(frozen=True)
class BoundViolation:
    p: int
    value: int
    detail: str


@dataclass(frozen=True)
class BoundSummary:
    which: str
    lo: int
    hi: int
    primes_checked: int
    violations: tuple[BoundViolation, ...]
    empirical_only: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def least_odd_nonresidue(p: int) -> int:
    """Smallest odd u with (u|p) = -1, by direct symbol evaluation."""
    u = 3
    while jacobi(u, p) != -1:
        u += 2
    return u


def _norton_exceeds(h: int, p: int) -> bool:
    """True when h >= 4.1 p^(1/4) ln p, using outward-rounded intervals."""
    iv = mpmath.iv
    saved = iv.prec
    try:
        for prec in (64, 128, 256, 512, 1024):
            iv.prec = prec
            bound = iv.mpf(41) / 10 * iv.sqrt(iv.sqrt(p)) * iv.log(p)
            if h < bound.a:
                return False
            if h >= bound.b:
                return True
    finally:
        iv.prec = saved
    raise ArithmeticError(f"Norton comparison undecided for p={p}, H={h}")


def bound_check(which: str, lo: int, hi: int) -> BoundSummary:
    """Check one of the cited run/non-residue bounds over every qualifying prime."""
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    violations = []
    if which == "brauer5mod8":
        primes = primes_in_class(lo, hi, 5, 8)
        template = brauer_bound(1)
        for p in primes:
            u = least_odd_nonresidue(p)
            below = cmp_radical(template.at(p), RadicalExpr.const(p, u))
            if not below:
                violations.append(BoundViolation(p, u, "least odd non-residue not below bound"))
    elif which == "brauer4n1":
        primes = primes_in_class(lo, hi, 3, 4)
        for p in primes:
            _, _, run = fast_run_summary(p)
            if run * run >= p:
                violations.append(BoundViolation(p, run, "constant run not below sqrt(p)"))
    elif which == "norton":
        primes = [p for p in primes_in_class(lo, hi) if p > 2]
        for p in primes:
            _, _, run = fast_run_summary(p)
            if _norton_exceeds(run, p):
                violations.append(BoundViolation(p, run, "constant run not below 4.1 p^(1/4) log p"))
    else:
        raise ValueError(f"unknown bound {which!r}; choose from {', '.join(BOUNDS)}")
    return BoundSummary(which, lo, hi, len(primes), tuple(violations), which == "norton")
