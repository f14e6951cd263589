"""Exact comparison of sums of radicals evaluated at an integer point.

An expression is a finite sum of terms ``c * 2**e2 * p**ep`` where ``c`` and
both exponents are rationals and ``p`` is a positive integer fixed per
expression.  Comparisons never touch floating point: each radical is bracketed
by integer n-th roots at a binary precision that doubles until the sign of the
difference is known.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from math import lcm
from numbers import Rational

from .integers import iroot

START_BITS = 128
MAX_BITS = 8192

Q = Fraction  # local shorthand for building exponents


class IndeterminateComparison(ArithmeticError):
    pass


@dataclass(frozen=True)
class Indeterminate:
    """Comparison undecided after ``bits`` of precision.

    Truth-testing raises, so an undecided comparison can never silently
    steer control flow.
    """

    bits: int

    def __bool__(self) -> bool:
        raise IndeterminateComparison(f"comparison undecided at {self.bits} bits")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class RadicalExpr:
    """Sum of ``coef * 2**two_exp * p**p_exp`` terms at a fixed point ``p``."""

    p: int
    terms: tuple[tuple[Fraction, Fraction, Fraction], ...] = ()

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"evaluation point must be positive, got {self.p}")

    @classmethod
    def const(cls, p: int, c) -> RadicalExpr:
        return cls(p, ((_frac(c), Q(0), Q(0)),))

    @classmethod
    def term(cls, p: int, coef=1, p_exp=0, two_exp=0) -> RadicalExpr:
        return cls(p, ((_frac(coef), _frac(p_exp), _frac(two_exp)),))

    def _coerce(self, other) -> RadicalExpr:
        if isinstance(other, RadicalExpr):
            if other.p != self.p:
                raise ValueError(f"mismatched evaluation points {self.p} and {other.p}")
            return other
        return RadicalExpr.const(self.p, other)

    def __add__(self, other):
        other = self._coerce(other)
        return RadicalExpr(self.p, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return RadicalExpr(self.p, tuple((-c, ep, e2) for c, ep, e2 in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RadicalExpr(
            self.p,
            tuple(
                (c1 * c2, ep1 + ep2, f1 + f2)
                for c1, ep1, f1 in self.terms
                for c2, ep2, f2 in other.terms
            ),
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = RadicalExpr.const(self.p, 1)
        for _ in range(n):
            out = out * self
        return out

    def at(self, p: int) -> RadicalExpr:
        """Same expression evaluated at another point."""
        out = RadicalExpr(p, self.terms)
        out.__dict__["groups"] = self.groups
        return out

    @cached_property
    def groups(self):
        return _grouped(self.terms)

    def normalized(self) -> list[tuple[tuple[int, int, int], int, int]]:
        """Terms as ``[(key, num, den)]`` with distinct keys and nonzero num.

        A key ``(d, a2, ap)`` stands for the positive real
        ``(2**a2 * p**ap) ** (1/d)`` with ``0 <= a2, ap < d``; ``(1, 0, 0)`` is
        the rational constant.  Integer exponent parts are folded into the
        coefficient ``num/den``.
        """
        p = self.p
        acc: dict[tuple[int, int, int], tuple[int, int]] = {}
        for key, ip, i2, cn, cd in self.groups:
            if ip >= 0:
                cn *= p**ip
            else:
                cd *= p ** (-ip)
            if i2 >= 0:
                cn <<= i2
            else:
                cd <<= -i2
            if key in acc:
                n0, d0 = acc[key]
                cn, cd = n0 * cd + cn * d0, d0 * cd
            acc[key] = (cn, cd)
        return [(k, n, d) for k, (n, d) in acc.items() if n != 0]


@lru_cache(maxsize=4096)
def _grouped(terms) -> tuple[tuple[tuple[int, int, int], int, int, int, int], ...]:
    # p-independent part of normalization: merge equal exponent pairs and
    # split exponents into integer and fractional parts
    merged: dict[tuple[Fraction, Fraction], Fraction] = {}
    for c, ep, e2 in terms:
        merged[(ep, e2)] = merged.get((ep, e2), Fraction(0)) + c
    out = []
    for (ep, e2), c in merged.items():
        if c == 0:
            continue
        ip, fp = divmod(ep, 1)
        i2, f2 = divmod(e2, 1)
        d = lcm(fp.denominator, f2.denominator)
        key = (d, int(f2 * d), int(fp * d)) if d > 1 else (1, 0, 0)
        out.append((key, int(ip), int(i2), c.numerator, c.denominator))
    return tuple(out)


def _radical_value(p: int, key: tuple[int, int, int]) -> tuple[int, int]:
    # the radical's d-th power as an integer, and d
    d, a2, ap = key
    return (1 << a2) * p**ap, d


def _exact_sign_two(p, items) -> int:
    """Sign of c1*r1 + c2*r2 with r1, r2 positive radicals, decided exactly."""
    (k1, n1, d1), (k2, n2, d2) = items
    if (n1 > 0) == (n2 > 0):
        return 1 if n1 > 0 else -1
    # compare |c1| r1 with |c2| r2 by raising both to a common power:
    # (|n1|/d1)^e * v1^(e/e1)  vs  (|n2|/d2)^e * v2^(e/e2), cross-multiplied
    v1, e1 = _radical_value(p, k1)
    v2, e2 = _radical_value(p, k2)
    e = lcm(e1, e2)
    lhs = abs(n1) ** e * v1 ** (e // e1) * d2**e
    rhs = abs(n2) ** e * v2 ** (e // e2) * d1**e
    if lhs == rhs:
        return 0
    if lhs > rhs:
        return 1 if n1 > 0 else -1
    return 1 if n2 > 0 else -1


def _small_sign(p, items) -> int:
    if not items:
        return 0
    if len(items) == 1:
        return 1 if items[0][1] > 0 else -1
    return _exact_sign_two(p, items)


def _interval(p: int, items, bits: int) -> tuple[int, int, int]:
    """Integer bounds lo <= value * scale <= hi, returns (lo, hi, scale)."""
    den = 1
    for _, _, d in items:
        den = lcm(den, d)
    lo = hi = 0
    for key, n, d in items:
        k = n * (den // d)
        v, e = _radical_value(p, key)
        if e == 1:
            lo += k << bits
            hi += k << bits
            continue
        scaled = v << (bits * e)
        r = iroot(scaled, e)
        r_hi = r if r**e == scaled else r + 1
        if k > 0:
            lo += k * r
            hi += k * r_hi
        else:
            lo += k * r_hi
            hi += k * r
    return lo, hi, den << bits


def sign(expr: RadicalExpr, start_bits: int = START_BITS, max_bits: int = MAX_BITS):
    """Sign of expr as -1, 0 or +1, or Indeterminate at the precision cap."""
    items = expr.normalized()
    if len(items) <= 2:
        return _small_sign(expr.p, items)
    bits = start_bits
    while True:
        lo, hi, _ = _interval(expr.p, items, bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if lo == hi == 0:
            return 0
        if bits >= max_bits:
            return Indeterminate(bits)
        bits *= 2


def positive(expr: RadicalExpr, start_bits: int = START_BITS, max_bits: int = MAX_BITS):
    """True iff expr > 0; Indeterminate only at the precision cap."""
    items = expr.normalized()
    if len(items) <= 2:
        return _small_sign(expr.p, items) > 0
    bits = start_bits
    while True:
        lo, hi, _ = _interval(expr.p, items, bits)
        if lo > 0:
            return True
        if hi <= 0:
            return False
        if bits >= max_bits:
            return Indeterminate(bits)
        bits *= 2


def cmp_radical(lhs: RadicalExpr, rhs, start_bits: int = START_BITS, max_bits: int = MAX_BITS):
    """True iff lhs > rhs exactly; Indeterminate only at the precision cap."""
    if isinstance(rhs, RadicalExpr) and rhs.p != lhs.p:
        raise ValueError(f"mismatched evaluation points {lhs.p} and {rhs.p}")
    return positive(lhs - rhs, start_bits, max_bits)


def bracket(expr: RadicalExpr, bits: int = START_BITS) -> tuple[Fraction, Fraction]:
    """Rational enclosure [lo, hi] of the expression's value."""
    items = expr.normalized()
    if not items:
        return Fraction(0), Fraction(0)
    lo, hi, scale = _interval(expr.p, items, bits)
    return Fraction(lo, scale), Fraction(hi, scale)
