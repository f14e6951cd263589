"""Exact arithmetic substrate: integer roots, Jacobi symbol, primes, radicals."""

from .integers import (
    euler_criterion,
    floor_frac_sqrt,
    floor_scaled_sqrt,
    iroot,
    isqrt,
    jacobi,
    mulmod,
)
from .primes import is_prime, iter_prime_segments, primes_in_class
from .radical import (
    Indeterminate,
    IndeterminateComparison,
    RadicalExpr,
    bracket,
    cmp_radical,
    positive,
    sign,
)

__all__ = [
    "Indeterminate",
    "IndeterminateComparison",
    "RadicalExpr",
    "bracket",
    "cmp_radical",
    "euler_criterion",
    "floor_frac_sqrt",
    "floor_scaled_sqrt",
    "iroot",
    "is_prime",
    "isqrt",
    "iter_prime_segments",
    "jacobi",
    "mulmod",
    "positive",
    "primes_in_class",
    "sign",
]
