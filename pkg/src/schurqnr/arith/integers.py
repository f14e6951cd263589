"""Exact integer helpers: square roots, roots, modular products, Jacobi symbol."""

from __future__ import annotations

from fractions import Fraction


def isqrt(n: int) -> int:
    """Largest r with r*r <= n, by integer Newton iteration."""
    if n < 0:
        raise ValueError(f"isqrt of negative number {n}")
    if n < 2:
        return n
    # initial guess is a power of two above the root
    x = 1 << ((n.bit_length() + 1) >> 1)
    while True:
        y = (x + n // x) >> 1
        if y >= x:
            break
        x = y
    # Newton from above lands on floor; the correction guards the invariant
    while x * x > n:
        x -= 1
    while (x + 1) * (x + 1) <= n:
        x += 1
    return x


def iroot(n: int, k: int) -> int:
    """Largest r with r**k <= n for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError(f"iroot needs n >= 0 and k >= 1, got n={n}, k={k}")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return isqrt(n)
    if k & (k - 1) == 0:
        # floor(sqrt(floor(sqrt(n)))) == floor(n ** (1/4)), and so on
        r = n
        while k > 1:
            r = isqrt(r)
            k >>= 1
        return r
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def mulmod(a: int, b: int, p: int) -> int:
    """a*b mod p; Python ints never overflow, so this is exact for any size."""
    return (a * b) % p


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd n >= 3, via quadratic reciprocity."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"jacobi needs an odd modulus >= 3, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def euler_criterion(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion. Slow; kept as an oracle."""
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def floor_scaled_sqrt(num: int, den: int, p: int) -> int:
    """floor((num/den) * sqrt(p)), i.e. the largest t with t²·den² <= num²·p."""
    if num < 0 or den < 1 or p < 0:
        raise ValueError("floor_scaled_sqrt needs num >= 0, den >= 1, p >= 0")
    return isqrt(num * num * p) // den


def floor_frac_sqrt(a: Fraction, p: int) -> int:
    """floor(a * sqrt(p)) for a non-negative fraction a."""
    return floor_scaled_sqrt(a.numerator, a.denominator, p)
