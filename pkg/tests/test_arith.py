import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurqnr.arith import (
    Indeterminate,
    IndeterminateComparison,
    RadicalExpr,
    bracket,
    cmp_radical,
    euler_criterion,
    floor_frac_sqrt,
    floor_scaled_sqrt,
    iroot,
    is_prime,
    isqrt,
    jacobi,
    mulmod,
    positive,
    primes_in_class,
    sign,
)
from schurqnr.arith.primes import MR_LIMIT


def _trial_division(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _sieve(limit: int) -> list[int]:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags).tolist()


PRIMES_1E6 = _sieve(10**6)


# ---------------------------------------------------------------- integers

@pytest.mark.parametrize("n, expected", [(13, 3), (757, 27), (0, 0), (1, 1), (15, 3), (16, 4)])
def test_isqrt_examples(n, expected):
    assert isqrt(n) == expected


def test_isqrt_bracket_up_to_a_million():
    roots = np.array([isqrt(n) for n in range(10**6 + 1)], dtype=np.int64)
    n = np.arange(10**6 + 1, dtype=np.int64)
    assert np.all(roots * roots <= n)
    assert np.all((roots + 1) * (roots + 1) > n)


@given(st.integers(min_value=0, max_value=1 << 4000))
def test_isqrt_big(n):
    r = isqrt(n)
    assert r * r <= n < (r + 1) ** 2
    assert r == math.isqrt(n)


@given(st.integers(min_value=0, max_value=1 << 600), st.integers(min_value=1, max_value=12))
def test_iroot_brackets(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


def test_isqrt_rejects_negative():
    with pytest.raises(ValueError):
        isqrt(-1)


@pytest.mark.parametrize("a, b, p, expected", [(5, 8, 13, 1), (0, 7, 13, 0), (1, 7, 13, 7)])
def test_mulmod_examples(a, b, p, expected):
    assert mulmod(a, b, p) == expected


@given(st.integers(min_value=2, max_value=(1 << 64) - 1), st.data())
def test_mulmod_full_width(p, data):
    a = data.draw(st.integers(min_value=0, max_value=p - 1))
    b = data.draw(st.integers(min_value=0, max_value=p - 1))
    assert mulmod(a, b, p) == (a * b) % p


# ---------------------------------------------------------------- jacobi

@pytest.mark.parametrize(
    "a, n, expected",
    [(2, 13, -1), (3, 13, 1), (12, 13, 1), (1, 9, 1), (1, 13, 1), (13, 13, 0), (0, 7, 0)],
)
def test_jacobi_examples(a, n, expected):
    assert jacobi(a, n) == expected


@pytest.mark.parametrize("n", [0, 1, 2, 4, 10, -3])
def test_jacobi_rejects_bad_modulus(n):
    with pytest.raises(ValueError):
        jacobi(3, n)


def test_jacobi_matches_euler_on_random_pairs():
    rng = random.Random(20240613)
    odd = PRIMES_1E6[1:]
    agree = 0
    trials = 10**5
    for _ in range(trials):
        p = rng.choice(odd)
        a = rng.randrange(-(10**9), 10**9)
        agree += jacobi(a, p) == euler_criterion(a, p)
    assert agree == trials


def test_minus_one_residue_for_1_mod_4():
    for p in PRIMES_1E6:
        if p > 10**4:
            break
        if p % 4 == 1:
            assert jacobi(p - 1, p) == 1


def test_two_and_three_for_13_mod_24():
    for p in PRIMES_1E6:
        if p > 10**5:
            break
        if p % 24 == 13:
            assert jacobi(2, p) == -1 and jacobi(3, p) == 1


@given(st.integers(min_value=-(10**6), max_value=10**6), st.integers(min_value=1, max_value=5000))
def test_jacobi_multiplicative_in_modulus(a, half):
    m, n = 2 * half + 1, 2 * (half // 3) + 3
    assert jacobi(a, m * n) == jacobi(a, m) * jacobi(a, n)


# ---------------------------------------------------------------- primes

@pytest.mark.parametrize("n, expected", [(13, True), (1, False), (2, True), (38653, True),
                                          (561, False), (3215031751, False)])
def test_is_prime_examples(n, expected):
    assert is_prime(n) is expected


def test_is_prime_38659_against_trial_division():
    assert is_prime(38659) == _trial_division(38659)


def test_is_prime_agrees_with_sieve():
    flags = set(_sieve(200_000))
    assert all(is_prime(n) == (n in flags) for n in range(200_001))


@pytest.mark.parametrize(
    "n, expected",
    [
        (2**61 - 1, True),
        (2**64 - 59, True),  # largest prime below 2^64
        (3825123056546413051, False),  # strong pseudoprime to every base up to 23
        (318665857834031151167461, False),  # strong pseudoprime to every base up to 37
        (3317044064679887385961981 - 2, False),
        (2**79 - 67, True),  # beyond 64 bits, below the deterministic limit
    ],
)
def test_is_prime_large(n, expected):
    assert is_prime(n) is expected


def test_is_prime_refuses_beyond_deterministic_range():
    n = MR_LIMIT
    while any(n % q == 0 for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)):
        n += 1
    with pytest.raises(ValueError):
        is_prime(n)


@pytest.mark.parametrize(
    "args, expected",
    [((2, 100, 13, 24), [13, 37, 61]), ((2, 10, 0, 1), [2, 3, 5, 7]), ((14, 14, 13, 24), [])],
)
def test_primes_in_class_examples(args, expected):
    assert primes_in_class(*args) == expected


def test_primes_in_class_matches_sieve():
    want = [p for p in PRIMES_1E6 if p % 24 == 13]
    assert primes_in_class(2, 10**6, 13, 24) == want
    assert primes_in_class(2, 10**6) == PRIMES_1E6


def test_primes_in_class_across_segments():
    got = primes_in_class(999_000, 1_001_000)
    assert got == [n for n in range(999_000, 1_001_001) if _trial_division(n)]


@pytest.mark.parametrize("residue, modulus", [(24, 24), (-1, 5), (0, 0)])
def test_primes_in_class_rejects_bad_class(residue, modulus):
    with pytest.raises(ValueError):
        primes_in_class(2, 10, residue, modulus)


# ---------------------------------------------------------------- scaled roots

@pytest.mark.parametrize("num, den, p, expected", [(1, 1, 13, 3), (15, 32, 1024, 15), (3, 8, 757, 10)])
def test_floor_scaled_sqrt_examples(num, den, p, expected):
    assert floor_scaled_sqrt(num, den, p) == expected


@given(
    st.integers(min_value=1, max_value=10**6),
    st.sampled_from([1, 2, 4, 8, 16, 32, 64]),
    st.integers(min_value=1, max_value=10**12),
)
def test_floor_scaled_sqrt_squared_bracket(num, den, p):
    t = floor_scaled_sqrt(num, den, p)
    assert t * t * den * den <= num * num * p
    assert (t + 1) ** 2 * den * den > num * num * p


@given(st.sampled_from([Fraction(1, 4), Fraction(3, 8), Fraction(15, 32), Fraction(3, 4)]),
       st.integers(min_value=1, max_value=10**9))
def test_floor_frac_sqrt_matches_scaled(a, p):
    assert floor_frac_sqrt(a, p) == floor_scaled_sqrt(a.numerator, a.denominator, p)


# ---------------------------------------------------------------- radicals

def _t(p, coef=1, pe=0, te=0):
    return RadicalExpr.term(p, coef, Fraction(pe), Fraction(te))


def test_cmp_radical_examples():
    p = 16
    assert cmp_radical(_t(p, 1, Fraction(3, 4), Fraction(1, 2)), RadicalExpr.const(p, p)) is False
    assert cmp_radical(_t(13, 1, Fraction(1, 2)), _t(13, 1, Fraction(1, 2))) is False
    p = 7712
    lhs = (_t(p, Fraction(1, 4), Fraction(1, 2)) - 2) ** 2
    rhs = _t(p, Fraction(9, 2), Fraction(1, 2)) + 3
    assert cmp_radical(lhs, rhs) is True
    assert cmp_radical(lhs.at(7711), rhs.at(7711)) is False


def test_cmp_radical_rejects_mismatched_points():
    with pytest.raises(ValueError):
        cmp_radical(_t(13, 1, Fraction(1, 2)), _t(17, 1, Fraction(1, 2)))


def test_sign_exact_zero_two_radicals():
    p = 50  # sqrt(50) = 5 sqrt(2), decided by exact powering
    assert sign(_t(p, 1, Fraction(1, 2)) - _t(p, 5, 0, Fraction(1, 2))) == 0
    assert positive(_t(p, 1, Fraction(1, 2)) - _t(p, 5, 0, Fraction(1, 2))) is False


def test_hidden_zero_is_indeterminate_at_cap():
    # at p = 8: sqrt(p) = 2 sqrt(2) and p^(1/4) = 2^(3/4), four distinct keys summing to 0
    p = 8
    zero = _t(p, 1, Fraction(1, 2)) - _t(p, 2, 0, Fraction(1, 2)) + _t(p, 1, Fraction(1, 4)) - _t(p, 1, 0, Fraction(3, 4))
    assert isinstance(positive(zero, max_bits=512), Indeterminate)
    assert isinstance(sign(zero, max_bits=512), Indeterminate)


def test_indeterminate_refuses_truth_test():
    with pytest.raises(IndeterminateComparison):
        bool(Indeterminate(8192))


def test_precision_escalates_until_decided():
    # sqrt(n^2 + 1) - n - 1/(2n) is about -1/(8 n^3), far below 2^-64
    n = 10**9
    p = n * n + 1
    tiny = _t(p, 1, Fraction(1, 2)) - n - Fraction(1, 2 * n) + _t(p, Fraction(1, 1 << 400), Fraction(1, 4))
    assert isinstance(positive(tiny, start_bits=64, max_bits=64), Indeterminate)
    assert positive(tiny) is False
    assert sign(tiny) == -1


@given(st.integers(min_value=1, max_value=10**8), st.integers(min_value=2, max_value=9))
def test_bracket_encloses_root(p, d):
    lo, hi = bracket(_t(p, 1, Fraction(1, d)), bits=64)
    assert lo**d <= p <= hi**d


POWERS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def _random_expr(rng: random.Random, p: int) -> RadicalExpr:
    expr = RadicalExpr(p)
    for _ in range(rng.randint(1, 4)):
        coef = Fraction(rng.randint(-64, 64), 1 << rng.randint(0, 5))
        expr = expr + RadicalExpr.term(p, coef, rng.choice(POWERS), rng.choice([0, Fraction(1, 2)]))
    return expr


def _mpq(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def _oracle(expr: RadicalExpr) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for c, pe, te in expr.terms:
        coef = mpmath.mpf(c.numerator) / c.denominator
        total += coef * mpmath.power(expr.p, _mpq(pe)) * mpmath.power(2, _mpq(te))
    return total


def test_cmp_radical_against_high_precision_oracle():
    rng = random.Random(7711)
    decided = 0
    with mpmath.workprec(1000):
        for _ in range(10**4):
            p = rng.choice([rng.randint(1, 10**4), rng.randint(1, 10**12), rng.choice(PRIMES_1E6)])
            lhs, rhs = _random_expr(rng, p), _random_expr(rng, p)
            diff = _oracle(lhs) - _oracle(rhs)
            got = cmp_radical(lhs, rhs)
            assert not isinstance(got, Indeterminate)
            if abs(diff) > mpmath.mpf(2) ** -900:
                assert got is (diff > 0), (lhs, rhs, diff)
                decided += 1
            else:
                assert got is False  # equal values are never "greater"
    assert decided > 9000
