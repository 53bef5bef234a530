from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from freiman.ntheory import (
    dist_to_int_le,
    dist_to_int_lt,
    is_prime,
    is_prime_trial,
    lcm_upto,
    nlr,
    primes_between,
)


def test_is_prime_small_range_matches_trial():
    for n in range(-5, 20000):
        assert is_prime(n) == is_prime_trial(n), n


@pytest.mark.parametrize(
    "n",
    [
        3215031751,  # strong pseudoprime to bases 2, 3, 5, 7
        3825123056546413051,  # strong pseudoprime to bases up to 23
        318665857834031151167461,  # strong pseudoprime to bases up to 37
    ],
)
def test_strong_pseudoprimes_rejected(n):
    assert not is_prime(n)


def test_known_primes():
    assert is_prime(2**61 - 1)
    assert is_prime(1000000007)
    assert not is_prime((2**31 - 1) * 1000000007)


def test_out_of_range():
    with pytest.raises(ValueError):
        is_prime(2**89 - 1)


def test_primes_between():
    assert list(primes_between(4, 8)) == [5, 7]
    assert list(primes_between(7, 13)) == [11, 13]
    assert list(primes_between(0, 2)) == [2]
    assert list(primes_between(100, 200)) == [p for p in range(101, 201) if oracle.is_prime(p)]


@given(st.integers(-10**30, 10**30), st.integers(1, 10**12))
def test_nlr(a, h):
    m = nlr(a, h)
    assert (m - a) % h == 0
    assert -h < 2 * m <= h


def test_nlr_examples():
    assert nlr(5, 10) == 5
    assert nlr(6, 10) == -4
    assert nlr(-5, 10) == 5
    assert nlr(3, 7) == 3 and nlr(4, 7) == -3


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4), st.integers(1, 20))
def test_dist_to_int(num, den, q):
    x = Fraction(num, den)
    d = abs(x - round(x))
    assert dist_to_int_le(num, den, 1, q) == (d <= Fraction(1, q))
    assert dist_to_int_lt(num, den, 1, q) == (d < Fraction(1, q))


def test_lcm_upto():
    assert [lcm_upto(n) for n in range(1, 11)] == [1, 2, 6, 12, 60, 60, 420, 840, 2520, 2520]
    assert lcm_upto(16) == 720720
