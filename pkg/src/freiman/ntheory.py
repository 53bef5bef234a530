"""Small number-theory helpers: primality, residues, lcm."""

from math import gcd, isqrt

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

# Miller-Rabin with the first 13 primes as bases is exact below this bound.
MR_EXACT_LIMIT = 3317044064679887385961981


def is_prime(n: int) -> bool:
    """Deterministic primality test for ``n < MR_EXACT_LIMIT``.

    Larger ``n`` raise ``ValueError``; none of the constructions here produce
    primes anywhere near that size.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 43 * 43:
        return True
    if n >= MR_EXACT_LIMIT:
        raise ValueError(f"{n} is beyond the deterministic Miller-Rabin range")
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime_trial(n: int) -> bool:
    """Trial division; the reference the fast test is checked against."""
    if n < 2:
        return False
    for d in range(2, isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def primes_between(lo: int, hi: int):
    """Primes p with lo < p <= hi, ascending."""
    p = max(lo + 1, 2)
    while p <= hi:
        if is_prime(p):
            yield p
        p += 1


def nlr(a: int, h: int) -> int:
    """Numerically least residue: the m with -h/2 < m <= h/2 and m = a (mod h)."""
    m = a % h
    if 2 * m > h:
        m -= h
    return m


def dist_to_int_le(num: int, den: int, bound_num: int, bound_den: int) -> bool:
    """Exact test of ``||num/den|| <= bound_num/bound_den`` (``den > 0``)."""
    r = num % den
    d = min(r, den - r)
    return d * bound_den <= bound_num * den


def dist_to_int_lt(num: int, den: int, bound_num: int, bound_den: int) -> bool:
    r = num % den
    d = min(r, den - r)
    return d * bound_den < bound_num * den


def lcm_upto(n: int) -> int:
    """lcm[1, 2, ..., n]."""
    L = 1
    for m in range(2, n + 1):
        L = L * m // gcd(L, m)
    return L
