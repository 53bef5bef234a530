"""Densification of integer sets by a CRT-style combination map.

Given a set D of n integers and n distinct primes avoiding Upsilon(D, P), the
map

    omega(d_1, ..., d_n) = sum_i d_i * prod_{j != i} p_j

sends D^n injectively to a set E of n^n integers and carries S(D;P)^n onto
S(E;P) slice by slice when P is linear and homogeneous. The step is judged by
the ratio log env / log card, which should shrink by a factor (1 - eps).
"""

from __future__ import annotations

import math
import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from mpmath import iv

from freiman.condense import compute_upsilon
from freiman.core import DEFAULT_BUDGET, IntSet, PolySystem, check_budget, eval_poly, scan, separable_tables
from freiman.errors import (
    BudgetExceeded,
    InputError,
    InternalVerificationError,
    PrecisionError,
    PreconditionError,
)
from freiman.ntheory import is_prime, primes_between
from freiman.verify import MapTable, Verdict, is_tfold_freiman_iso

# bits of working precision for the interval logarithms
DEFAULT_PREC = 256
OUTPUT_BUDGET = 10**6
VERIFY_LEVELS = ("full", "count", "sample", "none")


@contextmanager
def _precision(bits):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def as_fraction(x) -> Fraction:
    """Read 0.1, "0.1" or Fraction(1, 10) as the same exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _iv_frac(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


@dataclass(frozen=True)
class Ratio:
    """log env / log card, kept as the exact pair plus an interval value."""

    env: int
    card: int

    def interval(self, prec=DEFAULT_PREC):
        if self.card < 2:
            raise InputError("ratio undefined for card < 2")
        with _precision(prec):
            return iv.log(iv.mpf(self.env)) / iv.log(iv.mpf(self.card))

    def value(self, prec=DEFAULT_PREC) -> float:
        x = self.interval(prec)
        return float(x.mid.a)


@dataclass(frozen=True)
class Comparison:
    """Interval verdict for ``lhs <= rhs``.

    ``margin`` is a lower bound on ``rhs - lhs`` when it holds (upper bound
    on ``lhs - rhs`` when it fails); ``error`` is the total interval width,
    an upper bound on the evaluation error. A verdict is only issued when
    ``margin > error``.
    """

    holds: bool
    margin: float
    error: float


def interval_le(lhs, rhs) -> Comparison:
    # differences of endpoints are intervals again; take the safe side of each
    err = float(((lhs.b - lhs.a) + (rhs.b - rhs.a)).b)
    if lhs.b <= rhs.a:
        margin = float((rhs.a - lhs.b).a)
        if margin > err:
            return Comparison(True, margin, err)
    elif lhs.a > rhs.b:
        margin = float((lhs.a - rhs.b).a)
        if margin > err:
            return Comparison(False, margin, err)
    raise PrecisionError(f"cannot separate {lhs} and {rhs} at the current precision")


def _compare(fn, prec):
    """Evaluate ``fn`` at increasing precision until the comparison separates."""
    bits = prec
    while True:
        try:
            with _precision(bits):
                return fn()
        except PrecisionError:
            if bits >= 16 * prec:
                raise
            bits *= 2


def find_d_primes(U: int, D: int, Y_start: int, max_doublings=64) -> tuple[list[int], int]:
    """The D smallest primes in (Y, 2Y] not dividing U, doubling Y until there are D.

    Returns ``(primes, Y_used)``.
    """
    if U < 1 or D < 1:
        raise InputError("need U >= 1 and D >= 1")
    Y = max(int(Y_start), 1)
    for _ in range(max_doublings + 1):
        found = []
        for p in primes_between(Y, 2 * Y):
            if U % p:
                found.append(p)
                if len(found) == D:
                    return found, Y
        Y *= 2
    raise BudgetExceeded("prime window doublings", max_doublings + 1, max_doublings)


def omega_weights(primes) -> list[int]:
    M = math.prod(primes)
    return [M // p for p in primes]


def omega_map(d, primes) -> int:
    """sum_i d_i * prod_{j != i} primes_j."""
    if len(d) != len(primes):
        raise InputError(f"tuple of length {len(d)} against {len(primes)} primes")
    return sum(di * w for di, w in zip(d, omega_weights(primes)))


def omega_table(D_set: IntSet, primes) -> MapTable:
    w = omega_weights(primes)
    n = len(primes)
    return MapTable.t_fold(
        {key: sum(k * wi for k, wi in zip(key, w)) for key in product(D_set.elements, repeat=n)}, n
    )


def initial_threshold(D_set: IntSet, P: PolySystem) -> int:
    """ceil(4 * D^s * ln(r * Lam * X)) with X = env - 1, at least 1."""
    X = D_set.env - 1
    base = P.r * P.Lam * X
    if base <= 1:
        return 1
    return max(1, math.ceil(4 * D_set.card**P.s * math.log(base)))


@dataclass(frozen=True)
class DensifyStep:
    primes: tuple[int, ...]
    Y_used: int
    input: IntSet = field(repr=False)
    output: IntSet = field(repr=False)
    ratio_before: Ratio
    ratio_after: Ratio
    epsilon: Fraction
    precondition: Comparison  # log(2Y) <= (1 - 2 eps) log env(D)
    improvement: Comparison  # ratio_after <= (1 - eps) ratio_before
    env_bound: int
    verification: str
    verdict: Verdict | None = None
    solution_counts: tuple[int, int] | None = None

    @property
    def D(self) -> int:
        return len(self.primes)

    def omega(self) -> MapTable:
        return omega_table(self.input, self.primes)


def _ratio_checks(D_set, E, Y, eps, prec):
    before = Ratio(D_set.env, D_set.card)
    after = Ratio(E.env, E.card)

    def pre():
        lhs = iv.log(iv.mpf(2 * Y))
        rhs = (1 - 2 * _iv_frac(eps)) * iv.log(iv.mpf(D_set.env))
        return interval_le(lhs, rhs)

    def improve():
        lhs = iv.log(iv.mpf(E.env)) / iv.log(iv.mpf(E.card))
        rhs = (1 - _iv_frac(eps)) * iv.log(iv.mpf(D_set.env)) / iv.log(iv.mpf(D_set.card))
        return interval_le(lhs, rhs)

    return before, after, _compare(pre, prec), _compare(improve, prec)


def densify_step(
    D_set: IntSet,
    P: PolySystem,
    verify="auto",
    epsilon=Fraction(1, 10),
    budget=DEFAULT_BUDGET,
    output_budget=OUTPUT_BUDGET,
    Y_start=1,
    prec=DEFAULT_PREC,
    sample_size=2000,
    seed=0,
) -> DensifyStep:
    """One densification step with n = card(D_set) primes.

    ``verify``: ``full`` checks the n-fold isomorphism exhaustively,
    ``count`` checks |S(E;P)| = |S(D;P)|^n, ``sample`` adds a seeded random
    sample of slice tuples to the count check, ``none`` skips both. ``auto``
    is ``full`` for card <= 3 and ``count`` above.
    """
    if not (P.is_linear and P.is_homogeneous):
        raise PreconditionError("densification needs a homogeneous linear system")
    n = D_set.card
    if n < 2:
        raise PreconditionError("densification needs at least two elements")
    if verify == "auto":
        verify = "full" if n <= 3 else "count"
    if verify not in VERIFY_LEVELS:
        raise InputError(f"unknown verification level {verify!r}")
    eps = as_fraction(epsilon)
    check_budget("densified set size card^card", n**n, output_budget)

    U = compute_upsilon(D_set, P, budget=budget)
    Y0 = max(int(Y_start), initial_threshold(D_set, P))
    primes, Y = find_d_primes(U, n, Y0)
    w = omega_weights(primes)
    keys = list(product(D_set.elements, repeat=n))
    values = [sum(k * wi for k, wi in zip(key, w)) for key in keys]
    E = IntSet(values)
    if E.card != n**n:
        raise InternalVerificationError("omega is not injective on D^n")
    env_bound = n * (2 * Y) ** (n - 1) * D_set.env
    if E.env > env_bound:
        raise InternalVerificationError(f"env(E)={E.env} exceeds bound {env_bound}")

    verdict = None
    counts = None
    if verify == "full":
        verdict = is_tfold_freiman_iso(MapTable.t_fold(dict(zip(keys, values)), n), D_set, P, budget=budget)
        if not verdict:
            raise InternalVerificationError(f"densification map fails: {verdict.describe()}")
    if verify in ("count", "sample"):
        sD = len(scan(P, D_set.elements, budget=budget)[0])
        sE = len(scan(P, E.elements, budget=budget)[0])
        counts = (sD, sE)
        if sE != sD**n:
            raise InternalVerificationError(f"|S(E)|={sE} but |S(D)|^{n}={sD ** n}")
    if verify == "sample":
        verdict = _sample_check(D_set, P, keys, values, sample_size, seed)
        if not verdict:
            raise InternalVerificationError(f"sampled slice check fails: {verdict.describe()}")

    before, after, pre, improve = _ratio_checks(D_set, E, Y, eps, prec)
    return DensifyStep(
        primes=tuple(primes),
        Y_used=Y,
        input=D_set,
        output=E,
        ratio_before=before,
        ratio_after=after,
        epsilon=eps,
        precondition=pre,
        improvement=improve,
        env_bound=env_bound,
        verification=verify,
        verdict=verdict,
        solution_counts=counts,
    )


def _sample_check(D_set, P, keys, values, size, seed) -> Verdict:
    rng = random.Random(seed)
    n = D_set.card
    s = P.s
    for _ in range(size):
        idx = [rng.randrange(len(keys)) for _ in range(s)]
        rows = [tuple(keys[idx[j]][i] for j in range(s)) for i in range(n)]
        lhs = all(P.is_solution(row) for row in rows)
        rhs = P.is_solution([values[i] for i in idx])
        if lhs != rhs:
            return Verdict(False, size, tuple(keys[i] for i in idx), "lost" if lhs else "spurious")
    return Verdict(True, size)


@dataclass(frozen=True)
class DensifyRun:
    initial: IntSet
    final: IntSet
    steps: tuple[DensifyStep, ...]
    epsilon: Fraction
    stop_reason: str  # target_reached, budget, max_steps
    detail: str = ""

    @property
    def target_reached(self) -> bool:
        return self.stop_reason == "target_reached"


def should_continue(E: IntSet, s: int, eps: Fraction) -> bool:
    """env > card^(s(1 + 4 eps)), decided in exact integer arithmetic."""
    if E.card < 2:
        return False
    p, q = eps.numerator, eps.denominator
    return E.env**q > E.card ** (s * (q + 4 * p))


def densify_iterate(
    A: IntSet,
    P: PolySystem,
    epsilon=Fraction(1, 10),
    max_steps=4,
    verify="auto",
    budget=DEFAULT_BUDGET,
    output_budget=OUTPUT_BUDGET,
    prec=DEFAULT_PREC,
    force=False,
) -> DensifyRun:
    """Repeat :func:`densify_step` while env(current) > card(current)^(s(1+4eps)).

    ``force`` ignores that stopping rule and takes ``max_steps`` steps unless
    a budget intervenes.
    """
    eps = as_fraction(epsilon)
    if not (0 < eps < Fraction(1, 8)):
        raise InputError("epsilon must lie in (0, 1/8)")
    cur = A
    steps = []
    reason, detail = "max_steps", ""
    for _ in range(max_steps):
        if not force and not should_continue(cur, P.s, eps):
            reason = "target_reached"
            break
        n = cur.card
        level = verify if verify != "auto" else ("full" if n <= 3 else "count")
        try:
            check_budget("densified set size card^card", n**n, output_budget)
            if level in ("full", "count", "sample"):
                check_budget("verification over card^(card*s)", n ** (n * P.s), budget)
            step = densify_step(cur, P, verify=level, epsilon=eps, budget=budget, output_budget=output_budget, prec=prec)
        except BudgetExceeded as exc:
            reason, detail = "budget", str(exc)
            break
        steps.append(step)
        cur = step.output
    else:
        if not should_continue(cur, P.s, eps):
            reason = "target_reached"
    return DensifyRun(A, cur, tuple(steps), eps, reason, detail)


def compose_t_fold(first: MapTable, second: MapTable) -> MapTable:
    """Compose a t-fold map D^t -> E with a t'-fold map E^t' -> F into a tt'-fold map.

    A key of length t*t' is read as t' consecutive blocks of length t; each
    block goes through ``first`` and the resulting t'-tuple through ``second``.
    """
    t, t2 = first.t, second.t
    D = sorted({c for k in first.domain() for c in k})
    out = {}
    for key in product(D, repeat=t * t2):
        mid = tuple(first[key[b * t:(b + 1) * t]] for b in range(t2))
        out[key] = second[mid]
    return MapTable.t_fold(out, t * t2)


# ---------------------------------------------------------------------------
# non-linear homogeneous systems: congruence-level preservation


def nonlinear_threshold(D_set: IntSet, P: PolySystem) -> int:
    """ceil(4 r D^(2s) ln(Lam X^k)) with X = env(D) and k the degree."""
    X = D_set.env
    base = P.Lam * X**P.degree
    if base <= 1:
        return 1
    return max(1, math.ceil(4 * P.r * D_set.card ** (2 * P.s) * math.log(base)))


def nonlinear_primes(D_set: IntSet, P: PolySystem, budget=DEFAULT_BUDGET) -> tuple[list[int], int]:
    """Primes avoiding the product-form Upsilon, searched from the non-linear threshold."""
    U = compute_upsilon(D_set, P, budget=budget, form="product")
    return find_d_primes(U, D_set.card, nonlinear_threshold(D_set, P))


def modular_preservation_check(
    D_set: IntSet, P: PolySystem, primes, method="auto", budget=DEFAULT_BUDGET, require_avoiding=True
) -> Verdict:
    """Congruence-level preservation of S(D;P)^n under omega, modulo prod(primes).

    Decides whether, for every s-tuple of keys from D^n, all n slices solve P
    exactly when every P_l(omega(...)) vanishes modulo p_1 ... p_n.

    ``full`` enumerates all card(D)^(n*s) key tuples. ``factored`` uses
    the CRT splitting: modulo p_k, omega(key) = key_k * w_k with w_k invertible,
    so the condition factors over the primes and reduces to comparing S(D;P)
    with the rows vanishing modulo each p_k. ``auto`` picks ``full`` when it
    fits in ``budget``. With ``require_avoiding`` (the default) primes dividing
    the product-form Upsilon are refused, since for the others the check
    cannot fail; switch it off to probe arbitrary primes.
    """
    if not P.is_homogeneous:
        raise PreconditionError("modular preservation needs a homogeneous system")
    primes = list(primes)
    n = D_set.card
    if len(primes) != n:
        raise InputError(f"need {n} primes, got {len(primes)}")
    if len(set(primes)) != n or not all(is_prime(p) for p in primes):
        raise InputError("primes must be distinct primes")
    U = compute_upsilon(D_set, P, budget=budget, form="product") if require_avoiding else 1
    bad = [p for p in primes if U % p == 0]
    if bad:
        raise PreconditionError(f"primes {bad} divide Upsilon(D, P); the check would be meaningless")
    total = n ** (n * P.s)
    if method == "auto":
        method = "full" if total <= budget else "factored"
    if method == "full":
        check_budget("modular check over (D^n)^s", total, budget)
        return _modular_full(D_set, P, primes)
    if method == "factored":
        return _modular_factored(D_set, P, primes)
    raise InputError(f"unknown method {method!r}")


def _modular_full(D_set, P, primes) -> Verdict:
    n = D_set.card
    s = P.s
    M = math.prod(primes)
    keys = list(product(D_set.elements, repeat=n))
    w = omega_weights(primes)
    values = [sum(k * wi for k, wi in zip(key, w)) % M for key in keys]
    sols_D = set(scan(P, D_set.elements)[0])

    # congruence solutions over the keys, last coordinate by lookup
    tabs = separable_tables(P, values)
    rhs = set()
    if tabs is not None:
        tables, consts = tabs
        r = P.r
        last = {}
        for x in range(len(keys)):
            last.setdefault(tuple((-tables[i][s - 1][x]) % M for i in range(r)), []).append(x)

        def rec(level, prefix, partial):
            if level == s - 1:
                for x in last.get(tuple(v % M for v in partial), ()):
                    rhs.add(prefix + (x,))
                return
            for x in range(len(keys)):
                rec(level + 1, prefix + (x,), tuple((partial[i] + tables[i][level][x]) % M for i in range(r)))

        rec(0, (), tuple(c % M for c in consts))
    else:
        for idx in product(range(len(keys)), repeat=s):
            x = [values[i] for i in idx]
            if all(eval_poly(p, x) % M == 0 for p in P.polys):
                rhs.add(idx)

    lhs = set()
    for rows in product(sorted(sols_D), repeat=n):
        lhs.add(tuple(sum(rows[i][j] * n ** (n - 1 - i) for i in range(n)) for j in range(s)))
    total = n ** (n * s)
    if lhs == rhs:
        return Verdict(True, total)
    first = min(lhs ^ rhs)
    return Verdict(False, total, tuple(keys[i] for i in first), "lost" if first in lhs else "spurious")


def _modular_factored(D_set, P, primes) -> Verdict:
    n = D_set.card
    s = P.s
    el = D_set.elements
    sols = set(scan(P, el)[0])
    w = omega_weights(primes)
    vanishing = []
    for p, wk in zip(primes, w):
        zk = set()
        for idx in product(range(n), repeat=s):
            x = [el[i] for i in idx]
            if all((pow(wk, poly.degree, p) * eval_poly(poly, x)) % p == 0 for poly in P.polys):
                zk.add(idx)
        vanishing.append(zk)
    total = n ** (n * s)
    if sols:
        if all(z == sols for z in vanishing):
            return Verdict(True, total)
        # a spurious key tuple: one row from Z_k \ S, the others from S
        k = next(k for k, z in enumerate(vanishing) if z != sols)
        row = min(vanishing[k] - sols) if vanishing[k] - sols else None
        if row is None:  # cannot happen: solutions always vanish
            raise InternalVerificationError("a solution fails to vanish modulo a prime")
        base = min(sols)
        rows = [base] * n
        rows[k] = row
        return Verdict(False, total, _rows_to_keys(rows, el, s), "spurious")
    if any(not z for z in vanishing):
        return Verdict(True, total)
    rows = [min(z) for z in vanishing]
    return Verdict(False, total, _rows_to_keys(rows, el, s), "spurious")


def _rows_to_keys(rows, el, s):
    n = len(rows)
    return tuple(tuple(el[rows[i][j]] for i in range(n)) for j in range(s))
