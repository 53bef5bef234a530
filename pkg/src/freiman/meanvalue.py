"""Vinogradov-type mean values J_{s,k} by exact moment tallies."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from freiman import kernels
from freiman.core import DEFAULT_BUDGET, IntSet, Poly, PolySystem, check_budget, eval_poly
from freiman.errors import BudgetExceeded, InputError

DEFAULT_EPS = 0.01


def _power_phis(k: int) -> list[Poly]:
    return [Poly(1, [(1, (j,))]) for j in range(1, k + 1)]


def _as_phis(phis) -> list[Poly]:
    if isinstance(phis, PolySystem):
        phis = phis.polys
    out = []
    for f in phis:
        if not isinstance(f, Poly):
            f = Poly(1, [(c, (e,)) for c, e in f])
        if f.nvars != 1:
            raise InputError(f"phi must be a polynomial in one variable, got {f.nvars}")
        out.append(f)
    if not out:
        raise InputError("need at least one phi")
    return out


def moment_counts(A: IntSet, s: int, phis: Sequence[Poly], budget=DEFAULT_BUDGET) -> dict:
    """N(v): number of s-tuples over A with moment vector v = (sum_i phi_j(x_i))_j."""
    if s < 1:
        raise InputError("s must be positive")
    if not A.card:
        raise InputError("empty set")
    check_budget("moment tally over A^s", A.card**s, budget)
    tables = [[eval_poly(f, (a,)) for a in A.elements] for f in phis]
    return kernels.moment_tally(tables, s)


def count_J_phi(A: IntSet, s: int, phis, budget=DEFAULT_BUDGET) -> int:
    """Number of 2s-tuples with sum_{i<=s} phi_j(x_i) = sum_{i>s} phi_j(x_i) for every j."""
    counts = moment_counts(A, s, _as_phis(phis), budget)
    return sum(n * n for n in counts.values())


def count_J(A: IntSet, s: int, k: int, budget=DEFAULT_BUDGET) -> int:
    """J_{s,k}(A) through the meet-in-the-middle identity J = sum_v N(v)^2."""
    if k < 1:
        raise InputError("k must be positive")
    return count_J_phi(A, s, _power_phis(k), budget)


def count_J_bruteforce(A: IntSet, s: int, k: int = None, phis=None, budget=DEFAULT_BUDGET) -> int:
    """Direct enumeration of A^(2s); the oracle for :func:`count_J`.

    Every pair (left s-tuple, right s-tuple) is compared, so the work is
    card(A)^(2s); only the moment vector of each half is precomputed.
    """
    if phis is None:
        if k is None:
            raise InputError("need k or phis")
        phis = _power_phis(k)
    phis = _as_phis(phis)
    if s < 1:
        raise InputError("s must be positive")
    check_budget("brute force over A^(2s)", A.card ** (2 * s), budget)
    vals = [[eval_poly(f, (a,)) for f in phis] for a in A.elements]
    r = len(phis)
    halves = [
        tuple(sum(vals[i][j] for i in idx) for j in range(r)) for idx in product(range(A.card), repeat=s)
    ]
    total = 0
    for left in halves:
        for right in halves:
            if left == right:
                total += 1
    return total


def vinogradov_system(s: int, k: int) -> PolySystem:
    """The system sum_{i<=s} x_i^j - sum_{i>s} x_i^j, j = 1..k, in 2s variables."""
    polys = []
    for j in range(1, k + 1):
        terms = []
        for i in range(2 * s):
            e = [0] * (2 * s)
            e[i] = j
            terms.append((1 if i < s else -1, e))
        polys.append(Poly(2 * s, terms))
    return PolySystem(polys, 2 * s)


def translate_to_zero(A: IntSet) -> IntSet:
    """A - min(A)."""
    m = A.min
    return A.map(lambda a: a - m)


@dataclass(frozen=True)
class BoundReport:
    card: int
    s: int
    k: int
    J: int
    lower: int  # A^s
    upper: int  # A^(2s)
    eps: float
    shape: float  # diam^eps * (A^s + A^(2s - k(k+1)/2))
    consecutive_J: int | None  # J_{s,k}({1..A}) when affordable

    @property
    def trivial_ok(self) -> bool:
        return self.lower <= self.J <= self.upper

    @property
    def vs_consecutive(self) -> str | None:
        if self.consecutive_J is None:
            return None
        if self.J < self.consecutive_J:
            return "below"
        return "equal" if self.J == self.consecutive_J else "above"

    def lines(self) -> list[str]:
        out = [
            f"trivial envelope: {self.lower} <= J={self.J} <= {self.upper}: {'holds' if self.trivial_ok else 'VIOLATED'}",
            f"diam^eps*(A^s + A^(2s-k(k+1)/2)) at eps={self.eps}: {self.shape:.6g}",
        ]
        if self.consecutive_J is None:
            out.append("consecutive comparison: skipped (budget)")
        else:
            out.append(f"consecutive comparison: J({{1..{self.card}}})={self.consecutive_J}, this set is {self.vs_consecutive}")
        return out


def bound_report(A: IntSet, s: int, k: int, J: int, eps=DEFAULT_EPS, budget=DEFAULT_BUDGET) -> BoundReport:
    """Compare J against the trivial envelope, the mean value shape and consecutive integers.

    The last two are informational only.
    """
    n = A.card
    e = 2 * s - k * (k + 1) // 2
    second = Fraction(n) ** e
    shape = float(A.diam) ** eps * float(n**s + second)
    try:
        cons = count_J(IntSet(range(1, n + 1)), s, k, budget=budget)
    except BudgetExceeded:
        cons = None
    return BoundReport(n, s, k, J, n**s, n ** (2 * s), eps, shape, cons)
