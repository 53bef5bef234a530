"""Integer sets, sparse polynomial systems, solution sets and hypergraphs.

Everything is exact: Python ints throughout, no floating point. Solution
tuples are kept as index tuples into the sorted ground set; labels are
produced on demand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from freiman import kernels
from freiman.errors import BudgetExceeded, InputError

DEFAULT_BUDGET = 10**8


def check_budget(what: str, needed: int, budget: int | None) -> None:
    if budget is not None and needed > budget:
        raise BudgetExceeded(what, needed, budget)


def product_tree(values: Sequence[int]) -> int:
    """Product of many big integers, balanced to keep multiplications cheap."""
    vals = list(values)
    if not vals:
        return 1
    while len(vals) > 1:
        nxt = [vals[i] * vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"not an integer: {token!r}", line=lineno) from None


# ---------------------------------------------------------------------------
# IntSet


@dataclass(frozen=True, init=False)
class IntSet:
    """A finite set of integers, stored sorted ascending."""

    elements: tuple[int, ...]

    def __init__(self, elements: Iterable[int] = ()):
        elems = tuple(sorted({int(a) for a in elements}))
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a) -> bool:
        return a in self._index

    def __repr__(self) -> str:
        return f"IntSet({list(self.elements)})"

    @cached_property
    def _index(self) -> dict[int, int]:
        return {a: i for i, a in enumerate(self.elements)}

    def index(self, a: int) -> int:
        return self._index[a]

    def _nonempty(self):
        if not self.elements:
            raise InputError("empty set")

    @property
    def card(self) -> int:
        return len(self.elements)

    @property
    def min(self) -> int:
        self._nonempty()
        return self.elements[0]

    @property
    def max(self) -> int:
        self._nonempty()
        return self.elements[-1]

    @property
    def diam(self) -> int:
        return self.max - self.min + 1

    @property
    def env(self) -> int:
        return max(-self.min, self.max) + 1

    def map(self, f) -> IntSet:
        return IntSet(f(a) for a in self.elements)

    def to_text(self) -> str:
        return "".join(f"{a}\n" for a in self.elements)

    @classmethod
    def from_text(cls, text: str) -> IntSet:
        vals = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = _strip_comment(raw)
            if not line:
                continue
            if len(line.split()) != 1:
                raise InputError(f"expected one integer per line, got {line!r}", line=lineno)
            vals.append(_parse_int(line, lineno))
        if not vals:
            raise InputError("set file contains no integers")
        return cls(vals)

    def to_json(self) -> str:
        return json.dumps([str(a) for a in self.elements])

    @classmethod
    def from_json(cls, text: str) -> IntSet:
        return cls(int(a) for a in json.loads(text))


def measures(A: IntSet) -> tuple[int, int, int]:
    """Return ``(card, diam, env)`` using the +1 convention for diam and env."""
    if not A.card:
        raise InputError("measures of an empty set")
    return A.card, A.diam, A.env


# ---------------------------------------------------------------------------
# Polynomials


@dataclass(frozen=True, init=False)
class Poly:
    """Sparse integer polynomial in ``nvars`` variables.

    ``terms`` is a tuple of ``(coeff, exps)`` pairs with distinct exponent
    tuples and nonzero coefficients, sorted by exponent tuple descending.
    """

    nvars: int
    terms: tuple[tuple[int, tuple[int, ...]], ...]

    def __init__(self, nvars: int, terms: Iterable[tuple[int, Sequence[int]]]):
        if nvars < 1:
            raise InputError("a polynomial needs at least one variable")
        acc: dict[tuple[int, ...], int] = {}
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise InputError(f"exponent tuple {exps} has length {len(exps)}, expected {nvars}")
            if any(e < 0 for e in exps):
                raise InputError(f"negative exponent in {exps}")
            acc[exps] = acc.get(exps, 0) + int(coeff)
        clean = tuple(sorted(((c, e) for e, c in acc.items() if c), key=lambda t: t[1], reverse=True))
        if not clean:
            raise InputError("zero polynomial")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def linear(cls, coeffs: Sequence[int], b: int = 0) -> Poly:
        """``sum_j coeffs[j] * x_j - b``."""
        s = len(coeffs)
        terms = [(c, tuple(int(i == j) for i in range(s))) for j, c in enumerate(coeffs)]
        terms.append((-b, (0,) * s))
        return cls(s, terms)

    def __call__(self, x: Sequence[int]) -> int:
        return eval_poly(self, x)

    @property
    def degree(self) -> int:
        return max(sum(e) for _, e in self.terms)

    @property
    def norm1(self) -> int:
        return sum(abs(c) for c, _ in self.terms)

    @property
    def constant(self) -> int:
        for c, e in self.terms:
            if not any(e):
                return c
        return 0

    @property
    def is_linear(self) -> bool:
        return self.degree <= 1

    @property
    def is_homogeneous(self) -> bool:
        degs = {sum(e) for _, e in self.terms}
        return len(degs) == 1 and 0 not in degs

    @property
    def is_separable(self) -> bool:
        return all(sum(1 for v in e if v) <= 1 for _, e in self.terms)

    def diagonal_degree(self) -> int | None:
        """``t`` if the polynomial is ``sum_j c_j x_j**t``, else None."""
        t = None
        seen = set()
        for _, e in self.terms:
            nz = [(j, v) for j, v in enumerate(e) if v]
            if len(nz) != 1:
                return None
            j, v = nz[0]
            if j in seen or (t is not None and v != t):
                return None
            seen.add(j)
            t = v
        return t

    def to_line(self) -> str:
        if self.is_linear:
            cs = [0] * self.nvars
            for c, e in self.terms:
                if any(e):
                    cs[e.index(1)] = c
            return "linear: " + " ".join(map(str, cs + [-self.constant]))
        return "poly: " + "; ".join(f"{c} " + " ".join(map(str, e)) for c, e in self.terms)


def eval_poly(P: Poly, x: Sequence[int]) -> int:
    """Exact value of ``P`` at the integer tuple ``x``."""
    if len(x) != P.nvars:
        raise InputError(f"arity mismatch: polynomial has {P.nvars} variables, got {len(x)} values")
    total = 0
    for c, e in P.terms:
        term = c
        for xj, ej in zip(x, e):
            if ej:
                term *= xj**ej
        total += term
    return total


@dataclass(frozen=True, init=False)
class PolySystem:
    """r integer polynomials in s variables."""

    num_vars: int
    polys: tuple[Poly, ...]

    def __init__(self, polys: Iterable[Poly], num_vars: int | None = None):
        polys = tuple(polys)
        if not polys:
            raise InputError("a polynomial system needs at least one polynomial")
        if num_vars is None:
            num_vars = polys[0].nvars
        for p in polys:
            if p.nvars != num_vars:
                raise InputError(f"polynomial in {p.nvars} variables inside a system of {num_vars}")
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "polys", polys)

    @classmethod
    def linear(cls, rows: Iterable[tuple[Sequence[int], int]]) -> PolySystem:
        """Rows ``(c_i, b_i)`` meaning ``P_i(x) = sum_j c_ij x_j - b_i``."""
        return cls(Poly.linear(c, b) for c, b in rows)

    @classmethod
    def diagonal(cls, rows: Iterable[Sequence[int]], t: int) -> PolySystem:
        """Rows ``c_i`` meaning ``P_i(x) = sum_j c_ij x_j**t``."""
        polys = []
        for cs in rows:
            s = len(cs)
            polys.append(Poly(s, [(c, tuple(t * (i == j) for i in range(s))) for j, c in enumerate(cs)]))
        return cls(polys)

    @property
    def r(self) -> int:
        return len(self.polys)

    @property
    def s(self) -> int:
        return self.num_vars

    @property
    def Lam(self) -> int:
        """Height: max over polynomials of the sum of absolute coefficients.

        For ``sum_j c_ij x_j - b_i`` this is ``max_i (sum_j |c_ij| + |b_i|)``.
        """
        return max(p.norm1 for p in self.polys)

    @property
    def k(self) -> int:
        return self.Lam

    @property
    def degree(self) -> int:
        return max(p.degree for p in self.polys)

    @property
    def is_linear(self) -> bool:
        return all(p.is_linear for p in self.polys)

    @property
    def is_homogeneous(self) -> bool:
        return all(p.is_homogeneous for p in self.polys)

    @property
    def is_separable(self) -> bool:
        return all(p.is_separable for p in self.polys)

    def diagonal_degree(self) -> int | None:
        degs = {p.diagonal_degree() for p in self.polys}
        if len(degs) != 1 or None in degs:
            return None
        return degs.pop()

    @property
    def is_diagonal_power(self) -> bool:
        return self.diagonal_degree() is not None

    def linear_part(self) -> PolySystem:
        """For a diagonal system ``sum c_ij x_j**t``, the system ``sum c_ij y_j``."""
        t = self.diagonal_degree()
        if t is None:
            raise InputError("system is not diagonal")
        return PolySystem(
            Poly(self.s, [(c, tuple(v // t for v in e)) for c, e in p.terms]) for p in self.polys
        )

    def evaluate(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(eval_poly(p, x) for p in self.polys)

    def is_solution(self, x: Sequence[int]) -> bool:
        return all(eval_poly(p, x) == 0 for p in self.polys)

    def to_text(self) -> str:
        return f"vars {self.s}\n" + "".join(p.to_line() + "\n" for p in self.polys)

    @classmethod
    def from_text(cls, text: str) -> PolySystem:
        s = None
        polys = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = _strip_comment(raw)
            if not line:
                continue
            if s is None:
                parts = line.split()
                if len(parts) != 2 or parts[0] != "vars":
                    raise InputError("expected header 'vars s'", line=lineno)
                s = _parse_int(parts[1], lineno)
                if s < 1:
                    raise InputError("need at least one variable", line=lineno)
                continue
            head, sep, body = line.partition(":")
            if not sep:
                raise InputError(f"expected 'poly:' or 'linear:', got {line!r}", line=lineno)
            head = head.strip()
            try:
                if head == "linear":
                    nums = [_parse_int(tok, lineno) for tok in body.split()]
                    if len(nums) != s + 1:
                        raise InputError(f"linear row needs {s + 1} integers, got {len(nums)}", line=lineno)
                    polys.append(Poly.linear(nums[:s], nums[s]))
                elif head == "poly":
                    terms = []
                    for chunk in body.split(";"):
                        nums = [_parse_int(tok, lineno) for tok in chunk.split()]
                        if not nums:
                            continue
                        if len(nums) != s + 1:
                            raise InputError(f"term needs coefficient and {s} exponents", line=lineno)
                        terms.append((nums[0], nums[1:]))
                    polys.append(Poly(s, terms))
                else:
                    raise InputError(f"unknown row type {head!r}", line=lineno)
            except InputError as exc:
                if exc.line is None:
                    raise InputError(str(exc), line=lineno) from None
                raise
        if s is None:
            raise InputError("missing 'vars s' header")
        if not polys:
            raise InputError("system file contains no polynomials")
        return cls(polys, num_vars=s)

    def to_json(self) -> str:
        return json.dumps(
            {"vars": self.s, "polys": [[[str(c), list(e)] for c, e in p.terms] for p in self.polys]}
        )

    @classmethod
    def from_json(cls, text: str) -> PolySystem:
        d = json.loads(text)
        return cls((Poly(d["vars"], [(int(c), e) for c, e in terms]) for terms in d["polys"]), d["vars"])


# ---------------------------------------------------------------------------
# Enumeration


def separable_tables(P: PolySystem, points: Sequence[int]):
    """Kernel tables for a separable system, or None if some term mixes variables."""
    if not P.is_separable:
        return None
    s = P.s
    tables = []
    consts = []
    for p in P.polys:
        rows = [[0] * len(points) for _ in range(s)]
        const = 0
        for c, e in p.terms:
            nz = [j for j, v in enumerate(e) if v]
            if not nz:
                const += c
                continue
            j = nz[0]
            ej = e[j]
            row = rows[j]
            for x, a in enumerate(points):
                row[x] += c * a**ej
        tables.append(rows)
        consts.append(const)
    return tables, consts


def _scan_general(P: PolySystem, points: Sequence[int], want_residuals: bool):
    solutions = []
    residuals = [] if want_residuals else None
    n = len(points)
    for idx in product(range(n), repeat=P.s):
        x = [points[i] for i in idx]
        vals = [eval_poly(p, x) for p in P.polys]
        if not any(vals):
            solutions.append(idx)
        elif want_residuals:
            residuals.append(sum(abs(v) for v in vals))
    return solutions, residuals


def scan(P: PolySystem, points: Sequence[int], want_residuals=False, budget=DEFAULT_BUDGET):
    """Enumerate ``points**s`` in lexicographic index order.

    ``points`` need not be sorted or distinct; returned tuples index into it.
    Returns ``(solutions, residuals)`` as in :func:`freiman.kernels.scan_separable`.
    """
    n = len(points)
    check_budget("enumeration of A^s", n**P.s, budget)
    tabs = separable_tables(P, points)
    if tabs is None:
        return _scan_general(P, points, want_residuals)
    tables, consts = tabs
    return kernels.scan_separable(tables, consts, n, P.s, want_residuals)


@dataclass(frozen=True)
class SolutionSet:
    """Solutions of ``P`` in ``ground**arity`` as sorted index tuples."""

    ground: IntSet
    arity: int
    tuples: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.labels())

    def labels(self) -> tuple[tuple[int, ...], ...]:
        el = self.ground.elements
        return tuple(tuple(el[i] for i in t) for t in self.tuples)

    def __contains__(self, x) -> bool:
        try:
            idx = tuple(self.ground.index(a) for a in x)
        except KeyError:
            return False
        return idx in self._lookup

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.tuples)

    def to_json(self) -> str:
        return json.dumps(
            {
                "ground": [str(a) for a in self.ground],
                "arity": self.arity,
                "tuples": [list(t) for t in self.tuples],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> SolutionSet:
        d = json.loads(text)
        return cls(IntSet(int(a) for a in d["ground"]), d["arity"], tuple(tuple(t) for t in d["tuples"]))


def solution_set(A: IntSet, P: PolySystem, budget=DEFAULT_BUDGET) -> SolutionSet:
    """All s-tuples from ``A`` at which every polynomial of ``P`` vanishes."""
    if not A.card:
        raise InputError("solution set over an empty set")
    sols, _ = scan(P, A.elements, budget=budget)
    return SolutionSet(A, P.s, tuple(sols))


@dataclass(frozen=True)
class SolutionHypergraph:
    """Vertices are the set elements; hyperedges are the solving s-tuples."""

    vertices: IntSet
    edges: SolutionSet = field(repr=False)

    @property
    def arity(self) -> int:
        return self.edges.arity

    def edge_labels(self) -> frozenset:
        return frozenset(self.edges.labels())

    def to_json(self) -> str:
        return json.dumps({"vertices": json.loads(self.vertices.to_json()), "edges": json.loads(self.edges.to_json())})

    @classmethod
    def from_json(cls, text: str) -> SolutionHypergraph:
        d = json.loads(text)
        return cls(IntSet.from_json(json.dumps(d["vertices"])), SolutionSet.from_json(json.dumps(d["edges"])))


def build_hypergraph(A: IntSet, P: PolySystem, budget=DEFAULT_BUDGET) -> SolutionHypergraph:
    return SolutionHypergraph(A, solution_set(A, P, budget=budget))
