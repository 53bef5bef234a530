"""Exhaustive checks for Freiman P-isomorphisms and hypergraph isomorphisms."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from freiman.core import DEFAULT_BUDGET, IntSet, PolySystem, SolutionHypergraph, check_budget, scan
from freiman.errors import BudgetExceeded, InputError

HYPERGRAPH_CAP = 8


@dataclass(frozen=True, init=False)
class MapTable:
    """An explicit finite injection.

    ``kind`` is ``"single"`` (integer keys) or ``"t_fold"`` (t-tuple keys).
    Entries are kept sorted by key.
    """

    kind: str
    t: int
    entries: tuple

    def __init__(self, entries: Mapping, kind: str = "single", t: int = 1):
        if kind not in ("single", "t_fold"):
            raise InputError(f"unknown map kind {kind!r}")
        if kind == "single":
            t = 1
            items = sorted((int(k), int(v)) for k, v in entries.items())
        else:
            items = sorted((tuple(int(c) for c in k), int(v)) for k, v in entries.items())
            for k, _ in items:
                if len(k) != t:
                    raise InputError(f"key {k} is not a {t}-tuple")
        vals = [v for _, v in items]
        if len(set(vals)) != len(vals):
            seen = {}
            for k, v in items:
                if v in seen:
                    raise InputError(f"map is not injective: {seen[v]} and {k} both map to {v}")
                seen[v] = k
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "entries", tuple(items))
        object.__setattr__(self, "_dict", dict(items))

    @classmethod
    def single(cls, entries: Mapping) -> MapTable:
        return cls(entries, "single", 1)

    @classmethod
    def t_fold(cls, entries: Mapping, t: int) -> MapTable:
        return cls(entries, "t_fold", t)

    @classmethod
    def identity(cls, A: IntSet) -> MapTable:
        return cls.single({a: a for a in A})

    def __getitem__(self, key):
        return self._dict[key]

    def __len__(self) -> int:
        return len(self.entries)

    def as_dict(self) -> dict:
        return dict(self._dict)

    def domain(self) -> list:
        return [k for k, _ in self.entries]

    def image(self) -> IntSet:
        return IntSet(v for _, v in self.entries)

    def then(self, other: MapTable) -> MapTable:
        """Composition ``other o self``."""
        if other.kind != "single":
            raise InputError("can only post-compose with a single map")
        try:
            return MapTable({k: other[v] for k, v in self.entries}, self.kind, self.t)
        except KeyError as exc:
            raise InputError(f"composition undefined at image value {exc.args[0]}") from None

    def to_text(self) -> str:
        lines = []
        for k, v in self.entries:
            key = ",".join(map(str, k)) if self.kind == "t_fold" else str(k)
            lines.append(f"{key} -> {v}\n")
        return "".join(lines)

    @classmethod
    def from_text(cls, text: str) -> MapTable:
        entries = {}
        tuple_keys = None
        t = 1
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("->")
            if not sep:
                raise InputError(f"expected 'key -> value', got {line!r}", line=lineno)
            key = key.strip()
            is_tuple = "," in key
            if tuple_keys is None:
                tuple_keys = is_tuple
            elif tuple_keys != is_tuple:
                raise InputError("mixed integer and tuple keys", line=lineno)
            try:
                if is_tuple:
                    k = tuple(int(c) for c in key.split(","))
                    if entries and len(k) != t:
                        raise InputError(f"key length {len(k)} differs from {t}", line=lineno)
                    t = len(k)
                else:
                    k = int(key)
                v = int(val.strip())
            except ValueError:
                raise InputError(f"bad integer in {line!r}", line=lineno) from None
            if k in entries:
                raise InputError(f"duplicate key {key}", line=lineno)
            entries[k] = v
        if not entries:
            raise InputError("map file contains no entries")
        if tuple_keys:
            return cls.t_fold(entries, t)
        return cls.single(entries)


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exhaustive isomorphism check.

    On failure ``counterexample`` is the lexicographically first violating
    tuple (labels from the domain) and ``direction`` is ``"lost"`` when a
    solution stops being one under the map, ``"spurious"`` when a non-solution
    becomes one.
    """

    ok: bool
    checked: int
    counterexample: tuple | None = None
    direction: str | None = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"yes ({self.checked} tuples checked)"
        return f"no: {self.direction} solution at {self.counterexample}"


def _compare(src: list, dst: list, label, checked: int) -> Verdict:
    a, b = set(src), set(dst)
    if a == b:
        return Verdict(True, checked)
    first = min(a ^ b)
    return Verdict(False, checked, label(first), "lost" if first in a else "spurious")


def _check_total(domain_keys, table: MapTable):
    keys = set(table.domain())
    want = set(domain_keys)
    if keys != want:
        missing = sorted(want - keys)
        extra = sorted(keys - want)
        msg = []
        if missing:
            msg.append(f"undefined on {missing[:5]}")
        if extra:
            msg.append(f"defined outside the domain at {extra[:5]}")
        raise InputError("map table does not match its domain: " + "; ".join(msg))


def is_freiman_iso(psi: MapTable, A: IntSet, P: PolySystem, budget=DEFAULT_BUDGET) -> Verdict:
    """Decide whether ``psi`` is a Freiman P-isomorphism on ``A``."""
    if psi.kind != "single":
        raise InputError("is_freiman_iso needs a single map; use is_tfold_freiman_iso")
    _check_total(A.elements, psi)
    n = A.card
    check_budget("Freiman check over A^s", n**P.s, budget)
    src, _ = scan(P, A.elements, budget=budget)
    dst, _ = scan(P, [psi[a] for a in A.elements], budget=budget)
    el = A.elements
    return _compare(src, dst, lambda idx: tuple(el[i] for i in idx), n**P.s)


def is_tfold_freiman_iso(omega: MapTable, D: IntSet, P: PolySystem, budget=DEFAULT_BUDGET) -> Verdict:
    """Decide whether ``omega: D^t -> E`` is a t-fold Freiman P-isomorphism.

    Checks every s-tuple of keys: the t rows it slices into all solve ``P`` over
    ``D`` exactly when the images solve ``P`` over ``E``. Costs card(D)^(t*s).
    """
    t = omega.t
    if omega.kind == "single":
        omega = MapTable.t_fold({(k,): v for k, v in omega.entries}, 1)
    keys = list(product(D.elements, repeat=t))
    _check_total(keys, omega)
    n = D.card
    s = P.s
    total = n ** (t * s)
    check_budget("t-fold check over (D^t)^s", total, budget)

    sols_D, _ = scan(P, D.elements, budget=budget)
    # key index of a t-tuple of D-indices, lexicographic = mixed radix n
    weights = [n ** (t - 1 - i) for i in range(t)]
    src = []
    for rows in product(sols_D, repeat=t):
        src.append(tuple(sum(rows[i][j] * weights[i] for i in range(t)) for j in range(s)))
    dst, _ = scan(P, [omega[k] for k in keys], budget=budget)
    return _compare(src, dst, lambda idx: tuple(keys[i] for i in idx), total)


def hypergraph_isomorphic(G1: SolutionHypergraph, G2: SolutionHypergraph, cap=HYPERGRAPH_CAP):
    """Lexicographically least vertex bijection carrying edges onto edges, or None.

    Plain backtracking over vertices in ascending order with targets tried in
    ascending order; candidate targets must share the per-position degree
    profile.
    """
    n = G1.vertices.card
    if n > cap or G2.vertices.card > cap:
        raise BudgetExceeded("hypergraph isomorphism vertex count", max(n, G2.vertices.card), cap)
    if n != G2.vertices.card or G1.arity != G2.arity or len(G1.edges) != len(G2.edges):
        return None
    s = G1.arity
    E1 = G1.edges.tuples
    E2 = G2.edges.tuples
    E2set = set(E2)

    def profiles(edges):
        prof = [[0] * s for _ in range(n)]
        for e in edges:
            for p, v in enumerate(e):
                prof[v][p] += 1
        return [tuple(p) for p in prof]

    prof1, prof2 = profiles(E1), profiles(E2)
    if sorted(prof1) != sorted(prof2):
        return None
    cands = [[w for w in range(n) if prof2[w] == prof1[v]] for v in range(n)]

    # G1 edges grouped by their largest vertex: checkable once that vertex is placed
    closing = [[] for _ in range(n)]
    for e in E1:
        closing[max(e)].append(e)
    closed_count = [0] * n
    running = 0
    for v in range(n):
        running += len(closing[v])
        closed_count[v] = running
    touching = [[] for _ in range(n)]
    for e in E2:
        for w in set(e):
            touching[w].append(e)

    image = [-1] * n
    used = [False] * n

    def place(v: int, inside: int) -> bool:
        if v == n:
            return True
        for w in cands[v]:
            if used[w]:
                continue
            image[v] = w
            used[w] = True
            ok = all(tuple(image[x] for x in e) in E2set for e in closing[v])
            if ok:
                gained = sum(1 for e in touching[w] if all(used[x] for x in e))
                ok = inside + gained == closed_count[v]
                if ok and place(v + 1, inside + gained):
                    return True
            used[w] = False
            image[v] = -1
        return False

    if not place(0, 0):
        return None
    v1, v2 = G1.vertices.elements, G2.vertices.elements
    return {v1[v]: v2[image[v]] for v in range(n)}
