"""Constructive condensation of integer sets for linear systems.

A condensation step reduces every element modulo a well-chosen ``h`` and
takes the numerically least residue. With ``X = env(A) - 1`` the modulus must
satisfy, for the height ``Lam`` of the system:

(i)   distinct elements stay distinct mod h;
(ii)  every non-solution s-tuple has some P_i not divisible by h;
(iii) every element is close to a multiple of h: ||a/h|| < 1/Lam.

Then solutions survive because each |P_i(psi(a))| < h while P_i(psi(a)) = 0 mod h.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import gcd

from freiman.core import (
    DEFAULT_BUDGET,
    IntSet,
    PolySystem,
    SolutionHypergraph,
    SolutionSet,
    build_hypergraph,
    check_budget,
    eval_poly,
    product_tree,
    scan,
)
from freiman.errors import (
    BudgetExceeded,
    InputError,
    InternalVerificationError,
    PreconditionError,
)
from freiman.ntheory import dist_to_int_le, dist_to_int_lt, is_prime, lcm_upto, nlr
from freiman.verify import HYPERGRAPH_CAP, MapTable, hypergraph_isomorphic, is_freiman_iso

MODES = ("thm31", "thm32", "greedy")

# cap on (Lam+1)^A, which bounds the rho scan and the lcm
BOX_BUDGET = 10**4
PRIME_SEARCH_BUDGET = 10**6


def compute_upsilon(A: IntSet, P: PolySystem, budget=DEFAULT_BUDGET, form="sum") -> int:
    """The integer a prime must avoid for reduction modulo it to be faithful.

    ``form="sum"``: product over ordered pairs of distinct elements of
    ``|a1 - a2|``, times the product over non-solution s-tuples of
    ``sum_i |P_i(a)|``.

    ``form="product"``: the same pair product, times the product over ``i`` and
    over tuples with ``P_i(a) != 0`` of ``|P_i(a)|`` (the variant needed for
    non-linear homogeneous systems).
    """
    el = A.elements
    pair = product_tree([el[j] - el[i] for i in range(len(el)) for j in range(i + 1, len(el))])
    pair *= pair
    if form == "sum":
        _, residuals = scan(P, el, want_residuals=True, budget=budget)
        return pair * product_tree(residuals)
    if form == "product":
        total = pair
        for p in P.polys:
            _, residuals = scan(PolySystem([p], P.s), el, want_residuals=True, budget=budget)
            total *= product_tree(residuals)
        return total
    raise InputError(f"unknown upsilon form {form!r}")


def find_prime_avoiding(U: int, lower: int, window_doubling=False, max_candidates=PRIME_SEARCH_BUDGET) -> int:
    """Least prime ``p > lower`` with ``p`` not dividing ``U``.

    With ``window_doubling`` the candidates are scanned window by window,
    ``(Y, 2Y]`` with ``Y = lower`` doubling; the answer is the same least prime,
    only the budget is counted in windows (``max_candidates`` of them) instead
    of in primes tried.
    """
    if U < 1:
        raise InputError("U must be a positive integer")
    p = max(lower + 1, 2)
    tried = 0
    window_top = 2 * max(lower, 1)
    windows = 1
    while True:
        if window_doubling and p > window_top:
            window_top *= 2
            windows += 1
            if windows > max_candidates:
                raise BudgetExceeded("prime search windows", windows, max_candidates)
        if is_prime(p):
            if U % p:
                return p
            tried += 1
            if not window_doubling and tried >= max_candidates:
                raise BudgetExceeded("prime search candidates", tried, max_candidates)
        p += 1


def box_principle_rho(A: IntSet, modulus_product: int, Lam: int, rho_cap: int) -> int | None:
    """Least ``rho`` in ``[1, rho_cap]`` with ``||rho*a/modulus_product|| <= 1/(Lam+1)`` for all a."""
    for rho in range(1, rho_cap + 1):
        if all(dist_to_int_le(rho * a, modulus_product, 1, Lam + 1) for a in A):
            return rho
    return None


def _nonsolution_vanishing_mod(P: PolySystem, A: IntSet, images: list[int], h: int, sols: set):
    """First non-solution index tuple whose image has every P_i = 0 mod h, or None."""
    for idx in product(range(A.card), repeat=P.s):
        if idx in sols:
            continue
        x = [images[i] for i in idx]
        if all(eval_poly(p, x) % h == 0 for p in P.polys):
            return idx
    return None


def check_properties(A: IntSet, P: PolySystem, h: int, rho: int, budget=DEFAULT_BUDGET) -> dict:
    """Exhaustively recheck properties (i)-(iii) for the map a -> [rho*a mod h].

    ``iii`` is the form ``||rho*a/h|| < 1/Lam``; ``iii_box`` is the stronger
    ``<= 1/(Lam+1)`` delivered by the box principle. ``size`` records
    ``|P_i(psi(a))| < h`` on every solution tuple.
    """
    Lam = P.Lam
    check_budget("property check over A^s", A.card**P.s, budget)
    images = [nlr(rho * a, h) for a in A]
    sols_idx, _ = scan(P, A.elements, budget=budget)
    sols = set(sols_idx)
    out = {
        "i": len({rho * a % h for a in A}) == A.card,
        "ii": _nonsolution_vanishing_mod(P, A, images, h, sols) is None,
        "iii_box": all(dist_to_int_le(rho * a, h, 1, Lam + 1) for a in A),
        "iii": all(dist_to_int_lt(rho * a, h, 1, Lam) for a in A),
    }
    out["size"] = all(
        abs(eval_poly(p, [images[i] for i in idx])) < h for idx in sols_idx for p in P.polys
    )
    return out


@dataclass(frozen=True)
class CondenseStep:
    mode: str
    pi: int | None
    rho: int
    L: int
    h: int
    map: MapTable = field(repr=False)
    env_before: int
    env_after: int
    Lam: int
    prime_lower: int | None = None
    properties: dict = field(default_factory=dict, repr=False)

    @property
    def image(self) -> IntSet:
        return self.map.image()

    def describe(self) -> str:
        return (
            f"mode={self.mode} pi={self.pi} rho={self.rho} L={self.L} h={self.h} "
            f"env_before={self.env_before} env_after={self.env_after}"
        )


@dataclass(frozen=True)
class CondenseTrace:
    initial: IntSet
    final: IntSet
    steps: tuple[CondenseStep, ...]
    composed_map: MapTable = field(repr=False)
    stop_reason: str
    detail: str = ""


def _require_linear(P: PolySystem, mode: str):
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}; expected one of {MODES}")
    if not P.is_linear:
        raise PreconditionError("condensation here needs a linear system")
    if mode in ("thm32", "greedy") and not P.is_homogeneous:
        raise PreconditionError(f"mode {mode} needs a homogeneous linear system (no constant terms)")


def _finish_step(A, P, mode, pi, rho, L, h, lower, budget):
    # thm31 reduces a itself modulo h = pi*L/rho; the other modes reduce rho*a
    mult = 1 if mode == "thm31" else rho
    table = MapTable.single({a: nlr(mult * a, h) for a in A})
    props = check_properties(A, P, h, mult, budget=budget)
    failed = [k for k in ("i", "ii", "iii", "iii_box", "size") if not props[k]]
    if failed:
        raise InternalVerificationError(f"{mode} step with h={h}, rho={rho} violates properties {failed}")
    verdict = is_freiman_iso(table, A, P, budget=budget)
    if not verdict:
        raise InternalVerificationError(f"{mode} step map is not a Freiman isomorphism: {verdict.describe()}")
    return CondenseStep(
        mode=mode,
        pi=pi,
        rho=rho,
        L=L,
        h=h,
        map=table,
        env_before=A.env,
        env_after=table.image().env,
        Lam=P.Lam,
        prime_lower=lower,
        properties=props,
    )


def condense_step(
    A: IntSet,
    P: PolySystem,
    mode="thm32",
    budget=DEFAULT_BUDGET,
    box_budget=BOX_BUDGET,
    h_cap=None,
) -> CondenseStep | None:
    """One condensation step; None when the resulting env does not strictly drop.

    ``thm31``: prime pi > Lam avoiding Upsilon, L = lcm[1..(Lam+1)^A], rho from
    the box principle against pi*L, h = pi*L/rho, map a -> [a mod h].

    ``thm32`` (homogeneous): prime pi > (Lam+1)^A avoiding Upsilon, rho from the
    box principle against pi, h = pi, map a -> [rho*a mod pi].

    ``greedy`` (homogeneous): the smallest (h, rho) found by
    :func:`greedy_min_modulus`.
    """
    _require_linear(P, mode)
    if not A.card:
        raise InputError("cannot condense an empty set")
    Lam = P.Lam
    if mode == "greedy":
        cap = h_cap if h_cap is not None else max(2, 2 * (A.env - 1))
        step = greedy_min_modulus(A, P, cap, budget=budget)
    else:
        T = (Lam + 1) ** A.card
        check_budget("(Lam+1)^A", T, box_budget)
        U = compute_upsilon(A, P, budget=budget)
        if mode == "thm32":
            pi = find_prime_avoiding(U, T)
            rho = box_principle_rho(A, pi, Lam, T)
            if rho is None:
                raise InternalVerificationError(f"no rho <= {T} for pi={pi}")
            step = _finish_step(A, P, mode, pi, rho, 1, pi, T, budget)
        else:
            pi = find_prime_avoiding(U, Lam)
            L = lcm_upto(T)
            rho = box_principle_rho(A, pi * L, Lam, T)
            if rho is None or L % rho:
                raise InternalVerificationError(f"box principle failed for pi*L with pi={pi}")
            h = pi * L // rho
            if h <= Lam:
                raise InternalVerificationError(f"modulus h={h} not above Lam={Lam}")
            step = _finish_step(A, P, mode, pi, rho, L, h, Lam, budget)
    if step is None or step.env_after >= step.env_before:
        return None
    return step


def greedy_min_modulus(A: IntSet, P: PolySystem, h_cap: int, budget=DEFAULT_BUDGET) -> CondenseStep | None:
    """Smallest h, then smallest rho, making a -> [rho*a mod h] a valid step.

    Scans h = 2, 3, ... h_cap and rho coprime to h (a non-coprime rho reduces to
    a smaller modulus already tried). Properties (i)-(iii) use the weaker
    ``||rho*a/h|| < 1/Lam`` and the map must pass the exhaustive isomorphism
    check. The env of the image is not required to drop.
    """
    _require_linear(P, "greedy")
    Lam = P.Lam
    n = A.card
    check_budget("greedy scan over A^s", n**P.s, budget)
    sols = set(scan(P, A.elements, budget=budget)[0])
    el = A.elements
    for h in range(2, h_cap + 1):
        for rho in range(1, h):
            if gcd(rho, h) != 1:
                continue
            if not all(dist_to_int_lt(rho * a, h, 1, Lam) for a in el):
                continue
            if len({rho * a % h for a in el}) != n:
                continue
            images = [nlr(rho * a, h) for a in el]
            if _nonsolution_vanishing_mod(P, A, images, h, sols) is not None:
                continue
            table = MapTable.single(dict(zip(el, images)))
            if not is_freiman_iso(table, A, P, budget=budget):
                continue
            props = check_properties(A, P, h, rho, budget=budget)
            return CondenseStep(
                mode="greedy",
                pi=None,
                rho=rho,
                L=1,
                h=h,
                map=table,
                env_before=A.env,
                env_after=table.image().env,
                Lam=Lam,
                properties=props,
            )
    return None


def env_floor(card: int) -> int:
    """Smallest env any set of ``card`` distinct integers can have."""
    return (card + 2) // 2


def condense_iterate(
    A: IntSet,
    P: PolySystem,
    mode="thm32",
    max_steps=64,
    budget=DEFAULT_BUDGET,
    box_budget=BOX_BUDGET,
    target_env=None,
) -> CondenseTrace:
    """Apply :func:`condense_step` until it stops improving.

    Stops with ``target_reached`` once env is at most ``target_env`` (default:
    the floor ``ceil((A+1)/2)``), ``no_strict_decrease`` when a step cannot
    shrink env, ``budget`` on a budget error or after ``max_steps`` steps. The
    composed map is re-verified against the original set.
    """
    _require_linear(P, mode)
    target = env_floor(A.card) if target_env is None else target_env
    cur = A
    composed = MapTable.identity(A)
    steps = []
    reason, detail = "budget", f"max_steps={max_steps}"
    for _ in range(max_steps):
        if cur.env <= target:
            reason, detail = "target_reached", f"env {cur.env} <= {target}"
            break
        try:
            step = condense_step(cur, P, mode, budget=budget, box_budget=box_budget)
        except BudgetExceeded as exc:
            reason, detail = "budget", str(exc)
            break
        if step is None:
            reason, detail = "no_strict_decrease", ""
            break
        if steps and step.env_after >= steps[-1].env_after:
            raise InternalVerificationError("env failed to decrease along the trace")
        steps.append(step)
        composed = composed.then(step.map)
        cur = step.image
    else:
        if cur.env <= target:
            reason, detail = "target_reached", f"env {cur.env} <= {target}"
    if steps:
        verdict = is_freiman_iso(composed, A, P, budget=budget)
        if not verdict:
            raise InternalVerificationError(f"composed map fails: {verdict.describe()}")
    return CondenseTrace(A, cur, tuple(steps), composed, reason, detail)


@dataclass(frozen=True)
class MinModel:
    env: int
    witness: IntSet
    bijection: dict


def exact_min_model(A: IntSet, P: PolySystem, env_cap: int, budget=DEFAULT_BUDGET) -> MinModel:
    """Exhaustive search for a set of least env with isomorphic solution hypergraph.

    For R = 1, 2, ..., env_cap the card(A)-subsets of [-(R-1), R-1] are tried in
    lexicographic order; subsets of smaller env were already covered at an
    earlier R, so only those touching +-(R-1) are examined. The first match is
    returned with the lexicographically least witnessing bijection.
    """
    n = A.card
    if n > HYPERGRAPH_CAP:
        raise BudgetExceeded("exact_min_model set size", n, HYPERGRAPH_CAP)
    G = build_hypergraph(A, P, budget=budget)
    target_edges = len(G.edges)
    for R in range(1, env_cap + 1):
        window = range(-(R - 1), R)
        if len(window) < n:
            continue
        for subset in combinations(window, n):
            if -(R - 1) not in subset and (R - 1) not in subset:
                continue
            C = IntSet(subset)
            sols, _ = scan(P, C.elements, budget=budget)
            if len(sols) != target_edges:
                continue
            H = SolutionHypergraph(C, SolutionSet(C, P.s, tuple(sols)))
            f = hypergraph_isomorphic(G, H)
            if f is not None:
                return MinModel(R, C, f)
    raise BudgetExceeded("exact_min_model env cap (no witness found)", f">{env_cap}", env_cap)
