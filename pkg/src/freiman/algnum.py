"""Algebraic numbers as (defining polynomial, root index) pairs.

Everything needed for diagonal systems sum_j c_ij x_j^t goes through integer
t-th powers: an algebraic number carrying the datum c^t = v lets P_i be
evaluated exactly as sum_j c_ij v_j, so no number field arithmetic is done.
Floating point (mpmath) only orders roots and picks the intended one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import sympy

from freiman.condense import condense_iterate
from freiman.core import DEFAULT_BUDGET, IntSet, PolySystem, check_budget, scan
from freiman.errors import InputError, InternalVerificationError, PreconditionError
from freiman.verify import MapTable, Verdict

ROOT_DPS = 60
MAX_FACTOR_DEGREE = 8

_X = sympy.Symbol("x")


class SignCollision(PreconditionError):
    """a -> a^t is not injective on the input set."""


def _primitive(coeffs) -> tuple[int, ...]:
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if not coeffs:
        raise InputError("zero polynomial")
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    if coeffs[0] < 0:
        g = -g
    return tuple(c // g for c in coeffs)


def _sorted_roots(coeffs, dps=ROOT_DPS):
    """Roots ordered by real part, then imaginary part.

    Keys are rounded well below the working precision so that exact ties
    (conjugate pairs) are not broken by noise.
    """
    if len(coeffs) == 2:
        return [mpmath.mpc(mpmath.mpf(-coeffs[1]) / coeffs[0])]
    with mpmath.workdps(dps):
        roots = mpmath.polyroots(list(coeffs), maxsteps=200, extraprec=4 * dps)
        tol = mpmath.mpf(10) ** (-(dps // 2))

        def key(z):
            z = mpmath.mpc(z)
            return (mpmath.nint(z.real / tol), mpmath.nint(z.imag / tol))

        return sorted((mpmath.mpc(z) for z in roots), key=key)


@dataclass(frozen=True)
class AlgNum:
    """A root of an integer polynomial with content 1 and positive leading coefficient.

    ``coeffs`` are in descending degree order. ``power`` optionally records
    ``(t, v)`` with this number's t-th power equal to the integer v.
    """

    coeffs: tuple[int, ...]
    root_index: int = 0
    minimal: bool = False
    power: tuple[int, int] | None = None

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        if len(c) < 2 or c[0] == 0:
            raise InputError("defining polynomial must have degree >= 1")
        if _primitive(c) != c:
            raise InputError(f"defining polynomial {c} must have content 1 and positive leading coefficient")
        if not 0 <= self.root_index < len(c) - 1:
            raise InputError(f"root index {self.root_index} out of range for degree {len(c) - 1}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_int(cls, a: int, t: int | None = None) -> AlgNum:
        return cls((1, -int(a)), 0, True, None if t is None else (t, int(a) ** t))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def norm1(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    @property
    def norm2_sq(self) -> int:
        return sum(c * c for c in self.coeffs)

    def value(self, dps=ROOT_DPS):
        return _sorted_roots(self.coeffs, dps)[self.root_index]

    def to_text(self) -> str:
        line = f"poly: {' '.join(map(str, self.coeffs))} ; root: {self.root_index} ; minimal: {'yes' if self.minimal else 'no'}"
        if self.power is not None:
            line += f" ; power: {self.power[0]} {self.power[1]}"
        return line

    @classmethod
    def from_text(cls, line: str, lineno: int | None = None) -> AlgNum:
        fields = {}
        for part in line.split(";"):
            key, sep, val = part.partition(":")
            if not sep:
                raise InputError(f"expected 'name: value' in {part.strip()!r}", line=lineno)
            fields[key.strip()] = val.strip()
        try:
            coeffs = tuple(int(c) for c in fields["poly"].split())
            root = int(fields.get("root", "0"))
            flag = fields.get("minimal", "no")
            if flag not in ("yes", "no"):
                raise InputError(f"minimal must be yes or no, got {flag!r}", line=lineno)
            power = None
            if "power" in fields:
                t, v = (int(x) for x in fields["power"].split())
                power = (t, v)
        except KeyError:
            raise InputError("missing 'poly:' field", line=lineno) from None
        except ValueError:
            raise InputError(f"bad integer in {line!r}", line=lineno) from None
        try:
            return cls(coeffs, root, flag == "yes", power)
        except InputError as exc:
            raise InputError(str(exc), line=lineno) from None


@dataclass(frozen=True)
class AlgSet:
    elements: tuple[AlgNum, ...]

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        if not els:
            raise InputError("empty algebraic set")
        if len({(e.coeffs, e.root_index) for e in els}) != len(els):
            raise InputError("repeated element")
        if not all(e.minimal for e in els):
            # different defining polynomials may name the same number
            vals = [e.value(30) for e in els]
            tol = mpmath.mpf(10) ** -20
            for i in range(len(vals)):
                for j in range(i):
                    if abs(vals[i] - vals[j]) < tol:
                        raise InputError(f"elements {i} and {j} cannot be told apart")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @classmethod
    def from_ints(cls, A, t: int | None = None) -> AlgSet:
        return cls(tuple(AlgNum.from_int(a, t) for a in A))

    @property
    def degree_bound(self) -> int:
        """Product of the defining degrees; bounds the degree of the field they generate."""
        return math.prod(e.degree for e in self.elements)

    def to_text(self) -> str:
        return "".join(e.to_text() + "\n" for e in self.elements)

    @classmethod
    def from_text(cls, text: str) -> AlgSet:
        out = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                out.append(AlgNum.from_text(line, lineno))
        return cls(tuple(out))


def env_algebraic(C: AlgSet) -> tuple[int, bool]:
    """(max l1-norm of the defining polynomials, whether that is exactly Env)."""
    return max(e.norm1 for e in C), all(e.minimal for e in C)


def _target_root(b: int, t: int):
    """Real t-th root when it exists, otherwise |b|^(1/t) * exp(i*pi/t)."""
    with mpmath.workdps(ROOT_DPS):
        mag = mpmath.root(mpmath.mpf(abs(b)), t)
        if b >= 0:
            return mpmath.mpc(mag)
        if t % 2:
            return mpmath.mpc(-mag)
        return mag * mpmath.expjpi(mpmath.mpf(1) / t)


def _nearest_index(roots, z) -> int:
    d = [abs(r - z) for r in roots]
    i = min(range(len(d)), key=d.__getitem__)
    rest = sorted(d)
    if len(rest) > 1 and not rest[1] > 1000 * rest[0]:
        raise InternalVerificationError("could not isolate the intended root")
    return i


def certify_minimal_tth_root(b: int, t: int, max_degree=MAX_FACTOR_DEGREE) -> AlgNum:
    """b^(1/t) with its minimal polynomial, a divisor of x^t - b over Z.

    The root is the real one for b >= 0 or odd t, else the principal complex
    root. When ``t > max_degree`` the polynomial x^t - b is returned
    unfactored and flagged as not certified minimal.
    """
    b, t = int(b), int(t)
    if t < 1:
        raise InputError("t must be positive")
    whole = (1,) + (0,) * (t - 1) + (-b,)
    z = _target_root(b, t)
    if t > max_degree:
        return AlgNum(_primitive(whole), _nearest_index(_sorted_roots(whole), z), False, (t, b))
    _, factors = sympy.factor_list(sympy.Poly(sympy.Integer(1) * _X**t - b, _X))
    best = None
    with mpmath.workdps(ROOT_DPS):
        for f, _mult in factors:
            coeffs = _primitive(f.all_coeffs())
            val = abs(mpmath.polyval([mpmath.mpf(c) for c in coeffs], z))
            if best is None or val < best[0]:
                best = (val, coeffs)
    coeffs = best[1]
    _, rem = sympy.div(sympy.Poly(list(whole), _X), sympy.Poly(list(coeffs), _X))
    if not rem.is_zero:
        raise InternalVerificationError(f"{coeffs} does not divide x^{t} - {b}")
    if best[0] > mpmath.mpf(10) ** (-(ROOT_DPS // 2)) * max(1, abs(b)):
        raise InternalVerificationError("no factor vanishes at the intended root")
    return AlgNum(coeffs, _nearest_index(_sorted_roots(coeffs), z), True, (t, b))


def _lucas_fib(n: int) -> tuple[int, int]:
    L0, L1, F0, F1 = 2, 1, 0, 1
    for _ in range(n):
        L0, L1 = L1, L0 + L1
        F0, F1 = F1, F0 + F1
    return L0, F0


def granville_ok(divisor: AlgNum, b: int, t: int) -> bool:
    """Exact test of ||divisor||_2 <= phi^t ||x^t - b||_2 with phi the golden ratio.

    Squares both sides and writes phi^(2t) = (L_2t + F_2t sqrt 5)/2 with Lucas
    and Fibonacci numbers, so the comparison is in integers.
    """
    R = divisor.norm2_sq
    Q = 1 + b * b
    L, F = _lucas_fib(2 * t)
    lhs = 2 * R - L * Q  # need lhs <= F * Q * sqrt(5)
    if lhs <= 0:
        return True
    return lhs * lhs <= 5 * F * F * Q * Q


def _powers(images, t):
    out = []
    for c in images:
        if c.power is None or c.power[0] != t:
            raise InputError(f"image {c.to_text()} lacks an integer {t}-th power datum")
        out.append(c.power[1])
    return out


def is_algebraic_freiman_iso_diagonal(psi: dict, A: IntSet, P: PolySystem, budget=DEFAULT_BUDGET) -> Verdict:
    """Exhaustive check through P_i(c) = sum_j c_ij (c_j)^t on integer t-th powers."""
    t = P.diagonal_degree()
    if t is None:
        raise InputError("system is not diagonal of a common degree")
    if set(psi) != set(A.elements):
        raise InputError("map does not match its domain")
    images = [psi[a] for a in A.elements]
    AlgSet(tuple(images))  # distinctness
    L = P.linear_part()
    check_budget("algebraic Freiman check over A^s", A.card**P.s, budget)
    src = set(scan(L, [a**t for a in A.elements], budget=budget)[0])
    dst = set(scan(L, _powers(images, t), budget=budget)[0])
    total = A.card**P.s
    if src == dst:
        return Verdict(True, total)
    first = min(src ^ dst)
    el = A.elements
    return Verdict(False, total, tuple(el[i] for i in first), "lost" if first in src else "spurious")


@dataclass(frozen=True)
class DiagonalCertificate:
    t: int
    k: int
    verdict: Verdict
    env: int
    env_exact: bool
    env_bound: int  # t * 2^(t+1) * (k+1)^A
    degree_bound: int  # product of degrees
    degree_limit: int  # t^A
    solutions: tuple[int, int]  # |S| before and after
    linear_env: tuple[int, int]  # env of A_t and of B_t

    @property
    def ok(self) -> bool:
        return (
            bool(self.verdict)
            and self.env <= self.env_bound
            and self.degree_bound <= self.degree_limit
            and self.solutions[0] == self.solutions[1]
        )


@dataclass(frozen=True)
class DiagonalCondensation:
    B: AlgSet
    psi: dict = field(repr=False)
    linear_map: MapTable = field(repr=False)
    certificate: DiagonalCertificate
    stop_reason: str


def condense_diagonal(A: IntSet, P: PolySystem, mode="greedy", budget=DEFAULT_BUDGET, max_steps=64) -> DiagonalCondensation:
    """Condense through the t-th powers and lift back with t-th roots."""
    t = P.diagonal_degree()
    if t is None:
        raise PreconditionError("system is not diagonal of a common degree")
    At = IntSet(a**t for a in A.elements)
    if At.card != A.card:
        seen = {}
        for a in A.elements:
            if a**t in seen:
                raise SignCollision(f"{seen[a ** t]} and {a} have the same {t}-th power")
            seen[a**t] = a
    L = P.linear_part()
    trace = condense_iterate(At, L, mode=mode, max_steps=max_steps, budget=budget)
    lin = trace.composed_map
    psi = {a: certify_minimal_tth_root(lin[a**t], t) for a in A.elements}
    B = AlgSet(tuple(psi[a] for a in A.elements))
    verdict = is_algebraic_freiman_iso_diagonal(psi, A, P, budget)
    if not verdict:
        raise InternalVerificationError(f"lifted map fails: {verdict.describe()}")
    env, exact = env_algebraic(B)
    k = P.Lam
    n = A.card
    before = len(scan(L, At.elements, budget=budget)[0])
    after = len(scan(L, trace.final.elements, budget=budget)[0])
    cert = DiagonalCertificate(
        t=t,
        k=k,
        verdict=verdict,
        env=env,
        env_exact=exact,
        env_bound=t * 2 ** (t + 1) * (k + 1) ** n,
        degree_bound=B.degree_bound,
        degree_limit=t**n,
        solutions=(before, after),
        linear_env=(At.env, trace.final.env),
    )
    return DiagonalCondensation(B, psi, lin, cert, trace.stop_reason)
