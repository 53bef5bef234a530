"""Command-line front end.

Every report starts with the echoed configuration and ends with one
``RESULT key=value ...`` line. Exit codes: 0 success, 1 verified negative,
2 budget exhausted, 3 bad input, 4 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from fractions import Fraction
from pathlib import Path

from freiman import __version__
from freiman.core import DEFAULT_BUDGET, IntSet, PolySystem, scan
from freiman.errors import BudgetExceeded, FreimanError, InputError, PreconditionError
from freiman.verify import MapTable, is_freiman_iso, is_tfold_freiman_iso

EXIT_OK, EXIT_NEGATIVE, EXIT_BUDGET, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3, 4
SET_PRINT_LIMIT = 200


class Report:
    def __init__(self):
        self.lines = []

    def add(self, line=""):
        self.lines.append(line)

    def result(self, **fields):
        self.add("RESULT " + " ".join(f"{k}={v}" for k, v in fields.items()))

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _read(path: str, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _load(path, what, parse):
    try:
        return parse(_read(path, what))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _fmt_set(A: IntSet) -> str:
    if A.card > SET_PRINT_LIMIT:
        return f"<{A.card} elements, min {A.min}, max {A.max}>"
    return "{" + ", ".join(map(str, A.elements)) + "}"


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _header(rep: Report, args, inputs):
    rep.add(f"# freiman {__version__} {args.command}")
    for key in sorted(vars(args)):
        if key in ("func", "command"):
            continue
        rep.add(f"config {key}={getattr(args, key)}")
    for path in inputs:
        rep.add(f"input {path} sha256:{_digest(path)}")


# ---------------------------------------------------------------------------


def cmd_condense(args, rep: Report) -> int:
    from freiman.condense import condense_iterate

    A = _load(args.set, "set", IntSet.from_text)
    P = _load(args.system, "system", PolySystem.from_text)
    if args.diagonal is not None:
        return _condense_diagonal(args, rep, A, P)
    trace = condense_iterate(A, P, mode=args.mode, max_steps=args.max_steps, budget=args.budget)
    rep.add(f"initial {_fmt_set(A)} env={A.env}")
    for i, st in enumerate(trace.steps, 1):
        rep.add(f"step {i}: {st.describe()}")
    rep.add(f"final {_fmt_set(trace.final)} env={trace.final.env}")
    if trace.detail:
        rep.add(f"stop {trace.stop_reason}: {trace.detail}")
    rep.add("map:")
    for line in trace.composed_map.to_text().splitlines():
        rep.add("  " + line)
    rep.result(
        mode=args.mode,
        steps=len(trace.steps),
        env_before=A.env,
        env_after=trace.final.env,
        stop=trace.stop_reason,
    )
    return EXIT_BUDGET if trace.stop_reason == "budget" else EXIT_OK


def _condense_diagonal(args, rep, A, P) -> int:
    from freiman.algnum import condense_diagonal

    t = P.diagonal_degree()
    if t != args.diagonal:
        raise InputError(f"system is not diagonal of degree {args.diagonal}")
    mode = args.mode if args.mode_given else "greedy"
    res = condense_diagonal(A, P, mode=mode, budget=args.budget, max_steps=args.max_steps)
    c = res.certificate
    rep.add(f"initial {_fmt_set(A)}")
    rep.add(f"power set env={c.linear_env[0]} condensed env={c.linear_env[1]} ({res.stop_reason})")
    for a in A.elements:
        rep.add(f"  {a} -> {res.psi[a].to_text()}")
    rep.add(f"algebraic iso: {c.verdict.describe()}")
    rep.add(f"Env(B)={c.env} ({'exact' if c.env_exact else 'upper bound'}) <= t*2^(t+1)*(k+1)^A={c.env_bound}: {c.env <= c.env_bound}")
    rep.add(f"degree bound {c.degree_bound} <= t^A={c.degree_limit}: {c.degree_bound <= c.degree_limit}")
    rep.add(f"solutions before={c.solutions[0]} after={c.solutions[1]}")
    rep.result(
        mode=mode,
        iso="yes" if c.verdict else "no",
        env=c.env,
        env_bound=c.env_bound,
        degree=c.degree_bound,
        certificate="ok" if c.ok else "failed",
    )
    return EXIT_OK if c.ok else EXIT_NEGATIVE


def cmd_densify(args, rep: Report) -> int:
    from freiman.densify import densify_iterate

    A = _load(args.set, "set", IntSet.from_text)
    P = _load(args.system, "system", PolySystem.from_text)
    try:
        eps = Fraction(args.epsilon)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad epsilon {args.epsilon!r}") from None
    run = densify_iterate(
        A, P, epsilon=eps, max_steps=args.max_steps, verify=args.verify, budget=args.budget, force=args.force
    )
    rep.add(f"initial card={A.card} env={A.env}")
    for i, st in enumerate(run.steps, 1):
        rep.add(
            f"step {i}: primes={list(st.primes)} Y={st.Y_used} card={st.output.card} env={st.output.env} "
            f"verify={st.verification}"
        )
        rep.add(f"  ratio {st.ratio_before.value():.12g} -> {st.ratio_after.value():.12g}")
        pre, imp = st.precondition, st.improvement
        rep.add(f"  prime window condition: {pre.holds} (margin {pre.margin:.6g}, error {pre.error:.3g})")
        rep.add(f"  ratio improvement by (1-eps): {imp.holds} (margin {imp.margin:.6g}, error {imp.error:.3g})")
    if run.detail:
        rep.add(f"stop {run.stop_reason}: {run.detail}")
    rep.add(f"final {_fmt_set(run.final)}")
    rep.result(steps=len(run.steps), card=run.final.card, env=run.final.env, stop=run.stop_reason)
    return EXIT_BUDGET if run.stop_reason == "budget" and not run.steps else EXIT_OK


def cmd_count(args, rep: Report) -> int:
    from freiman.meanvalue import bound_report, count_J, count_J_bruteforce, count_J_phi

    A = _load(args.set, "set", IntSet.from_text)
    if args.s < 1 or args.k < 1:
        raise InputError("--s and --k must be positive")
    phis = None
    if args.phi:
        phis = _load(args.phi, "phi", PolySystem.from_text)
        if phis.s != 1:
            raise InputError(f"{args.phi}: phi polynomials must be in one variable")
        if len(phis.polys) != args.k:
            raise InputError(f"{args.phi}: expected {args.k} polynomials, found {len(phis.polys)}")
    if args.oracle:
        J = count_J_bruteforce(A, args.s, args.k, phis=phis, budget=args.budget)
    elif phis is not None:
        J = count_J_phi(A, args.s, phis, budget=args.budget)
    else:
        J = count_J(A, args.s, args.k, budget=args.budget)
    rep.add(f"set {_fmt_set(A)} card={A.card} diam={A.diam}")
    rep.add(f"J={J} via {'brute force' if args.oracle else 'moment tally'}")
    for line in bound_report(A, args.s, args.k, J, eps=args.eps, budget=args.budget).lines():
        rep.add(line)
    rep.result(J=J)
    return EXIT_OK


def cmd_verify(args, rep: Report) -> int:
    A = _load(args.set, "set", IntSet.from_text)
    P = _load(args.system, "system", PolySystem.from_text)
    psi = _load(args.map, "map", MapTable.from_text)
    if psi.kind == "t_fold":
        v = is_tfold_freiman_iso(psi, A, P, budget=args.budget)
    else:
        v = is_freiman_iso(psi, A, P, budget=args.budget)
    rep.add(f"map kind={psi.kind} t={psi.t}")
    rep.add(f"solutions in source: {len(scan(P, A.elements, budget=args.budget)[0])}")
    rep.add(f"verdict: {v.describe()}")
    fields = {"iso": "yes" if v else "no", "checked": v.checked}
    if not v:
        fields["direction"] = v.direction
        fields["counterexample"] = ",".join(map(str, _flat(v.counterexample)))
    rep.result(**fields)
    return EXIT_OK if v else EXIT_NEGATIVE


def _flat(x):
    for item in x:
        if isinstance(item, tuple):
            yield "(" + ",".join(map(str, item)) + ")"
        else:
            yield item


def cmd_minmodel(args, rep: Report) -> int:
    from freiman.condense import exact_min_model

    A = _load(args.set, "set", IntSet.from_text)
    P = _load(args.system, "system", PolySystem.from_text)
    m = exact_min_model(A, P, env_cap=args.env_cap, budget=args.budget)
    rep.add(f"set {_fmt_set(A)} env={A.env}")
    rep.add(f"witness {_fmt_set(m.witness)} env={m.env}")
    for a in A.elements:
        rep.add(f"  {a} -> {m.bijection[a]}")
    rep.result(env_star=m.env, witness=",".join(map(str, m.witness.elements)))
    return EXIT_OK


# ---------------------------------------------------------------------------


class _ModeAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.mode_given = True


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration cap (default %(default)s)")
    shared.add_argument("--no-timing", action="store_true", help="omit the elapsed-time line")
    shared.add_argument("--output", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="freiman", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("condense", parents=[shared], help="shrink env by Freiman isomorphisms")
    c.add_argument("set")
    c.add_argument("system")
    c.add_argument("--mode", choices=("thm31", "thm32", "greedy"), default="thm32", action=_ModeAction)
    c.add_argument("--max-steps", type=int, default=64)
    c.add_argument("--diagonal", type=int, metavar="T", help="diagonal system of degree T: condense via t-th powers")
    c.set_defaults(func=cmd_condense, mode_given=False)

    d = sub.add_parser("densify", parents=[shared], help="iterate the prime-combination densifier")
    d.add_argument("set")
    d.add_argument("system")
    d.add_argument("--epsilon", default="1/10")
    d.add_argument("--max-steps", type=int, default=1)
    d.add_argument("--verify", choices=("auto", "full", "count", "sample", "none"), default="auto")
    d.add_argument("--force", action="store_true", help="step even when the stopping rule is already met")
    d.set_defaults(func=cmd_densify)

    n = sub.add_parser("count", parents=[shared], help="mean value J_{s,k}")
    n.add_argument("set")
    n.add_argument("--s", type=int, required=True)
    n.add_argument("--k", type=int, required=True)
    n.add_argument("--phi", help="system file with k one-variable polynomials")
    n.add_argument("--oracle", action="store_true", help="enumerate all 2s-tuples instead")
    n.add_argument("--eps", type=float, default=0.01)
    n.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", parents=[shared], help="check a map table for the isomorphism property")
    v.add_argument("set")
    v.add_argument("system")
    v.add_argument("map")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("minmodel", parents=[shared], help="exact smallest-env isomorphic copy")
    m.add_argument("set")
    m.add_argument("system")
    m.add_argument("--env-cap", type=int, default=8)
    m.set_defaults(func=cmd_minmodel)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    rep = Report()
    inputs = [getattr(args, k) for k in ("set", "system", "map", "phi") if getattr(args, k, None)]
    start = time.perf_counter()
    try:
        for path in inputs:
            if not Path(path).is_file():
                raise InputError(f"no such file: {path}")
        _header(rep, args, inputs)
        code = args.func(args, rep)
    except BudgetExceeded as exc:
        rep.add(f"budget exhausted: {exc}")
        rep.result(status="budget")
        code = EXIT_BUDGET
    except (InputError, PreconditionError) as exc:
        print(f"freiman: error: {exc}", file=stderr)
        return EXIT_INPUT
    except FreimanError as exc:
        print(f"freiman: internal error: {exc}", file=stderr)
        return EXIT_INTERNAL
    if not args.no_timing:
        last = rep.lines.pop()
        rep.add(f"# elapsed {time.perf_counter() - start:.3f}s")
        rep.add(last)
    text = rep.text()
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
