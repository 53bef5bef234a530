"""Time the enumeration kernels on every available backend.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Each case is run on the pure-Python and (if built) the compiled kernels,
outputs are checked for equality, and the best-of-N wall time is reported.
"""

import argparse
import platform
import random
import time

from freiman.core import IntSet, PolySystem, separable_tables
from freiman.kernels import backends


def _scan_case(n, P, seed, want_residuals):
    rng = random.Random(seed)
    A = IntSet(rng.sample(range(-10**6, 10**6), n))
    tables, consts = separable_tables(P, A.elements)
    return lambda k: k.scan_separable(tables, consts, n, P.s, want_residuals)


def _tally_case(n, s, k, big, seed):
    rng = random.Random(seed)
    hi = 10**30 if big else 10**3
    vals = set()
    while len(vals) < n:
        vals.add(rng.randrange(-hi, hi))
    A = IntSet(vals)
    tables = [[a**j for a in A.elements] for j in range(1, k + 1)]
    return lambda mod: mod.moment_tally(tables, s)


def cases(quick):
    ap3 = PolySystem.linear([([1, 1, -2], 0)])
    add4 = PolySystem.linear([([1, 1, -1, -1], 0)])
    two_rows = PolySystem.linear([([1, 2, -3, 0], 0), ([0, 1, 1, -2], 0)])
    diag = PolySystem.diagonal([[1, 1, -1, -1]], 2)
    m = 1 if quick else 2
    yield f"scan AP3 n={60 * m}", _scan_case(60 * m, ap3, 1, False)
    yield f"scan AP3 n={60 * m} +residuals", _scan_case(60 * m, ap3, 1, True)
    yield f"scan ADD4 n={25 * m}", _scan_case(25 * m, add4, 2, False)
    yield f"scan 2 rows n={25 * m}", _scan_case(25 * m, two_rows, 3, False)
    yield f"scan squares n={25 * m}", _scan_case(25 * m, diag, 4, False)
    yield f"tally s=3 k=2 n={40 * m}", _tally_case(40 * m, 3, 2, False, 5)
    yield f"tally s=4 k=3 n={20 * m}", _tally_case(20 * m, 4, 3, False, 6)
    yield f"tally s=3 k=3 n={30 * m} big ints", _tally_case(30 * m, 3, 3, True, 7)


def best_of(fn, mod, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(mod)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)

    mods = backends()
    names = [m.BACKEND for m in mods]
    print(f"python {platform.python_version()}  backends: {', '.join(names)}")
    if len(mods) == 1:
        print("compiled extension not built; only the fallback is timed")
    header = f"{'case':32s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(mods) > 1 else "")
    print(header)
    print("-" * len(header))
    for label, fn in cases(args.quick):
        times = []
        outs = []
        for m in mods:
            t, out = best_of(fn, m, args.repeat)
            times.append(t)
            outs.append(out)
        if any(o != outs[0] for o in outs[1:]):
            raise SystemExit(f"backends disagree on {label}")
        row = f"{label:32s}" + "".join(f"{t * 1000:10.1f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
