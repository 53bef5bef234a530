"""Pure-Python enumeration kernels.

Both functions here have a compiled twin in ``_ckernels.pyx`` with the same
signature and output. The kernels only see plain integer tables; turning a
polynomial system into tables happens in :mod:`freiman.core`.

Table layout for ``scan_separable``: ``tables[i][j][x]`` is the contribution of
variable ``j`` to polynomial ``i`` when that variable takes the ``x``-th point,
and ``consts[i]`` is the constant term of polynomial ``i``. Every system whose
terms each involve at most one variable (linear, diagonal, Vinogradov) has
this shape.
"""

from itertools import combinations_with_replacement
from math import factorial

BACKEND = "python"


def scan_separable(tables, consts, n, s, want_residuals=False):
    """Enumerate all index tuples in ``range(n)**s`` in lexicographic order.

    Returns ``(solutions, residuals)``. ``solutions`` lists the tuples at which
    every polynomial vanishes. When ``want_residuals`` is set, ``residuals``
    lists ``sum_i |P_i|`` for each non-solution tuple, in enumeration order;
    otherwise it is ``None``.
    """
    r = len(consts)
    solutions = []
    residuals = [] if want_residuals else None
    if n == 0 or s == 0:
        return solutions, residuals
    # cols[j][x] is the r-vector of contributions of variable j at point x
    cols = [[tuple(tables[i][j][x] for i in range(r)) for x in range(n)] for j in range(s)]
    last = cols[s - 1]

    if not want_residuals:
        # the last coordinate is looked up, not scanned
        lookup = {}
        for x, contrib in enumerate(last):
            lookup.setdefault(tuple(-c for c in contrib), []).append(x)

        def leaf(prefix, partial):
            hits = lookup.get(partial)
            if hits:
                for x in hits:
                    solutions.append(prefix + (x,))
    else:

        def leaf(prefix, partial):
            for x, contrib in enumerate(last):
                tot = 0
                for p, c in zip(partial, contrib):
                    tot += abs(p + c)
                if tot == 0:
                    solutions.append(prefix + (x,))
                else:
                    residuals.append(tot)

    def rec(level, prefix, partial):
        if level == s - 1:
            leaf(prefix, partial)
            return
        for x, contrib in enumerate(cols[level]):
            rec(level + 1, prefix + (x,), tuple(p + c for p, c in zip(partial, contrib)))

    rec(0, (), tuple(consts))
    return solutions, residuals


def moment_tally(tables, s):
    """Tally the vectors ``(sum_m tables[j][x_m])_j`` over ordered s-tuples.

    Ordered tuples are counted through their underlying multisets with the
    multinomial weight ``s!/prod(mult!)``. Returns a dict from moment vector
    (tuple of ints) to the number of ordered s-tuples producing it.
    """
    k = len(tables)
    n = len(tables[0]) if k else 0
    tally = {}
    if n == 0:
        return tally
    points = [tuple(tables[j][x] for j in range(k)) for x in range(n)]
    s_fact = factorial(s)
    for combo in combinations_with_replacement(range(n), s):
        key = [0] * k
        denom = 1
        run = 0
        prev = -1
        for x in combo:
            run = run + 1 if x == prev else 1
            denom *= run
            prev = x
            for j, v in enumerate(points[x]):
                key[j] += v
        key = tuple(key)
        tally[key] = tally.get(key, 0) + s_fact // denom
    return tally
