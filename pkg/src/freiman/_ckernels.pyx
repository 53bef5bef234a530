# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels.

Same contracts as ``freiman._pykernels``. When every partial sum provably fits
in a signed 64-bit word the loops run on C integers; otherwise the call is
handed to the pure-Python kernel, which works on arbitrary-precision ints.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

from freiman import _pykernels

BACKEND = "cython"

cdef object WORD_LIMIT = 1 << 61


def _scan_fits(tables, consts, Py_ssize_t n, int s):
    r = len(consts)
    for i in range(r):
        bound = abs(consts[i])
        for j in range(s):
            col = tables[i][j]
            if n:
                bound += max(abs(v) for v in col)
        if bound * (r + 1) >= WORD_LIMIT:
            return False
    return True


def scan_separable(tables, consts, Py_ssize_t n, int s, bint want_residuals=False):
    if n == 0 or s == 0 or not _scan_fits(tables, consts, n, s):
        return _pykernels.scan_separable(tables, consts, n, s, want_residuals)
    return _scan_i64(tables, consts, n, s, want_residuals)


cdef _scan_i64(tables, consts, Py_ssize_t n, int s, bint want_residuals):
    cdef Py_ssize_t r = len(consts)
    cdef int64_t* vals = <int64_t*> malloc(r * s * n * sizeof(int64_t))
    cdef int64_t* partial = <int64_t*> malloc(r * (s + 1) * sizeof(int64_t))
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(s * sizeof(Py_ssize_t))
    cdef Py_ssize_t i, j, x, k
    cdef int level
    cdef int64_t v, tot
    cdef bint zero
    solutions = []
    residuals = [] if want_residuals else None
    if vals == NULL or partial == NULL or idx == NULL:
        free(vals); free(partial); free(idx)
        raise MemoryError()
    try:
        for i in range(r):
            partial[i * (s + 1)] = consts[i]
            for j in range(s):
                col = tables[i][j]
                for x in range(n):
                    vals[(i * s + j) * n + x] = col[x]
        for j in range(s):
            idx[j] = 0
        level = 0
        while True:
            if level == s - 1:
                for x in range(n):
                    zero = True
                    tot = 0
                    for i in range(r):
                        v = partial[i * (s + 1) + level] + vals[(i * s + level) * n + x]
                        if v != 0:
                            zero = False
                            if not want_residuals:
                                break
                            tot += v if v > 0 else -v
                    if zero:
                        prefix = [idx[k] for k in range(s - 1)]
                        prefix.append(x)
                        solutions.append(tuple(prefix))
                    elif want_residuals:
                        residuals.append(tot)
                # backtrack
                level -= 1
                while level >= 0:
                    idx[level] += 1
                    if idx[level] < n:
                        break
                    level -= 1
                if level < 0:
                    break
            x = idx[level]
            for i in range(r):
                partial[i * (s + 1) + level + 1] = (
                    partial[i * (s + 1) + level] + vals[(i * s + level) * n + x]
                )
            level += 1
            if level < s - 1:
                idx[level] = 0
            # level s - 1 is scanned in full by the leaf loop
    finally:
        free(vals)
        free(partial)
        free(idx)
    return solutions, residuals


def moment_tally(tables, int s):
    k = len(tables)
    n = len(tables[0]) if k else 0
    if n == 0 or s == 0 or s > 20:
        return _pykernels.moment_tally(tables, s)
    for j in range(k):
        if max(abs(v) for v in tables[j]) * s >= WORD_LIMIT:
            return _pykernels.moment_tally(tables, s)
    return _tally_i64(tables, s, k, n)


cdef _tally_i64(tables, int s, Py_ssize_t k, Py_ssize_t n):
    cdef int64_t* vals = <int64_t*> malloc(k * n * sizeof(int64_t))
    cdef int64_t* partial = <int64_t*> malloc(k * (s + 1) * sizeof(int64_t))
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(s * sizeof(Py_ssize_t))
    cdef int64_t* run = <int64_t*> malloc((s + 1) * sizeof(int64_t))
    cdef int64_t* denom = <int64_t*> malloc((s + 1) * sizeof(int64_t))
    cdef int64_t s_fact = 1
    cdef Py_ssize_t j, x, start
    cdef int level, m
    cdef int64_t rl, weight
    tally = {}
    if vals == NULL or partial == NULL or idx == NULL or run == NULL or denom == NULL:
        free(vals); free(partial); free(idx); free(run); free(denom)
        raise MemoryError()
    try:
        for m in range(2, s + 1):
            s_fact *= m
        for j in range(k):
            col = tables[j]
            for x in range(n):
                vals[j * n + x] = col[x]
            partial[j * (s + 1)] = 0
        denom[0] = 1
        run[0] = 0
        idx[0] = 0
        level = 0
        while True:
            if level == s - 1:
                start = idx[level - 1] if level > 0 else 0
                for x in range(start, n):
                    if level > 0 and x == idx[level - 1]:
                        rl = run[level] + 1
                    else:
                        rl = 1
                    weight = s_fact // (denom[level] * rl)
                    key = tuple([partial[j * (s + 1) + level] + vals[j * n + x] for j in range(k)])
                    tally[key] = tally.get(key, 0) + weight
                level -= 1
                while level >= 0:
                    idx[level] += 1
                    if idx[level] < n:
                        break
                    level -= 1
                if level < 0:
                    break
            # descend from a fixed idx[level]
            x = idx[level]
            if level > 0 and x == idx[level - 1]:
                rl = run[level] + 1
            else:
                rl = 1
            run[level + 1] = rl
            denom[level + 1] = denom[level] * rl
            for j in range(k):
                partial[j * (s + 1) + level + 1] = partial[j * (s + 1) + level] + vals[j * n + x]
            level += 1
            if level < s - 1:
                idx[level] = idx[level - 1]
    finally:
        free(vals)
        free(partial)
        free(idx)
        free(run)
        free(denom)
    return tally
