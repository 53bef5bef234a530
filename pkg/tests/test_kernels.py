"""Every available kernel backend must agree with the pure-Python one."""

import random
from itertools import product

import pytest

from freiman import kernels
from freiman._pykernels import moment_tally as py_tally
from freiman._pykernels import scan_separable as py_scan

BACKENDS = kernels.backends()
IDS = [b.BACKEND for b in BACKENDS]


def _random_instance(rng, n, s, r, mag):
    tables = [[[rng.randint(-mag, mag) for _ in range(n)] for _ in range(s)] for _ in range(r)]
    # plant some solutions by making column 0 cancel the rest on a few points
    consts = [rng.randint(-mag, mag) for _ in range(r)]
    return tables, consts


def _naive_scan(tables, consts, n, s):
    sols, res = [], []
    for idx in product(range(n), repeat=s):
        vals = [c + sum(tables[i][j][x] for j, x in enumerate(idx)) for i, c in enumerate(consts)]
        if not any(vals):
            sols.append(idx)
        else:
            res.append(sum(abs(v) for v in vals))
    return sols, res


@pytest.mark.parametrize("backend", BACKENDS, ids=IDS)
@pytest.mark.parametrize("mag", [2, 10**6, 10**30])
def test_scan_parity(backend, mag):
    rng = random.Random(mag)
    for _ in range(40):
        n = rng.randint(1, 5)
        s = rng.randint(1, 4)
        r = rng.randint(1, 2)
        tables, consts = _random_instance(rng, n, s, r, mag)
        want = _naive_scan(tables, consts, n, s)
        assert backend.scan_separable(tables, consts, n, s, True) == want
        sols, res = backend.scan_separable(tables, consts, n, s, False)
        assert sols == want[0] and res is None


@pytest.mark.parametrize("backend", BACKENDS, ids=IDS)
def test_scan_small_values_find_solutions(backend):
    # x1 + x2 - 2 x3 over {0..6}: many solutions
    pts = list(range(7))
    tables = [[pts, pts, [-2 * a for a in pts]]]
    sols, _ = backend.scan_separable(tables, [0], 7, 3, False)
    assert sols == _naive_scan(tables, [0], 7, 3)[0]
    assert len(sols) == 25


@pytest.mark.parametrize("backend", BACKENDS, ids=IDS)
@pytest.mark.parametrize("mag", [3, 10**5, 10**25])
def test_tally_parity(backend, mag):
    rng = random.Random(7 + mag)
    for _ in range(30):
        n = rng.randint(1, 5)
        s = rng.randint(1, 4)
        k = rng.randint(1, 3)
        tables = [[rng.randint(-mag, mag) for _ in range(n)] for _ in range(k)]
        want = {}
        for idx in product(range(n), repeat=s):
            key = tuple(sum(tables[j][x] for x in idx) for j in range(k))
            want[key] = want.get(key, 0) + 1
        assert backend.moment_tally(tables, s) == want
        assert py_tally(tables, s) == want


def test_selected_backend_is_listed():
    assert kernels.BACKEND in IDS
    assert IDS[0] == "python"


def test_py_scan_reference_is_the_python_backend():
    assert kernels.backends()[0].scan_separable is py_scan


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--quick", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "scan AP3 n=60" in out and "tally" in out
