import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from freiman.core import IntSet, Poly, PolySystem

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def int_sets(min_size=1, max_size=4, lo=-20, hi=20):
    return st.sets(st.integers(lo, hi), min_size=min_size, max_size=max_size).map(IntSet)


@st.composite
def linear_systems(draw, s_min=2, s_max=4, r_max=2, coeff=3, homogeneous=True):
    s = draw(st.integers(s_min, s_max))
    r = draw(st.integers(1, r_max))
    rows = []
    for _ in range(r):
        c = draw(st.lists(st.integers(-coeff, coeff), min_size=s, max_size=s).filter(any))
        b = 0 if homogeneous else draw(st.integers(-coeff, coeff))
        rows.append((c, b))
    return PolySystem.linear(rows)


@st.composite
def poly_systems(draw, s_max=3, deg_max=3):
    """Small arbitrary (possibly non-separable) systems."""
    s = draw(st.integers(1, s_max))
    r = draw(st.integers(1, 2))
    polys = []
    for _ in range(r):
        n_terms = draw(st.integers(1, 3))
        terms = [
            (draw(st.integers(-3, 3).filter(bool)), draw(st.lists(st.integers(0, deg_max), min_size=s, max_size=s)))
            for _ in range(n_terms)
        ]
        try:
            polys.append(Poly(s, terms))
        except ValueError:
            polys.append(Poly(s, [(1, [1] + [0] * (s - 1))]))
    return PolySystem(polys, s)


AP3 = PolySystem.linear([([1, 1, -2], 0)])
ADD4 = PolySystem.linear([([1, 1, -1, -1], 0)])


# acceptance criteria append (number, verdict, seconds, note) here
ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, secs, note in sorted(ACCEPTANCE_LOG):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} ({secs:.2f}s) {note}")
