from itertools import product

import pytest
from hypothesis import given

import oracle
from conftest import AP3, int_sets, linear_systems, poly_systems
from freiman.core import (
    IntSet,
    Poly,
    PolySystem,
    SolutionHypergraph,
    SolutionSet,
    build_hypergraph,
    eval_poly,
    measures,
    scan,
    solution_set,
)
from freiman.errors import BudgetExceeded, InputError


ADD4 = Poly.linear([1, 1, -1, -1])
PYTH = Poly(4, [(1, (2, 0, 0, 0)), (1, (0, 2, 0, 0)), (-1, (0, 0, 2, 0)), (-1, (0, 0, 0, 2))])


class TestEval:
    def test_examples(self):
        assert eval_poly(ADD4, (1, 2, 3, 0)) == 0
        assert eval_poly(PYTH, (3, 4, 5, 0)) == 0
        assert eval_poly(AP3.polys[0], (0, 1, 3)) == -5

    def test_arity(self):
        with pytest.raises(InputError):
            eval_poly(ADD4, (1, 2, 3))

    def test_big_integers(self):
        big = 10**40
        assert eval_poly(PYTH, (3 * big, 4 * big, 5 * big, 0)) == 0
        assert eval_poly(ADD4, (big, 1, 0, 0)) == big + 1


class TestPoly:
    def test_merges_and_drops(self):
        p = Poly(2, [(2, (1, 0)), (-2, (1, 0)), (3, (0, 1))])
        assert p.terms == ((3, (0, 1)),)

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            Poly(1, [(1, (1,)), (-1, (1,))])

    def test_flags(self):
        assert ADD4.is_linear and ADD4.is_homogeneous and ADD4.is_separable
        assert PYTH.diagonal_degree() == 2 and not PYTH.is_linear
        assert not Poly.linear([1, -1], 3).is_homogeneous
        assert not Poly(2, [(1, (1, 1))]).is_separable
        assert Poly(2, [(1, (1, 1))]).diagonal_degree() is None

    def test_lambda_includes_constant(self):
        P = PolySystem.linear([([1, -2], 3), ([1, 1], 0)])
        assert P.Lam == 6
        assert P.r == 2 and P.s == 2


class TestMeasures:
    @pytest.mark.parametrize(
        "A, expected",
        [([0], (1, 1, 1)), ([-3, 5], (2, 9, 6)), ([0, 1, 2, 4, 8], (5, 9, 9))],
    )
    def test_examples(self, A, expected):
        assert measures(IntSet(A)) == expected

    def test_empty(self):
        with pytest.raises(InputError):
            measures(IntSet())

    @given(int_sets(max_size=8, lo=-10**30, hi=10**30))
    def test_diam_env_relations(self, A):
        assert A.diam <= 2 * A.env - 1
        assert 2 * A.env >= A.diam + 1
        shifted = A.map(lambda a: a - A.min)
        assert shifted.env == A.diam


class TestSolutionSet:
    def test_013(self):
        S = solution_set(IntSet([0, 1, 3]), AP3)
        assert S.labels() == ((0, 0, 0), (1, 1, 1), (3, 3, 3))

    def test_0_100_200(self):
        S = solution_set(IntSet([0, 100, 200]), AP3)
        assert len(S) == 5
        assert (0, 200, 100) in S and (200, 0, 100) in S
        assert (0, 100, 200) not in S

    def test_constant_unsatisfiable(self):
        P = PolySystem([Poly(2, [(7, (0, 0))])], 2)
        assert len(solution_set(IntSet([0, 1, 2]), P)) == 0

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            solution_set(IntSet(range(10)), AP3, budget=100)

    def test_order_is_lexicographic(self):
        S = solution_set(IntSet([-5, 0, 2, 5, 7]), AP3)
        assert list(S.tuples) == sorted(S.tuples)

    @given(int_sets(max_size=5), linear_systems(homogeneous=False))
    def test_matches_oracle_linear(self, A, P):
        assert list(solution_set(A, P).labels()) == oracle.solutions(A.elements, P)

    @given(int_sets(max_size=4, lo=-6, hi=6), poly_systems())
    def test_matches_oracle_general(self, A, P):
        assert list(solution_set(A, P).labels()) == oracle.solutions(A.elements, P)

    @given(int_sets(max_size=4), linear_systems())
    def test_every_tuple_classified(self, A, P):
        S = solution_set(A, P)
        for x in product(A.elements, repeat=P.s):
            assert (x in S) == all(eval_poly(p, x) == 0 for p in P.polys)

    def test_scan_unsorted_points(self):
        pts = [3, 0, 1]
        sols, _ = scan(AP3, pts)
        assert sorted(tuple(pts[i] for i in t) for t in sols) == [(0, 0, 0), (1, 1, 1), (3, 3, 3)]


class TestHypergraph:
    def test_examples(self):
        G = build_hypergraph(IntSet([0, 100, 200]), AP3)
        assert G.vertices.card == 3 and len(G.edges) == 5
        G = build_hypergraph(IntSet([5]), AP3)
        assert len(G.edges) == 1
        G = build_hypergraph(IntSet([0, 1]), PolySystem.linear([([1, -1], 7)]))
        assert G.vertices.card == 2 and len(G.edges) == 0

    def test_edges_are_vertices(self):
        G = build_hypergraph(IntSet([-4, 0, 2, 4, 6]), AP3)
        for e in G.edge_labels():
            assert all(v in G.vertices for v in e)


class TestSerialization:
    def test_set_text(self):
        A = IntSet.from_text("# a comment\n5\n-3\n\n100  # trailing\n")
        assert A.elements == (-3, 5, 100)
        assert IntSet.from_text(A.to_text()) == A

    @pytest.mark.parametrize(
        "text, line",
        [("1\nx\n", 2), ("1\n2 3\n", 2), ("\n\n4.5\n", 3)],
    )
    def test_set_text_errors(self, text, line):
        with pytest.raises(InputError) as exc:
            IntSet.from_text(text)
        assert exc.value.line == line
        assert f"line {line}" in str(exc.value)

    def test_empty_file(self):
        with pytest.raises(InputError):
            IntSet.from_text("# nothing\n")

    @given(int_sets(max_size=6, lo=-10**50, hi=10**50))
    def test_set_roundtrip(self, A):
        assert IntSet.from_text(A.to_text()) == A
        assert IntSet.from_json(A.to_json()) == A

    def test_system_text(self):
        text = "vars 4\n# pythagorean\npoly: 1 2 0 0 0; 1 0 2 0 0; -1 0 0 2 0; -1 0 0 0 2\nlinear: 1 1 -1 -1 0\n"
        P = PolySystem.from_text(text)
        assert P.r == 2 and P.s == 4
        assert P.polys[0] == PYTH and P.polys[1] == ADD4
        assert PolySystem.from_text(P.to_text()) == P

    @pytest.mark.parametrize(
        "text, line",
        [
            ("vars 2\nlinear: 1 2\n", 2),
            ("vars 2\npoly: 1 1\n", 2),
            ("vars 2\nquad: 1 1 1\n", 2),
            ("vars x\n", 1),
            ("linear: 1 1 1\n", 1),
            ("vars 2\nlinear: 1 -1 0\npoly: 1 1 0; -1 1 0\n", 3),
        ],
    )
    def test_system_text_errors(self, text, line):
        with pytest.raises(InputError) as exc:
            PolySystem.from_text(text)
        assert exc.value.line == line

    @given(poly_systems())
    def test_system_roundtrip(self, P):
        assert PolySystem.from_text(P.to_text()) == P
        assert PolySystem.from_json(P.to_json()) == P

    @given(int_sets(max_size=4), linear_systems())
    def test_solution_set_and_hypergraph_roundtrip(self, A, P):
        S = solution_set(A, P)
        assert SolutionSet.from_json(S.to_json()) == S
        G = build_hypergraph(A, P)
        assert SolutionHypergraph.from_json(G.to_json()) == G
