from fractions import Fraction
from itertools import product
from math import ceil

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from conftest import ADD4, AP3, int_sets, linear_systems
from freiman.condense import (
    box_principle_rho,
    compute_upsilon,
    condense_iterate,
    condense_step,
    env_floor,
    exact_min_model,
    find_prime_avoiding,
    greedy_min_modulus,
)
from freiman.core import IntSet, Poly, PolySystem, eval_poly, solution_set
from freiman.errors import BudgetExceeded, InputError, PreconditionError
from freiman.verify import MapTable, is_freiman_iso

EQ2 = PolySystem.linear([([1, -1], 0)])


def sparse_sets(max_size=5, max_exp=18):
    """Sets of a few elements spread up to 10**max_exp apart."""
    return st.lists(
        st.integers(-(10**max_exp), 10**max_exp), min_size=1, max_size=max_size, unique=True
    ).map(IntSet)


class TestUpsilon:
    def test_example(self):
        # pairs (0,2),(2,0) give 2*2; non-solutions (0,2),(2,0) give 2*2
        assert compute_upsilon(IntSet([0, 2]), EQ2) == 16

    @given(int_sets(max_size=4, lo=-9, hi=9), linear_systems(s_max=3))
    def test_matches_oracle(self, A, P):
        assert compute_upsilon(A, P) == oracle.upsilon(A.elements, P)

    def test_product_form(self):
        P = PolySystem([Poly(2, [(1, (2, 0)), (-1, (0, 2))]), Poly.linear([1, -1])], 2)
        A = IntSet([1, 2])
        # pairs: 1*1; first poly nonzero at (1,2),(2,1): 3*3; second: 1*1
        assert compute_upsilon(A, P, form="product") == 9
        with pytest.raises(InputError):
            compute_upsilon(A, P, form="other")


class TestPrimeSearch:
    def test_examples(self):
        assert find_prime_avoiding(1, 4) == 5
        assert find_prime_avoiding(35, 4) == 11
        assert find_prime_avoiding(35, 4, window_doubling=True) == 11
        assert find_prime_avoiding(2 * 3 * 5, 0) == 7

    def test_budget(self):
        U = 11 * 13 * 17 * 19 * 23
        with pytest.raises(BudgetExceeded):
            find_prime_avoiding(U, 10, max_candidates=3)

    @given(st.integers(1, 10**9), st.integers(0, 10**4))
    def test_least(self, U, lower):
        p = find_prime_avoiding(U, lower)
        assert p > lower and oracle.is_prime(p) and U % p
        assert all(not oracle.is_prime(q) or U % q == 0 for q in range(lower + 1, p))


class TestBoxPrinciple:
    @given(int_sets(max_size=4, lo=-10**6, hi=10**6), st.integers(2, 10**5), st.integers(1, 4))
    def test_least_rho(self, A, m, Lam):
        cap = (Lam + 1) ** A.card
        rho = box_principle_rho(A, m, Lam, cap)
        bound = Fraction(1, Lam + 1)

        def ok(r):
            return all(abs(Fraction(r * a, m) - round(Fraction(r * a, m))) <= bound for a in A)

        # pigeonhole guarantees some rho in [1, (Lam+1)^A]
        assert rho is not None
        assert ok(rho)
        assert not any(ok(r) for r in range(1, rho))


class TestStep:
    def test_thm32_example(self):
        st_ = condense_step(IntSet([0, 10**6, 2 * 10**6]), AP3, "thm32")
        assert st_.pi == 127 and st_.h == 127
        assert st_.env_before == 2000001 and st_.env_after == 5
        assert all(st_.properties.values())

    def test_thm32_no_gain(self):
        assert condense_step(IntSet([0, 1, 2]), AP3, "thm32") is None

    def test_add4_thm32_and_greedy(self):
        d = 10**12
        A = IntSet([0, d, 2 * d, 3 * d])
        t = condense_iterate(A, ADD4, "thm32")
        assert [(s.pi, s.rho) for s in t.steps] == [(631, 8)]
        assert t.final.elements == (0, 39, 78, 117)
        g = condense_iterate(A, ADD4, "greedy")
        assert [s.h for s in g.steps] == [13]
        assert g.final.elements == (0, 1, 2, 3)

    def test_greedy_small(self):
        s = greedy_min_modulus(IntSet([0, 1]), EQ2, 10)
        assert (s.h, s.rho) == (3, 1)
        s = greedy_min_modulus(IntSet([0]), EQ2, 10)
        assert s.h == 2 and s.image.elements == (0,)

    def test_thm31_inhomogeneous(self):
        P = PolySystem.linear([([1, -1], 1)])  # x1 - x2 = 1
        A = IntSet([10**40, 10**40 + 1])
        s = condense_step(A, P, "thm31")
        assert s.L == 720720 and s.pi == 5
        assert s.env_after < s.env_before
        assert is_freiman_iso(s.map, A, P)
        assert all(s.properties.values())

    def test_thm31_no_gain_when_L_is_large(self):
        P = PolySystem.linear([([1, 1, -1], 1)])
        assert condense_step(IntSet([0, 10**10, 5 * 10**10]), P, "thm31") is None

    def test_powers_of_two_resist(self):
        A = IntSet([0, 1, 2, 4, 8])
        t = condense_iterate(A, ADD4, "thm32")
        m = exact_min_model(A, ADD4, env_cap=6)
        assert m.env == 5
        assert m.witness.elements == (-4, -3, -2, 0, 4)
        assert t.final.env >= m.env

    def test_preconditions(self):
        quad = PolySystem([Poly(2, [(1, (2, 0)), (-1, (0, 2))])], 2)
        with pytest.raises(PreconditionError):
            condense_step(IntSet([0, 1]), quad, "thm32")
        inhom = PolySystem.linear([([1, -1], 1)])
        for mode in ("thm32", "greedy"):
            with pytest.raises(PreconditionError):
                condense_step(IntSet([0, 1]), inhom, mode)
        with pytest.raises(InputError):
            condense_step(IntSet([0, 1]), EQ2, "fancy")

    def test_box_budget(self):
        with pytest.raises(BudgetExceeded):
            condense_step(IntSet(range(0, 10**7, 10**6)), AP3, "thm32", box_budget=100)

    @pytest.mark.parametrize("mode", ["thm32", "greedy"])
    @given(A=sparse_sets(max_size=4), P=linear_systems(s_max=3, coeff=2))
    def test_step_sound(self, mode, A, P):
        s = condense_step(A, P, mode, box_budget=10**4)
        if s is None:
            return
        psi = s.map.as_dict()
        assert oracle.is_iso(psi, A.elements, P)
        assert len(solution_set(s.image, P)) == len(solution_set(A, P))
        assert s.env_after < s.env_before
        assert all(s.properties[k] for k in ("i", "ii", "iii", "size"))

    @given(A=sparse_sets(max_size=3), P=linear_systems(s_max=3, coeff=2, homogeneous=False))
    def test_thm31_sound(self, A, P):
        try:
            s = condense_step(A, P, "thm31", box_budget=10**3)
        except BudgetExceeded:
            return
        if s is not None:
            assert oracle.is_iso(s.map.as_dict(), A.elements, P)

    @given(A=sparse_sets(max_size=4), P=linear_systems(s_max=3, coeff=2))
    def test_check_properties_matches_definition(self, A, P):
        s = condense_step(A, P, "thm32", box_budget=10**4)
        if s is None:
            return
        h, rho, Lam = s.h, s.rho, P.Lam
        el = A.elements
        assert len({rho * a % h for a in el}) == len(el)
        for x in product(el, repeat=P.s):
            vals = [eval_poly(p, x) for p in P.polys]
            if any(vals):
                img = [s.map[a] for a in x]
                assert any(eval_poly(p, img) % h for p in P.polys)
        for a in el:
            f = Fraction(rho * a, h)
            assert abs(f - round(f)) <= Fraction(1, Lam + 1)


class TestIterate:
    def test_composed_map_and_monotone(self):
        A = IntSet([0, 7 * 10**15, 3 * 10**17, 10**18])
        t = condense_iterate(A, ADD4, "thm32")
        envs = [s.env_before for s in t.steps] + [t.final.env]
        assert envs == sorted(envs, reverse=True) and len(set(envs)) == len(envs)
        assert is_freiman_iso(t.composed_map, A, ADD4)
        assert t.composed_map.image() == t.final

    def test_thm32_bound(self):
        A = IntSet([0, 10**9, 3 * 10**14])
        t = condense_iterate(A, AP3, "thm32")
        assert t.final.env <= (AP3.Lam + 1) ** A.card

    def test_target_reached(self):
        t = condense_iterate(IntSet([-1, 0, 1]), AP3, "greedy")
        assert t.stop_reason == "target_reached" and not t.steps

    def test_max_steps(self):
        t = condense_iterate(IntSet([0, 10**6, 2 * 10**6]), AP3, "thm32", max_steps=0)
        assert t.stop_reason == "budget"

    def test_env_floor(self):
        assert [env_floor(n) for n in range(1, 7)] == [1, 2, 2, 3, 3, 4]
        for n in range(1, 7):
            assert min(IntSet(range(-(n // 2), n - n // 2)).env, IntSet(range(-((n - 1) // 2), n - (n - 1) // 2)).env) == env_floor(n)


class TestMinModel:
    def test_example(self):
        m = exact_min_model(IntSet([0, 100, 200]), AP3, env_cap=5)
        assert m.env == 2 and m.witness.elements == (-1, 0, 1)
        assert m.bijection == {0: -1, 100: 0, 200: 1}

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_consecutive(self, n):
        m = exact_min_model(IntSet(range(n)), AP3, env_cap=6)
        assert m.env == ceil((n + 1) / 2)
        assert is_freiman_iso(MapTable.single(m.bijection), IntSet(range(n)), AP3)

    def test_cap(self):
        with pytest.raises(BudgetExceeded):
            exact_min_model(IntSet([0, 1, 2, 4, 8]), ADD4, env_cap=4)

    @given(int_sets(min_size=1, max_size=3, lo=-30, hi=30), st.sampled_from([AP3, EQ2, PolySystem.linear([([1, -2], 0)])]))
    def test_matches_oracle(self, A, P):
        m = exact_min_model(A, P, env_cap=4)
        assert m.env == oracle.min_env_model(A.elements, P, 4)
        assert oracle.is_iso(m.bijection, A.elements, P)
