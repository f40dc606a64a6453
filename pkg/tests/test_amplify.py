import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from gl2local import amplify as am
from gl2local.amplify import TupleType


class TestTuples:
    @pytest.mark.parametrize("tup,expected", [
        ("abba", TupleType.TWO_CROSS), ("aaaa", TupleType.ALL_EQUAL), ("abcd", TupleType.DISTINCT),
        ("abad", TupleType.SAME_SIDE_PAIR), ("abcb", TupleType.SAME_SIDE_PAIR),
        ("abca", TupleType.CROSS_PAIR), ("aacd", TupleType.PRIMED_PAIR), ("abab", TupleType.TWO_SAME_SIDE),
        ("aabb", TupleType.TWO_PRIMED), ("aaba", TupleType.TRIPLE),
    ])
    def test_classification(self, tup, expected):
        assert am.classify_tuple(*tup) is expected

    def test_every_tuple_gets_one_type(self):
        kinds = [am.classify_tuple(*x) for x in itertools.product(range(5), repeat=4)]
        assert len(kinds) == 625 and set(kinds) == set(TupleType)

    @pytest.mark.parametrize("M", [1, 4, 5, 7])
    def test_counts_match_enumeration(self, M):
        brute = am.count_tuples_bruteforce(M)
        assert all(brute[t] == am.count_tuples(M, t) for t in TupleType)

    @given(M=st.integers(0, 200))
    def test_counts_partition_all_tuples(self, M):
        assert sum(am.count_tuples(M, t) for t in TupleType) == M**4

    def test_negative_m(self):
        with pytest.raises(ValueError):
            am.count_tuples(-1, 1)


class TestOptimizer:
    @pytest.mark.parametrize("theta", [Fraction(i, 40) for i in range(21)] + [Fraction(7, 64)])
    def test_value_and_witness(self, theta):
        r = am.optimize_exponents(theta)
        assert r.delta == (1 - 2 * theta) / 8
        assert r.witness_optimal
        assert r.e_star == (1 - 2 * theta) / 8
        assert r.kappa_face == ((1 - 2 * theta) / 4, (1 + 6 * theta) / 4)

    def test_anchor_values(self):
        assert am.optimize_exponents(0).delta == Fraction(1, 8)
        assert am.optimize_exponents(Fraction(7, 64)).delta == Fraction(25, 256)

    def test_kappa_is_unique_only_at_theta_zero(self):
        r0 = am.optimize_exponents(0)
        assert r0.kappa_unique and r0.vertices == [(Fraction(1, 8), Fraction(1, 4))]
        assert r0.active_at_witness == [0, 1, 2, 3]
        r = am.optimize_exponents(Fraction(7, 64))
        assert not r.kappa_unique and r.active_at_witness == [0, 1]

    def test_brute_force_grid_never_beats_optimum(self):
        theta = Fraction(1, 10)
        forms = am.objective_forms()
        best = am.optimize_exponents(theta).value
        for e in (Fraction(i, 80) for i in range(41)):
            for k in (Fraction(j, 40) for j in range(41)):
                assert max(f(e, k, theta) for f in forms) >= best

    def test_theta_range(self):
        with pytest.raises(ValueError):
            am.optimize_exponents(Fraction(3, 5))

    def test_dominant_sigma1_type(self):
        # at e > 0 the largest E-power is -2, first reached by DISTINCT
        t, f = am.dominant_form("Sigma1", Fraction(1, 8), Fraction(1, 4))
        assert t == int(TupleType.DISTINCT) and f.b == -2

    def test_form_half(self):
        f = am.ExponentForm(Fraction(-1, 2), Fraction(2), Fraction(0), Fraction(1))
        assert f.half()(Fraction(1), Fraction(0), Fraction(1, 4)) == f(Fraction(1), Fraction(0), Fraction(1, 4)) / 2


class TestMellin:
    def test_h0_profile(self):
        assert am.h0(0.5) == 1 and am.h0(2.5) == 0
        assert abs(am.h0(1.5) - 0.5) < 1e-15
        x = np.linspace(0, 3, 301)
        assert np.all(np.diff(am.h0(x)) <= 0)

    def test_mellin_h0_at_one(self):
        # h0 + h0(3 - x) = 1 on [1, 2], so the mass is 3/2
        assert abs(am.mellin_h0(1) - 1.5) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_frozen_sup_norms(self, n):
        x = sympy.symbols("x")
        g = lambda t: sympy.exp(-1 / t)  # noqa: E731
        expr = sympy.diff(g(2 - x) / (g(2 - x) + g(x - 1)), x, n)
        f = sympy.lambdify(x, expr, "numpy")
        grid = np.linspace(1, 2, 200001)[1:-1]
        sup = float(np.nanmax(np.abs(f(grid))))
        assert sup <= am.H0_SUP_NORMS[n]
        assert sup >= 0.999 * am.H0_SUP_NORMS[n]

    def test_truncation_bound_dominates(self):
        worst = 0.0
        for Q in (1e2, 1e4, 1e6):
            for k in (0.1, 0.25, 0.4):
                for s in (2j, 5j, 0.3 + 1j, -0.5 + 3j, 0.05 + 20j, 1 + 0.5j, -1 + 7j, 0.5 + 40j):
                    v = abs(am.mellin_numeric(Q, k, s))
                    for n in range(1, 6):
                        worst = max(worst, v / am.mellin_truncation_bound_explicit(Q, k, s, n))
        assert worst <= 1

    @settings(max_examples=25, deadline=None)
    @given(Q=st.floats(10, 1e5), k=st.floats(0.05, 0.45), t=st.floats(1, 30))
    def test_numeric_against_plain_quadrature(self, Q, k, t):
        s = 0.2 + 1j * t
        lo, hi = (-k - 1) * np.log(Q), (k - 1) * np.log(Q) + np.log(2)
        xs = np.linspace(lo, hi, 400001)
        vals = am.h_window(np.exp(xs), Q, k) * np.exp(s * xs)
        plain = np.trapezoid(vals, xs)
        assert abs(am.mellin_numeric(Q, k, s) - plain) < 1e-5 * max(1, abs(plain))

    def test_bound_order_range(self):
        with pytest.raises(ValueError):
            am.mellin_truncation_bound(1e4, 0.25, 2j, 0)
