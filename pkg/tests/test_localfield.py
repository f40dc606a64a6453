import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gl2local.localfield import (
    AddChar,
    FiniteLocalField,
    LocalElement,
    MultChar,
    UnitChar,
    add_char_eval,
    all_unit_chars,
    char_eval,
    conductor,
    unit_rep_ints,
    unit_reps,
)

PRIMES = [3, 5, 7, 11, 13]


class TestField:
    def test_rejects_two_and_composites(self):
        for bad in (2, 4, 9, 1):
            with pytest.raises(ValueError):
                FiniteLocalField(bad)

    def test_rejects_bad_precision(self):
        with pytest.raises(ValueError):
            FiniteLocalField(5, prec=0)
        with pytest.raises(ValueError):
            FiniteLocalField(5, d=-1)

    def test_element_from_fraction(self):
        f = FiniteLocalField(5, prec=3)
        x = f.element(Fraction(2, 25))
        assert (x.val, x.unit) == (-2, 2)
        assert f.element(0).is_zero

    def test_unit_part_must_be_prime_to_p(self):
        with pytest.raises(ValueError):
            LocalElement(FiniteLocalField(5), 0, 10)


@pytest.mark.parametrize("p,level,count", [(5, 1, 4), (3, 2, 6), (7, 2, 42)])
def test_unit_rep_counts(p, level, count):
    reps = unit_reps(FiniteLocalField(p, prec=3), level)
    assert len(reps) == count
    assert all(r.val == 0 for r in reps)


def test_unit_reps_mod_49_product_is_minus_one():
    # Wilson's theorem for the cyclic group (Z/49)^x
    prod = 1
    for u in unit_rep_ints(7, 2):
        prod = prod * int(u) % 49
    assert prod == 49 - 1


def test_unit_reps_level_out_of_range():
    with pytest.raises(ValueError):
        unit_reps(FiniteLocalField(5, prec=2), 3)


class TestCharacters:
    def test_trivial_character(self):
        f = FiniteLocalField(5, prec=3)
        chi = MultChar(UnitChar.trivial(5))
        assert char_eval(chi, LocalElement(f, 3, 7)) == 1

    def test_abs_power(self):
        # |.|^s has value q^-s at the uniformizer
        q, s = 5, 0.3 + 1.1j
        chi = MultChar.unramified(q, q ** (-s))
        x = FiniteLocalField(q).uniformizer_power(2)
        assert abs(char_eval(chi, x) - q ** (-2 * s)) < 1e-14

    def test_quadratic_mod5_at_two(self):
        assert abs(UnitChar.quadratic(5)(2) + 1) < 1e-14

    def test_non_unit_argument(self):
        with pytest.raises(ValueError):
            UnitChar.make(5, 1, 1)(10)

    @pytest.mark.parametrize("p", [3, 5, 7])
    @pytest.mark.parametrize("level", [1, 2])
    def test_orthogonality(self, p, level):
        u = unit_rep_ints(p, level)
        for chi in all_unit_chars(p, level):
            s = np.sum(chi.values(u))
            expected = len(u) if chi.level == 0 else 0
            assert abs(s - expected) < 1e-10

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_values_are_roots_of_unity(self, p):
        u = unit_rep_ints(p, 2)
        for chi in all_unit_chars(p, 2):
            order = (p - 1) * p ** max(chi.level - 1, 0) if chi.level else 1
            assert np.allclose(chi.values(u) ** order, 1, atol=1e-9)

    def test_all_unit_chars_distinct(self):
        chars = all_unit_chars(5, 2)
        assert len(set(chars)) == len(chars) == 20

    def test_make_reduces_level(self):
        chi = UnitChar.make(5, 2, 5)  # trivial on 1 + 5 Z_5
        assert chi.level == 1
        assert conductor(chi) == 1


class TestConductor:
    def test_trivial(self):
        assert conductor(UnitChar.trivial(7)) == 0

    def test_quadratic_mod5(self):
        assert conductor(UnitChar.quadratic(5)) == 1

    def test_order_three_mod_49_has_conductor_one(self):
        # 1 + 7Z has order 7 in (Z/49)^x, so no order-3 character sees it
        for a in (14, 28):
            chi = UnitChar.make(7, 2, a)
            assert chi.order == 3
            assert conductor(chi) == 1

    def test_order_21_mod_49(self):
        chi = UnitChar.make(7, 2, 2)
        assert chi.order == 21
        assert conductor(chi) == 2

    @pytest.mark.parametrize("p", PRIMES)
    def test_scan_matches_stored_level(self, p):
        top = 4 if p <= 5 else 2
        for chi in all_unit_chars(p, top):
            assert conductor(chi) == chi.level


class TestAdditive:
    def test_integral_elements_trivial(self):
        psi = AddChar(FiniteLocalField(5, 0, 3))
        assert add_char_eval(psi, LocalElement(psi.field, 1, 3)) == 1

    def test_one_fifth(self):
        f = FiniteLocalField(5, 0, 3)
        assert abs(AddChar(f)(f.element(Fraction(1, 5)))
                   - cmath.exp(2j * math.pi / 5)) < 1e-14

    def test_shifted_conductor(self):
        f = FiniteLocalField(3, 1, 4)
        x = f.element(Fraction(1, 9))
        assert abs(AddChar(f)(x) - cmath.exp(2j * math.pi / 3)) < 1e-14


def _random_element(rng, f):
    return LocalElement(f, rng.randint(-2, 2), rng.choice([u for u in range(1, f.modulus) if u % f.p]))


def test_multiplicativity_random_pairs():
    rng = random.Random(0)
    f = FiniteLocalField(7, prec=3)
    chi = MultChar(UnitChar.make(7, 2, 5), cmath.exp(0.4j))
    for _ in range(1000):
        x, y = _random_element(rng, f), _random_element(rng, f)
        assert abs(char_eval(chi, x * y) - char_eval(chi, x) * char_eval(chi, y)) < 1e-12


def test_additivity_random_pairs():
    rng = random.Random(1)
    f = FiniteLocalField(5, 1, 6)
    psi = AddChar(f)
    for _ in range(1000):
        x, y = _random_element(rng, f), _random_element(rng, f)
        assert abs(psi(x + y) - psi(x) * psi(y)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from([3, 5, 7]), a=st.integers(0, 200), b=st.integers(0, 200))
def test_character_product_is_pointwise(p, a, b):
    c1, c2 = UnitChar.make(p, 2, a), UnitChar.make(p, 2, b)
    u = unit_rep_ints(p, 2)
    assert np.allclose((c1 * c2).values(u), c1.values(u) * c2.values(u), atol=1e-12)
    assert np.allclose((c1 * c1.inverse()).values(u), 1, atol=1e-12)
