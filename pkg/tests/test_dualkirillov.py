import cmath

import numpy as np
import pytest

from gl2local import dualkirillov as dk
from gl2local.localfield import MultChar, UnitChar, all_unit_chars
from gl2local.verify import NON_TEMPERED, _supercuspidal_probe, sample_representations
from gl2local.whittaker import PrincipalOrComplementary, Unramified


def u(th):
    return cmath.exp(1j * th)


def overlap(rep, N, literal=False):
    a = dk.classical_vector_display(rep, N, literal=literal).dense(0, 200)
    b = dk.classical_vector_oracle(rep, N).dense(0, 200)
    return abs(np.sum(a * np.conj(b)))


@pytest.fixture(scope="module", params=[3, 5, 7])
def reps(request):
    return request.param, sample_representations(request.param)


def test_classical_vectors_match_oracle(reps):
    q, table = reps
    for name, rep in table.items():
        c = dk.conductor_of(rep)
        for N in range(c, c + 4):
            assert abs(overlap(rep, N) - 1) < 1e-10, (q, name, N)


def test_matrix_coefficients_closed_vs_vector(reps):
    q, table = reps
    for name, rep in table.items():
        c = dk.conductor_of(rep)
        for N in range(c, c + 3):
            for j in range(-6, 7):
                oracle = abs(dk.matrix_coefficient(rep, N, j, oracle=True))
                assert abs(oracle - dk.matrix_coefficient_closed(rep, N, j)) < 1e-8


def test_tempered_coefficients_below_xi(reps):
    q, table = reps
    for name, rep in table.items():
        if name in NON_TEMPERED:
            continue
        c = dk.conductor_of(rep)
        for N in range(c, c + 3):
            for j in range(-12, 13):
                assert dk.matrix_coefficient_closed(rep, N, j) <= dk.xi_finite(j, q) * (1 + 1e-12)


def test_complementary_series_exceeds_xi():
    rep = sample_representations(5)["comp"]
    assert max(dk.matrix_coefficient_closed(rep, 0, j) / dk.xi_finite(j, 5) for j in range(13)) > 1


def test_coefficient_hermitian_symmetry():
    rep = sample_representations(5)["unr"]
    G = dk.classical_vector_oracle(rep, 1).dense(-20, 200)
    norm = np.sum(np.abs(G) ** 2)
    for j in range(1, 6):
        fwd = np.sum(G[j:] * np.conj(G[:-j])) / norm
        back = np.sum(G[:-j] * np.conj(G[j:])) / norm
        assert abs(back - np.conj(fwd)) < 1e-14
        assert abs(dk.matrix_coefficient(rep, 1, -j) - np.conj(dk.matrix_coefficient(rep, 1, j))) < 1e-14


@pytest.mark.parametrize("q", [3, 5])
def test_supercuspidal_probe_is_a_delta(q):
    rep = _supercuspidal_probe(q)
    for j in range(-5, 6):
        assert abs(dk.matrix_coefficient(rep, 2, j, oracle=True)) == pytest.approx(float(j == 0), abs=1e-12)


def test_equal_character_level_one_sign():
    # 1 - |j| (q-1)/(q+1) goes negative for |j| >= 3 at q = 3; the coefficient modulus is its absolute value
    rep = sample_representations(3)["eq"]
    lit = dk.matrix_coefficient_closed(rep, 1, 3, literal=True)
    assert lit < 0
    assert abs(abs(dk.matrix_coefficient(rep, 1, 3, oracle=True)) - abs(lit)) < 1e-10


@pytest.mark.xfail(strict=True, reason="literal one-ramified constant gives a non-unit overlap")
@pytest.mark.parametrize("q", [3, 5, 7])
def test_literal_one_ramified_vector(q):
    assert abs(overlap(sample_representations(q)["ram1"], 2, literal=True) - 1) < 1e-8


@pytest.mark.parametrize("q", [3, 5])
def test_support_rules_hold(q):
    for rep in sample_representations(q).values():
        c = dk.conductor_of(rep)
        nu0 = dk.central_char(rep).unit_part.inverse()
        for N in range(c, c + 3):
            rule = dk.support_rule(rep, N, nu0)
            assert rule.violations(dk.classical_vector_display(rep, N), upto=150) < 1e-12


def test_support_rule_excludes_deep_characters():
    rep = sample_representations(5)["unr"]
    assert dk.support_rule(rep, 1, UnitChar.make(5, 2, 1)) is None


@pytest.mark.parametrize("q", [3, 5])
def test_c_function_functional_equation(q):
    # C(nu, t) C(nu', 1/(z0 t)) = eps0(-1)
    for name, rep in sample_representations(q).items():
        if name == "comp":
            continue
        z0 = complex(dk.central_char(rep).at_uniformizer)
        sign = dk.central_char(rep).unit_part(q**4 - 1)
        for nu in all_unit_chars(q, 2):
            nu2 = dk.weyl_partner(rep, nu)
            for th in np.linspace(0.1, 6, 7):
                t = u(th)
                prod = dk.c_data(rep, nu).evaluate(t) * dk.c_data(rep, nu2).evaluate(1 / (z0 * t))
                assert abs(prod - sign) < 1e-12


@pytest.mark.parametrize("q", [3, 5])
def test_weyl_action_is_isometric(q):
    for name, rep in sample_representations(q).items():
        if name == "comp":
            continue
        F = dk.classical_vector(rep, dk.conductor_of(rep))
        assert abs(dk.weyl_action(F, rep).norm_sq() - F.norm_sq()) < 1e-12


def test_spherical_vector_is_weyl_fixed():
    rep = Unramified(u(0.4), u(1.9), 5)
    F = dk.classical_vector(rep, 0)
    wF = dk.weyl_action(F, rep)
    tr = UnitChar.trivial(5)
    assert np.max(np.abs(wF[tr].dense(0, 150) - F[tr].dense(0, 150))) < 1e-14
    assert np.max(np.abs(wF[tr].dense(-150, -1))) < 1e-14


def test_diag_action_shifts_and_twists():
    rep = sample_representations(5)["unr"]
    F = dk.classical_vector(rep, 0)
    G = dk.diag_action(F, 1, 2)
    tr = UnitChar.trivial(5)
    assert G[tr][1] == F[tr][3]
    assert abs(G.norm_sq() - F.norm_sq()) < 1e-14


class TestBranching:
    def test_unramified_n2(self):
        assert dk.branching_dimension(MultChar.unramified(3, 1.0), MultChar.unramified(3, 1.0), 2) == 3

    def test_ratio_of_level_one(self):
        mu1, mu2 = MultChar(UnitChar.make(3, 1, 1)), MultChar(UnitChar.trivial(3))
        assert dk.branching_dimension(mu1, mu2, 1) == 1

    def test_below_conductor_rejected(self):
        with pytest.raises(ValueError):
            dk.branching_dimension(MultChar(UnitChar.make(5, 2, 1)), MultChar(UnitChar.trivial(5)), 1)

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_formula_matches_mackey_count(self, N):
        for c1, c2 in dk.character_pairs(3, 2):
            if max(c1.level, c2.level) > N:
                continue
            o = dk.branching_oracle(c1, c2, N, check_mass=True)
            assert o["mass_ok"]
            assert o["dimension"] == dk.branching_dimension(MultChar(c1), MultChar(c2), N)

    def test_mackey_count_at_p5(self):
        for c1, c2 in dk.character_pairs(5, 1):
            o = dk.branching_oracle(c1, c2, 1, check_mass=True)
            assert o["mass_ok"]
            assert o["dimension"] == dk.branching_dimension(MultChar(c1), MultChar(c2), 1)


class TestLaurent:
    def test_window_error(self):
        with pytest.raises(dk.WindowError):
            dk.matrix_coefficient(sample_representations(3)["unr"], 0, 500)

    def test_unramified_principal_series_has_conductor_zero(self):
        rep = PrincipalOrComplementary(MultChar.unramified(5, u(0.2)), MultChar.unramified(5, u(-0.2)))
        assert dk.conductor_of(rep) == 0
