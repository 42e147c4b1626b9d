from fractions import Fraction

import pytest
import sympy as sp

from src import coefficients as cf
from src.errors import DimensionMismatch, InconsistentParameters, NonInvertiblePivot
from src.painleve import (
    AlphaParams,
    BTransform,
    Direction,
    Generator,
    RELATIONS,
    ScalarP4Data,
    admissible_kappa_initial_data,
    admissible_scalar_initial_data,
    backlund_apply,
    construct_p4_from_toda,
    kappa_condition_residuals,
    p4_residual,
    p4_solve_series,
    scalar_p4_residual,
    scalar_zn,
    solve_kappa_conditions,
    states_equal,
    third_condition_residual,
    translation_apply,
    transpose_state,
    weyl_relation_check,
)
from src.toda import build_toda_chain, scalar_kappa_chain

from conftest import ALPHAS, first_good, solved_state


def _zero(residuals):
    return all(r.is_zero() for r in residuals)


# ------------------------------------------------------------------ parameters
def test_alpha_params():
    alphas = AlphaParams.of(["1/2", 0.25, Fraction(1, 4)])
    assert alphas.as_tuple() == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
    assert alphas.validate() is alphas
    assert alphas[3] == alphas[0]
    assert alphas.lattice_shift(2) == AlphaParams(Fraction(5, 2), Fraction(-7, 4), Fraction(1, 4))


def test_alpha_params_reject_bad_input():
    with pytest.raises(InconsistentParameters):
        AlphaParams.of([1, 0])
    with pytest.raises(InconsistentParameters):
        AlphaParams.of([1, 1, 0]).validate()
    assert AlphaParams.of([1, -1, 0]).validate(lotka_volterra=True).total == 0


# ------------------------------------------------------------------ solver
@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("a", [1, 0, Fraction(1, 2)])
def test_solver_output_satisfies_the_system(dim, a):
    state = solved_state(dim, 7, zero_integral=False, a=a)
    assert state.order == 7
    assert state.a_param == a
    assert _zero(p4_residual(state))


def test_first_integral_is_conserved():
    state = solved_state(2, 8, zero_integral=False)
    assert state.first_integral().deriv().is_zero()
    assert ((state.f0 + state.f1 + state.f2).deriv() - 1).is_zero()
    assert solved_state(2, 8).first_integral().is_zero()


def test_lotka_volterra_first_integral_is_constant():
    lv = AlphaParams.of(["1/2", "-1/3", "-1/6"])
    state = solved_state(2, 7, alphas=lv, zero_integral=False)
    assert _zero(p4_residual(state))
    assert (state.f0 + state.f1 + state.f2).deriv().is_zero()


@pytest.mark.parametrize("a", [1, 0, Fraction(1, 3)])
def test_transpose_maps_a_to_one_minus_a(a):
    state = solved_state(3, 6, zero_integral=False, a=a)
    image = transpose_state(state)
    assert image.a_param == 1 - Fraction(a)
    assert _zero(p4_residual(image))


def test_solver_accepts_scalar_initial_values():
    state = p4_solve_series(2, 3, -5, ALPHAS, order=5, exact=True)
    assert state.dim == 1
    assert _zero(p4_residual(state))


# ------------------------------------------------------------------ Backlund group
def test_word_parsing_and_inverse():
    word = BTransform.parse("s1 pi s2")
    assert word.word == (Generator.S1, Generator.PI, Generator.S2)
    assert str(word) == "s1 pi s2"
    assert str(BTransform()) == "id"
    assert (word * word.inverse()).is_identity_word()
    assert (BTransform.parse("pi s2 s1") ** -2 * BTransform.parse("pi s2 s1") ** 2).is_identity_word()


@pytest.mark.parametrize("name, lhs, rhs", RELATIONS, ids=[r[0] for r in RELATIONS])
def test_relations_normalize_to_the_same_word(name, lhs, rhs):
    assert (lhs * rhs.inverse()).is_identity_word()
    assert lhs.same_element(rhs)


def test_braid_words_reduce():
    assert BTransform.parse("s0 s1 s0").same_element(BTransform.parse("s1 s0 s1"))
    assert BTransform.parse("s1 s2 s1 s2 s1 s2").is_identity_word()
    assert not BTransform.parse("s0 s1").same_element(BTransform.parse("s1 s0"))


@pytest.mark.parametrize("text", ["s0", "pi", "pi pi", "s0 s1", "s0 s1 s0", "pi s2 s1", "pi s2 s1 pi s2 s1"])
def test_nontrivial_words_are_not_identity(text):
    assert not BTransform.parse(text).is_identity_word()


@pytest.mark.parametrize("text", ["s0", "s1", "s2", "pi", "s1 pi", "pi s1"])
def test_normalized_map_matches_the_parameter_action(text):
    state = solved_state(1, 5)
    word = BTransform.parse(text)
    expected = word.normalized() * sp.Matrix(state.alphas.as_tuple())
    assert list(expected) == list(backlund_apply(word, state).alphas.as_tuple())


@pytest.mark.parametrize("dim", [1, 2])
def test_weyl_relations_hold_on_states(dim):
    report = weyl_relation_check(solved_state(dim, 7))
    failed = [r.name for r in report.relations if not r.passed]
    assert failed == []
    assert len(report.relations) == len(RELATIONS)
    assert all(len(r.residuals) == 3 and _zero(r.residuals) for r in report.relations)
    assert report.passed


@pytest.mark.parametrize("generator", list(Generator))
def test_generators_map_solutions_to_solutions(generator):
    state = solved_state(2, 7)
    image = backlund_apply(generator, state)
    assert _zero(p4_residual(image))
    assert image.alphas.total == 1


def test_generator_parameter_action():
    state = solved_state(1, 5)
    a0, a1, a2 = ALPHAS.as_tuple()
    assert backlund_apply("s0", state).alphas.as_tuple() == (-a0, a1 + a0, a2 + a0)
    assert backlund_apply("pi", state).alphas.as_tuple() == (a1, a2, a0)
    assert backlund_apply("pi", state).f0.identical(state.f1)


@pytest.mark.parametrize(
    "index, shift",
    [(1, (1, -1, 0)), (2, (0, 1, -1)), (3, (-1, 0, 1))],
)
def test_translations_shift_the_parameters(index, shift):
    state = solved_state(2, 8)
    image = translation_apply(index, 1, state)
    assert image.alphas.as_tuple() == tuple(a + s for a, s in zip(ALPHAS.as_tuple(), shift))
    assert _zero(p4_residual(image))


def test_translation_inverse_restores_the_state():
    state = solved_state(2, 8)
    back = translation_apply(1, -1, translation_apply(1, 1, state))
    assert states_equal(back, state)


def test_zero_alpha_generator_is_the_identity_on_f():
    alphas = AlphaParams.of([0, "1/2", "1/2"])
    state = solved_state(2, 5, alphas=alphas)
    image = backlund_apply("s0", state)
    assert all(f.identical(g) for f, g in zip(image.fs, state.fs))


def test_singular_pivot_is_reported():
    zero = cf.zeros(2, True)
    one = cf.eye(2, True)
    state = p4_solve_series(-one, zero, one, ALPHAS, order=4, exact=True)
    with pytest.raises(NonInvertiblePivot):
        backlund_apply("s1", state)


# ------------------------------------------------------------------ scalar P4
def test_f2_solves_the_scalar_equation():
    state = solved_state(1, 10)
    assert scalar_p4_residual(state.f2, 0, ALPHAS).is_zero()


def test_t1_image_solves_the_next_scalar_equation():
    image = translation_apply(1, 1, solved_state(1, 10))
    assert scalar_p4_residual(image.f2, 1, ALPHAS).is_zero()
    assert scalar_p4_residual(image.f2, 0, image.alphas).is_zero()


def test_scalar_equation_needs_d1():
    with pytest.raises(DimensionMismatch):
        scalar_p4_residual(solved_state(2, 5).f2, 0, ALPHAS)


# ------------------------------------------------------------------ kappa conditions
@pytest.mark.parametrize("dim", [1, 2])
def test_kappa_conditions_are_solved(dim):
    kappa1, kappa_m1 = first_good(
        lambda rng: solve_kappa_conditions(
            cf.random_invertible_matrix(rng, dim, True),
            cf.random_matrix(rng, dim, True),
            cf.random_invertible_matrix(rng, dim, True),
            cf.random_matrix(rng, dim, True),
            ALPHAS,
            8,
            exact=True,
        )
    )
    assert kappa1.order == 8
    assert _zero(kappa_condition_residuals(kappa1, kappa_m1, ALPHAS))


def test_third_condition_is_a_first_integral():
    kappa1, kappa_m1 = solve_kappa_conditions(2, 1, 3, -1, ALPHAS, 9, exact=True)
    residual = third_condition_residual(kappa1, kappa_m1, ALPHAS)
    assert not residual.is_zero()
    assert residual.deriv().is_zero()


def _admissible(order=10):
    dkm = admissible_scalar_initial_data(2, 1, 3, ALPHAS)
    return solve_kappa_conditions(2, 1, 3, dkm, ALPHAS, order, exact=True)


def test_admissible_data_satisfies_the_third_condition():
    kappa1, kappa_m1 = _admissible()
    assert third_condition_residual(kappa1, kappa_m1, ALPHAS).is_zero()
    with pytest.raises(InconsistentParameters):
        admissible_scalar_initial_data(2, 0, 3, ALPHAS)


def test_scalar_system_at_n0():
    kappa1, kappa_m1 = _admissible()
    zn = scalar_zn(scalar_kappa_chain(kappa1, kappa_m1, 2), 0, ALPHAS)
    assert zn.y_system_residual().is_zero()
    assert zn.z_condition_residual().is_zero()
    assert scalar_p4_residual(zn.y, 0, ALPHAS).is_zero()


def test_y_system_needs_only_the_kappa1_condition():
    kappa1, kappa_m1 = solve_kappa_conditions(2, 1, 3, -1, ALPHAS, 9, exact=True)
    zn = scalar_zn(scalar_kappa_chain(kappa1, kappa_m1, 2), 0, ALPHAS)
    assert zn.y_system_residual().is_zero()


def test_negative_residuals_need_the_previous_y():
    kappa1, kappa_m1 = _admissible(6)
    zn = ScalarP4Data(kappa1, kappa_m1, 0, ALPHAS)
    with pytest.raises(ValueError):
        zn.y_system_residual_negative()


# ------------------------------------------------------------------ Toda -> P4
INDICES = [(0, Direction.POSITIVE), (1, Direction.POSITIVE), (0, Direction.NEGATIVE), (-1, Direction.NEGATIVE)]


def _constructions(dim, order=10):
    def build(rng):
        diagonal = [tuple(cf.random_invertible_matrix(rng, 1, True)[0, 0] for _ in range(3)) for _ in range(dim)]
        conjugator = cf.random_invertible_matrix(rng, dim, True) if dim > 1 else None
        initial = admissible_kappa_initial_data(diagonal, ALPHAS, conjugator, exact=True)
        kappa1, kappa_m1 = solve_kappa_conditions(*initial, ALPHAS, order, exact=True)
        chain = build_toda_chain(kappa1, kappa_m1, 3, 3)
        return chain, {key: construct_p4_from_toda(chain, key[0], key[1], ALPHAS) for key in INDICES}

    return first_good(build)


@pytest.mark.parametrize("dim", [1, 2])
def test_toda_chain_produces_p4_solutions(dim):
    _, built = _constructions(dim)
    for (n, direction), (state, bundle) in built.items():
        assert set(bundle.orders()) == {"toda", "condition", "constraint", "sylvester"}
        assert bundle.holds(), (n, direction, bundle.orders())
        residuals = p4_residual(state)
        assert min(r.order for r in residuals) >= 5
        assert all(r.is_zero() for r in residuals), (n, direction)
        assert state.first_integral().is_zero()


def test_conjugated_admissible_data():
    p = [[1, 2], [0, 1]]
    k1, dk1, km, dkm = admissible_kappa_initial_data([(2, 1, 3), (1, -1, 2)], ALPHAS, p, exact=True)
    assert k1[0, 1] != 0
    kappa1, kappa_m1 = solve_kappa_conditions(k1, dk1, km, dkm, ALPHAS, 8, exact=True)
    assert all(r.is_zero() for r in kappa_condition_residuals(kappa1, kappa_m1, ALPHAS))
    state, bundle = construct_p4_from_toda(build_toda_chain(kappa1, kappa_m1, 2, 2), 0, Direction.POSITIVE, ALPHAS)
    assert bundle.holds()
    assert state.f1.coefficient(0)[0, 1] != 0
    assert all(r.is_zero() for r in p4_residual(state))


def test_constraint_hypothesis_fails_on_free_data():
    # kappa_-1'(0) off the admissible value breaks the f1 equation at t^0
    dkm = admissible_scalar_initial_data(2, 1, 3, ALPHAS) + 1
    kappa1, kappa_m1 = solve_kappa_conditions(2, 1, 3, dkm, ALPHAS, 8, exact=True)
    state, bundle = construct_p4_from_toda(build_toda_chain(kappa1, kappa_m1, 2, 2), 0, Direction.POSITIVE, ALPHAS)
    assert not bundle.holds()
    assert not all(r.is_zero() for r in p4_residual(state))


def test_construction_parameters():
    _, built = _constructions(1)
    assert built[(1, Direction.POSITIVE)][0].alphas == ALPHAS.lattice_shift(1)
    assert built[(-1, Direction.NEGATIVE)][0].alphas == ALPHAS.lattice_shift(-2)


def test_constructed_f2_is_the_scalar_y():
    chain, built = _constructions(1)
    state, _ = built[(0, Direction.POSITIVE)]
    zn = scalar_zn(scalar_kappa_chain(chain.kappa1, chain.kappa_m1, 2), 0, ALPHAS)
    assert state.f2.equals(zn.y)
