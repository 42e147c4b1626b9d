import itertools
from fractions import Fraction

import numpy as np
import pytest

from src import coefficients as cf
from src.errors import DimensionMismatch, UnassignedSymbol
from src.ham import (
    WordPoly,
    canonical_substitution,
    check_canonical_equations,
    cyclic_gradient,
    eval_word_poly,
    nc_hamiltonian_f,
    nc_hamiltonian_qpt,
    poisson_bracket,
    scalar_hamiltonians,
    scalar_poisson_check,
    substitute,
    trace_gradient_discrepancy,
)

from conftest import ALPHAS, random_series, solved_state


def test_parse_merges_terms():
    poly = WordPoly.parse("2 p q - 1/3 t + q + p q")
    assert poly.terms == {("p", "q"): 3, ("q",): 1, ("t",): Fraction(-1, 3)}
    assert poly.symbols() == ("p", "q", "t")
    assert (poly - poly).is_zero()


def test_product_is_noncommutative():
    p, q = WordPoly.symbol("p"), WordPoly.symbol("q")
    assert p * q != q * p
    assert (p * q - q * p).commutative().is_zero()
    assert (2 * p + 1).terms == {("p",): 2, (): 1}


def test_central_symbols_move_to_the_front():
    poly = WordPoly.parse("q t - t q + p t q")
    assert poly.central(["t"]) == WordPoly.parse("t p q")


def test_cyclic_gradient_rotates_each_occurrence():
    assert cyclic_gradient(WordPoly.parse("q p q"), "q") == WordPoly.parse("p q + q p")
    assert cyclic_gradient(WordPoly.parse("3 p"), "p") == WordPoly.constant(3)
    assert cyclic_gradient(WordPoly.parse("p p"), "q").is_zero()


def test_hamiltonian_gradients():
    ham = nc_hamiltonian_qpt(ALPHAS)
    dp = cyclic_gradient(ham, "p").central(["t"])
    dq = cyclic_gradient(ham, "q").central(["t"])
    assert dp == (WordPoly.parse("- q q - q p - p q + t q") - ALPHAS.a1).central(["t"])
    assert dq == (WordPoly.parse("- p p - p q - q p + t p") + ALPHAS.a2).central(["t"])


def test_substitution_gives_the_canonical_hamiltonian():
    lhs = substitute(nc_hamiltonian_f(1, 1, ALPHAS), canonical_substitution())
    assert lhs == nc_hamiltonian_qpt(ALPHAS)


@pytest.mark.parametrize("a0, a1", [(1, 1), (0, 0), (Fraction(1, 2), Fraction(1, 3)), (2, -1)])
def test_commutative_cubic_part_is_f0_f1_f2(a0, a1):
    ham = nc_hamiltonian_f(a0, a1, ALPHAS).commutative()
    assert ham.terms[("f0", "f1", "f2")] == 1


def test_scalar_hamiltonians_share_the_cubic_term():
    h0, h1, h2 = scalar_hamiltonians(ALPHAS)
    for h in (h1, h2):
        assert all(len(w) == 1 for w in (h0 - h).terms)


def test_poisson_bracket_of_coordinates():
    f0, f1, f2 = (WordPoly.symbol(s) for s in ("f0", "f1", "f2"))
    assert poisson_bracket(f0, f1) == WordPoly.constant(1)
    assert poisson_bracket(f1, f0) == WordPoly.constant(-1)
    assert poisson_bracket(f2, f2).is_zero()


def test_eval_on_series(rng):
    q, p = random_series(rng, 2, 5), random_series(rng, 2, 5)
    value = eval_word_poly(WordPoly.parse("2 q p - 1"), {"q": q, "p": p})
    assert value.equals(2 * (q * p) - 1)


def test_eval_needs_every_symbol(rng):
    with pytest.raises(UnassignedSymbol):
        eval_word_poly(WordPoly.parse("q p"), {"q": random_series(rng, 1, 3)})


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_canonical_equations(dim):
    residuals = check_canonical_equations(solved_state(dim, 7))
    assert residuals.q.is_zero()
    assert residuals.p.is_zero()


def test_canonical_equations_with_model_time():
    residuals = check_canonical_equations(solved_state(2, 7), bind_time="t")
    assert residuals.vanishing_order() == 7


def test_poisson_flow_in_the_scalar_case():
    assert all(r.is_zero() for r in scalar_poisson_check(solved_state(1, 7, zero_integral=False)))
    with pytest.raises(DimensionMismatch):
        scalar_poisson_check(solved_state(2, 4))


def _words(max_length=4):
    for length in range(1, max_length + 1):
        for word in itertools.product("qp", repeat=length):
            yield WordPoly({tuple(word): 1}), sorted(set(word))


def test_trace_gradient_exact(rng):
    q, p, e = (cf.random_matrix(rng, 2, True) for _ in range(3))
    for poly, symbols in _words(3):
        for x in symbols:
            assert trace_gradient_discrepancy(poly, x, {"q": q, "p": p}, e) == 0


def test_trace_gradient_float():
    rng = np.random.default_rng(5)
    q, p, e = (cf.random_matrix(rng, 3, False) for _ in range(3))
    for poly, symbols in _words():
        for x in symbols:
            assert trace_gradient_discrepancy(poly, x, {"q": q, "p": p}, e) < 1e-6
