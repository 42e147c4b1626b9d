from fractions import Fraction

import numpy as np
import pytest

from src import coefficients as cf
from src.errors import DimensionMismatch, NonInvertibleConstantTerm, SpectralCollision
from src.ring import SeriesElement, commutator, spectral_gap, sylvester_solve

from conftest import random_series


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_inverse_is_two_sided(rng, dim):
    x = random_series(rng, dim, 8, invertible=True)
    x_inv = x.inv()
    assert (x * x_inv - 1).is_zero()
    assert (x_inv * x - 1).is_zero()


def test_inverse_of_singular_constant_term_raises():
    x = SeriesElement.constant(cf.zeros(2, True), 4)
    with pytest.raises(NonInvertibleConstantTerm):
        x.inv()


def test_inverse_without_reliable_coefficients_raises():
    x = SeriesElement.one(2, 0).deriv()
    assert x.order == -1
    with pytest.raises(NonInvertibleConstantTerm) as info:
        x.inv()
    assert info.value.details == {"order": -1}


@pytest.mark.parametrize("dim, order", [(1, 6), (2, 8), (3, 5)])
def test_leibniz_and_associativity(rng, dim, order):
    x, y, z = (random_series(rng, dim, order) for _ in range(3))
    assert ((x * y).deriv() - x.deriv() * y - x * y.deriv()).is_zero()
    assert ((x * y) * z - x * (y * z)).is_zero()


def test_derivative_of_t_is_one():
    t = SeriesElement.t(2, 6)
    assert t.deriv().equals(SeriesElement.one(2, 5))
    assert t.deriv().order == 5


def test_reliable_order_is_the_minimum_of_the_operands(rng):
    x = random_series(rng, 2, 8)
    y = random_series(rng, 2, 5)
    assert (x * y).order == 5
    assert (x + y.deriv()).order == 4


def test_vanishing_order():
    m = cf.as_matrix([[1, 0], [0, 2]], 2, True)
    z = cf.zeros(2, True)
    assert SeriesElement([z, z, m, z]).vanishing_order() == 2
    assert SeriesElement.zero(2, 4).vanishing_order() == 5


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        SeriesElement.one(1, 3) + SeriesElement.one(2, 3)


def test_scalar_coercion(rng):
    x = random_series(rng, 2, 5)
    assert ((x + 2) - x).equals(SeriesElement.scalar(2, 2, 5))
    assert (3 * x - x * 3).is_zero()
    assert (Fraction(1, 2) * x + Fraction(1, 2) * x - x).is_zero()


def test_float_mode_zero_uses_tolerance():
    with cf.using(mode="float", tol=1e-9):
        tiny = SeriesElement([np.array([[1e-12]]), np.array([[0.0]])])
        assert tiny.is_zero()
        assert not SeriesElement([np.array([[1e-3]])]).is_zero()


def test_commutator_vanishes_for_scalars(rng):
    x, y = random_series(rng, 1, 6), random_series(rng, 1, 6)
    assert commutator(x, y).is_zero()


def test_transpose_reverses_products(rng):
    x, y = random_series(rng, 3, 4), random_series(rng, 3, 4)
    assert (x * y).transpose().equals(y.transpose() * x.transpose())


def test_max_abs_by_order_is_exact(rng):
    x = random_series(rng, 2, 3)
    values = x.max_abs_by_order()
    assert len(values) == 4
    assert all(isinstance(v, Fraction) for v in values)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_sylvester_solve(rng, dim):
    shift = dim * 3 + 1
    a = random_series(rng, dim, 6) + shift
    b = random_series(rng, dim, 6) + shift
    s = random_series(rng, dim, 6)
    x = sylvester_solve(a, b, s)
    assert (a * x + x * b - s).is_zero()


def test_sylvester_spectral_collision():
    one = SeriesElement.one(2, 4)
    assert spectral_gap(one.constant_term(), (-one).constant_term()).value == 0
    with pytest.raises(SpectralCollision):
        sylvester_solve(one, -one, one)
