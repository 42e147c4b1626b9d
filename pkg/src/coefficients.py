"""
Coefficient field for the series ring.
Exact mode stores numpy object arrays of Fraction, float mode stores float64.
Exact linear algebra goes through sympy, float linear algebra through numpy.linalg.
"""

from contextlib import contextmanager
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Callable, Iterator, Union

import numpy as np
import sympy as sp

from src.errors import NonInvertibleConstantTerm

Scalar = Union[int, Fraction, float]

MODES = ("exact", "float")


@dataclass(frozen=True)
class RingContext:
    """Numerical settings shared by every check of one run."""

    mode: str = "exact"
    tol: float = 1e-9
    condition_bound: float = 1e12
    gap_threshold: float = 1e-8
    entry_range: int = 3

    @property
    def exact(self) -> bool:
        return self.mode == "exact"


_active = RingContext()


def get_context() -> RingContext:
    """Return the context of the current run."""
    return _active


def set_context(ctx: RingContext) -> None:
    """Install the context of the current run."""
    global _active
    _active = ctx


@contextmanager
def using(ctx: RingContext = None, **overrides: Any) -> Iterator[RingContext]:
    """Temporarily install a context (tests and one-off checks)."""
    previous = get_context()
    chosen = replace(ctx or previous, **overrides)
    set_context(chosen)
    try:
        yield chosen
    finally:
        set_context(previous)


def parse_scalar(value: Any, exact: bool) -> Scalar:
    """Parse ints, floats, Fractions and "p/q" strings into the field."""
    if exact:
        if isinstance(value, float):
            return Fraction(value).limit_denominator(10**12)
        return Fraction(value)
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def to_field(value: Scalar, exact: bool) -> Scalar:
    """Coerce a scalar already in numeric form."""
    return Fraction(value) if exact else float(value)


def zeros(d: int, exact: bool) -> np.ndarray:
    if exact:
        return np.full((d, d), Fraction(0), dtype=object)
    return np.zeros((d, d))


def eye(d: int, exact: bool) -> np.ndarray:
    out = zeros(d, exact)
    for i in range(d):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def as_matrix(values: Any, d: int, exact: bool) -> np.ndarray:
    """Build a d x d coefficient matrix from nested lists, arrays or a scalar."""
    if np.isscalar(values) or isinstance(values, Fraction):
        return eye(d, exact) * parse_scalar(values, exact)
    rows = np.asarray(values, dtype=object)
    if rows.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got shape {rows.shape}")
    if exact:
        return np.array([[parse_scalar(x, True) for x in row] for row in rows], dtype=object)
    return np.array([[parse_scalar(x, False) for x in row] for row in rows], dtype=float)


def is_exact(matrix: np.ndarray) -> bool:
    return matrix.dtype == object


def to_sympy(matrix: np.ndarray) -> sp.Matrix:
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in matrix])


def from_sympy(matrix: sp.Matrix) -> np.ndarray:
    rows, cols = matrix.shape
    return np.array(
        [[Fraction(int(matrix[i, j].p), int(matrix[i, j].q)) for j in range(cols)] for i in range(rows)],
        dtype=object,
    )


def determinant(matrix: np.ndarray) -> Scalar:
    if is_exact(matrix):
        value = to_sympy(matrix).det()
        return Fraction(int(value.p), int(value.q))
    return float(np.linalg.det(matrix))


def is_invertible(matrix: np.ndarray, ctx: RingContext = None) -> bool:
    """Exact: nonzero determinant. Float: condition number below the bound."""
    if is_exact(matrix):
        return determinant(matrix) != 0
    ctx = ctx or get_context()
    condition = np.linalg.cond(matrix)
    return bool(np.isfinite(condition) and condition < ctx.condition_bound)


def matrix_inverse(matrix: np.ndarray, ctx: RingContext = None) -> np.ndarray:
    if not is_invertible(matrix, ctx):
        raise NonInvertibleConstantTerm(
            "constant coefficient is not invertible", {"dim": int(matrix.shape[0])}
        )
    if is_exact(matrix):
        return from_sympy(to_sympy(matrix).inv())
    return np.linalg.inv(matrix)


def linear_solver(system: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Factor a square system once and return rhs -> solution."""
    if is_exact(system):
        inverse = from_sympy(to_sympy(system).inv())
        return lambda rhs: inverse @ rhs
    return lambda rhs: np.linalg.solve(system, rhs)


def is_zero_matrix(matrix: np.ndarray, ctx: RingContext = None) -> bool:
    if is_exact(matrix):
        return all(x == 0 for x in matrix.flat)
    ctx = ctx or get_context()
    return bool(np.max(np.abs(matrix), initial=0.0) <= ctx.tol)


def max_abs(matrix: np.ndarray) -> Scalar:
    if is_exact(matrix):
        return max((abs(x) for x in matrix.flat), default=Fraction(0))
    return float(np.max(np.abs(matrix), initial=0.0))


def matrices_equal(x: np.ndarray, y: np.ndarray, ctx: RingContext = None) -> bool:
    return is_zero_matrix(x - y, ctx)


def random_matrix(rng: np.random.Generator, d: int, exact: bool, entry_range: int = 3) -> np.ndarray:
    """Small-integer entries in exact mode, uniform floats otherwise."""
    if exact:
        ints = rng.integers(-entry_range, entry_range + 1, size=(d, d))
        return np.array([[Fraction(int(v)) for v in row] for row in ints], dtype=object)
    return rng.uniform(-entry_range, entry_range, size=(d, d))


def random_invertible_matrix(
    rng: np.random.Generator, d: int, exact: bool, entry_range: int = 3, attempts: int = 100
) -> np.ndarray:
    for _ in range(attempts):
        candidate = random_matrix(rng, d, exact, entry_range)
        if is_invertible(candidate):
            return candidate
    raise NonInvertibleConstantTerm("could not draw an invertible matrix", {"dim": d})


def format_scalar(value: Scalar) -> Union[str, float]:
    """Rationals print as "p/q" strings, floats stay floats."""
    if isinstance(value, Fraction):
        return str(value)
    return float(value)
