"""
The differential ring: truncated power series in t with d x d matrix coefficients.

Each SeriesElement knows the highest order it is reliable to. Arithmetic keeps
the minimum of its operands and the derivation lowers it by one.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src import coefficients as cf
from src.errors import DimensionMismatch, NonInvertibleConstantTerm, SpectralCollision


class SeriesElement:
    """Immutable truncated series sum_{k<=N} C_k t^k."""

    __slots__ = ("_coeffs", "_dim", "_exact")

    def __init__(self, coeffs: Sequence[np.ndarray], dim: Optional[int] = None, exact: Optional[bool] = None):
        frozen = []
        for c in coeffs:
            arr = np.array(c, dtype=object if cf.is_exact(np.asarray(c)) else float, copy=True)
            arr.setflags(write=False)
            frozen.append(arr)
        if frozen:
            dim = frozen[0].shape[0]
            exact = cf.is_exact(frozen[0])
            if any(c.shape != (dim, dim) for c in frozen):
                raise DimensionMismatch("coefficient matrices must share one dimension")
        elif dim is None:
            raise ValueError("an empty series needs an explicit dimension")
        self._coeffs: Tuple[np.ndarray, ...] = tuple(frozen)
        self._dim = int(dim)
        self._exact = cf.get_context().exact if exact is None else bool(exact)

    # ------------------------------------------------------------------ builders
    @classmethod
    def _raw(cls, coeffs: List[np.ndarray], dim: int, exact: bool) -> "SeriesElement":
        obj = cls.__new__(cls)
        for c in coeffs:
            c.setflags(write=False)
        obj._coeffs = tuple(coeffs)
        obj._dim = dim
        obj._exact = exact
        return obj

    @classmethod
    def constant(cls, matrix: np.ndarray, order: int) -> "SeriesElement":
        matrix = np.asarray(matrix)
        exact = cf.is_exact(matrix)
        d = matrix.shape[0]
        coeffs = [np.array(matrix, copy=True)] + [cf.zeros(d, exact) for _ in range(order)]
        return cls._raw(coeffs, d, exact)

    @classmethod
    def scalar(cls, value: Number, dim: int, order: int, exact: Optional[bool] = None) -> "SeriesElement":
        exact = cf.get_context().exact if exact is None else exact
        return cls.constant(cf.eye(dim, exact) * cf.to_field(value, exact), order)

    @classmethod
    def zero(cls, dim: int, order: int, exact: Optional[bool] = None) -> "SeriesElement":
        return cls.scalar(0, dim, order, exact)

    @classmethod
    def one(cls, dim: int, order: int, exact: Optional[bool] = None) -> "SeriesElement":
        return cls.scalar(1, dim, order, exact)

    @classmethod
    def t(cls, dim: int, order: int, exact: Optional[bool] = None) -> "SeriesElement":
        """The independent variable: C_1 = identity, everything else zero."""
        exact = cf.get_context().exact if exact is None else exact
        coeffs = [cf.zeros(dim, exact) for _ in range(order + 1)]
        if order >= 1:
            coeffs[1] = cf.eye(dim, exact)
        return cls._raw(coeffs, dim, exact)

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        dim: int,
        order: int,
        exact: Optional[bool] = None,
        entry_range: Optional[int] = None,
        invertible: bool = False,
    ) -> "SeriesElement":
        ctx = cf.get_context()
        exact = ctx.exact if exact is None else exact
        entry_range = ctx.entry_range if entry_range is None else entry_range
        first = (
            cf.random_invertible_matrix(rng, dim, exact, entry_range)
            if invertible
            else cf.random_matrix(rng, dim, exact, entry_range)
        )
        rest = [cf.random_matrix(rng, dim, exact, entry_range) for _ in range(order)]
        return cls._raw([first] + rest, dim, exact)

    def like_scalar(self, value: Number) -> "SeriesElement":
        return SeriesElement.scalar(value, self._dim, self.order, self._exact)

    # ------------------------------------------------------------------ properties
    @property
    def coeffs(self) -> Tuple[np.ndarray, ...]:
        return self._coeffs

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def order(self) -> int:
        """Reliable truncation order N (-1 once nothing is known)."""
        return len(self._coeffs) - 1

    @property
    def exact(self) -> bool:
        return self._exact

    def coefficient(self, k: int) -> np.ndarray:
        return self._coeffs[k]

    def constant_term(self) -> np.ndarray:
        return self._coeffs[0]

    # ------------------------------------------------------------------ ring structure
    def _check(self, other: "SeriesElement") -> int:
        if other._dim != self._dim:
            raise DimensionMismatch(
                f"dimension mismatch: {self._dim} vs {other._dim}",
                {"left": self._dim, "right": other._dim},
            )
        return min(self.order, other.order)

    def _coerce(self, other: Union["SeriesElement", Number]) -> "SeriesElement":
        if isinstance(other, SeriesElement):
            return other
        if isinstance(other, (Number, Fraction)):
            return self.like_scalar(other)
        return NotImplemented

    def add(self, other: "SeriesElement") -> "SeriesElement":
        n = self._check(other)
        return SeriesElement._raw(
            [self._coeffs[k] + other._coeffs[k] for k in range(n + 1)], self._dim, self._exact
        )

    def sub(self, other: "SeriesElement") -> "SeriesElement":
        n = self._check(other)
        return SeriesElement._raw(
            [self._coeffs[k] - other._coeffs[k] for k in range(n + 1)], self._dim, self._exact
        )

    def neg(self) -> "SeriesElement":
        return SeriesElement._raw([-c for c in self._coeffs], self._dim, self._exact)

    def scale(self, value: Number) -> "SeriesElement":
        factor = cf.to_field(value, self._exact)
        return SeriesElement._raw([c * factor for c in self._coeffs], self._dim, self._exact)

    def mul(self, other: "SeriesElement") -> "SeriesElement":
        """Cauchy product of matrix coefficients, in operand order."""
        n = self._check(other)
        out = []
        for k in range(n + 1):
            acc = self._coeffs[0] @ other._coeffs[k]
            for j in range(1, k + 1):
                acc = acc + self._coeffs[j] @ other._coeffs[k - j]
            out.append(acc)
        return SeriesElement._raw(out, self._dim, self._exact)

    def inv(self) -> "SeriesElement":
        """B_0 = C_0^{-1}, B_k = -C_0^{-1} sum_{j=1..k} C_j B_{k-j}."""
        if self.order < 0:
            raise NonInvertibleConstantTerm("no constant term to invert", {"order": self.order})
        try:
            b0 = cf.matrix_inverse(self._coeffs[0])
        except NonInvertibleConstantTerm as e:
            e.details.setdefault("order", self.order)
            raise
        out = [b0]
        for k in range(1, self.order + 1):
            acc = self._coeffs[1] @ out[k - 1]
            for j in range(2, k + 1):
                acc = acc + self._coeffs[j] @ out[k - j]
            out.append(-(b0 @ acc))
        return SeriesElement._raw(out, self._dim, self._exact)

    def deriv(self) -> "SeriesElement":
        """D = d/dt; the reliable order drops by one."""
        out = [self._coeffs[k] * k for k in range(1, len(self._coeffs))]
        return SeriesElement._raw(out, self._dim, self._exact)

    def truncate(self, order: int) -> "SeriesElement":
        return SeriesElement._raw(list(self._coeffs[: order + 1]), self._dim, self._exact)

    def transpose(self) -> "SeriesElement":
        return SeriesElement._raw([c.T.copy() for c in self._coeffs], self._dim, self._exact)

    # ------------------------------------------------------------------ inspection
    def is_zero(self, ctx: Optional[cf.RingContext] = None) -> bool:
        return all(cf.is_zero_matrix(c, ctx) for c in self._coeffs)

    def vanishing_order(self, ctx: Optional[cf.RingContext] = None) -> int:
        """Index of the first nonzero coefficient, or order+1 when all vanish."""
        for k, c in enumerate(self._coeffs):
            if not cf.is_zero_matrix(c, ctx):
                return k
        return len(self._coeffs)

    def max_abs_by_order(self) -> List[Union[Fraction, float]]:
        return [cf.max_abs(c) for c in self._coeffs]

    def equals(self, other: "SeriesElement", ctx: Optional[cf.RingContext] = None) -> bool:
        """Equality up to the common reliable order."""
        n = self._check(other)
        return all(cf.matrices_equal(self._coeffs[k], other._coeffs[k], ctx) for k in range(n + 1))

    def identical(self, other: "SeriesElement") -> bool:
        """Same reliable order and bit-identical coefficients."""
        if self.order != other.order or self._dim != other._dim:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._coeffs, other._coeffs))

    # ------------------------------------------------------------------ operators
    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else self.add(other)

    def __radd__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else other.add(self)

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else self.sub(other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else other.sub(self)

    def __neg__(self):
        return self.neg()

    def __mul__(self, other):
        if isinstance(other, SeriesElement):
            return self.mul(other)
        if isinstance(other, (Number, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Number, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self) -> str:
        mode = "exact" if self._exact else "float"
        return f"SeriesElement(dim={self._dim}, order={self.order}, mode={mode})"


def add(x: SeriesElement, y: SeriesElement) -> SeriesElement:
    return x.add(y)


def mul(x: SeriesElement, y: SeriesElement) -> SeriesElement:
    return x.mul(y)


def inv(v: SeriesElement) -> SeriesElement:
    return v.inv()


def deriv(x: SeriesElement) -> SeriesElement:
    return x.deriv()


def commutator(x: SeriesElement, y: SeriesElement) -> SeriesElement:
    return x * y - y * x


@dataclass(frozen=True)
class SpectralGap:
    """Minimum of |lambda + mu| over eigenvalues lambda of A0 and mu of B0."""

    value: float

    def admissible(self, threshold: float) -> bool:
        return self.value > threshold


def spectral_gap(a0: np.ndarray, b0: np.ndarray) -> SpectralGap:
    eig_a = np.linalg.eigvals(np.asarray(a0, dtype=float))
    eig_b = np.linalg.eigvals(np.asarray(b0, dtype=float))
    return SpectralGap(float(np.min(np.abs(eig_a[:, None] + eig_b[None, :]))))


def sylvester_solve(
    a: SeriesElement, b: SeriesElement, s: SeriesElement, ctx: Optional[cf.RingContext] = None
) -> SeriesElement:
    """Solve a x + x b = s order by order through the Kronecker lift."""
    ctx = ctx or cf.get_context()
    n = min(a._check(b), a._check(s))
    d = a.dim
    gap = spectral_gap(a.coeffs[0], b.coeffs[0])
    if not gap.admissible(ctx.gap_threshold):
        raise SpectralCollision(
            f"spectral gap {gap.value:.3e} below threshold {ctx.gap_threshold:.1e}",
            {"gap": gap.value},
        )
    identity = cf.eye(d, a.exact)
    # vec(A X + X B) = (I (x) A + B^T (x) I) vec(X), column-major vec
    lift = np.kron(identity, a.coeffs[0]) + np.kron(b.coeffs[0].T, identity)
    try:
        solve = cf.linear_solver(lift)
    except (ValueError, ZeroDivisionError, np.linalg.LinAlgError) as e:
        raise SpectralCollision(f"Sylvester operator is singular: {e}", {"gap": gap.value}) from e

    xs: List[np.ndarray] = []
    for k in range(n + 1):
        rhs = s.coeffs[k]
        for j in range(1, k + 1):
            rhs = rhs - a.coeffs[j] @ xs[k - j] - xs[k - j] @ b.coeffs[j]
        vec = solve(rhs.flatten(order="F"))
        xs.append(np.asarray(vec).reshape((d, d), order="F"))
    return SeriesElement._raw(xs, d, a.exact)
