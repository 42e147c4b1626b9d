"""
Matrices over the series ring, quasideterminants and (almost) Hankel matrices.
"""

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from loguru import logger
from sympy.combinatorics import Permutation

from src import coefficients as cf
from src.errors import DimensionMismatch, InsufficientSequence, ShapeMismatch, SingularMinor
from src.ring import SeriesElement


class RingMatrix:
    """Rectangular matrix of SeriesElement entries sharing one dimension d."""

    def __init__(self, entries: Sequence[Sequence[SeriesElement]]):
        rows = tuple(tuple(row) for row in entries)
        if not rows or not rows[0]:
            raise ShapeMismatch("a ring matrix needs at least one entry")
        cols = len(rows[0])
        if any(len(row) != cols for row in rows):
            raise ShapeMismatch("ring matrix rows differ in length")
        dims = {e.dim for row in rows for e in row}
        if len(dims) != 1:
            raise DimensionMismatch(f"entries mix dimensions {sorted(dims)}")
        self._entries = rows

    @classmethod
    def zeros(cls, rows: int, cols: int, dim: int, order: int, exact: Optional[bool] = None) -> "RingMatrix":
        zero = SeriesElement.zero(dim, order, exact)
        return cls([[zero] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, size: int, dim: int, order: int, exact: Optional[bool] = None) -> "RingMatrix":
        zero = SeriesElement.zero(dim, order, exact)
        one = SeriesElement.one(dim, order, exact)
        return cls([[one if i == j else zero for j in range(size)] for i in range(size)])

    @property
    def rows(self) -> int:
        return len(self._entries)

    @property
    def cols(self) -> int:
        return len(self._entries[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def dim(self) -> int:
        return self._entries[0][0].dim

    @property
    def order(self) -> int:
        return min(e.order for row in self._entries for e in row)

    @property
    def entries(self) -> Tuple[Tuple[SeriesElement, ...], ...]:
        return self._entries

    def __getitem__(self, index: Tuple[int, int]) -> SeriesElement:
        i, j = index
        return self._entries[i][j]

    def row(self, i: int) -> Tuple[SeriesElement, ...]:
        return self._entries[i]

    def col(self, j: int) -> Tuple[SeriesElement, ...]:
        return tuple(row[j] for row in self._entries)

    def minor(self, i: int, j: int) -> "RingMatrix":
        """Delete row i and column j."""
        return RingMatrix(
            [[e for c, e in enumerate(row) if c != j] for r, row in enumerate(self._entries) if r != i]
        )

    def map(self, fn) -> "RingMatrix":
        return RingMatrix([[fn(e) for e in row] for row in self._entries])

    def deriv(self) -> "RingMatrix":
        return self.map(lambda e: e.deriv())

    def scale(self, value) -> "RingMatrix":
        return self.map(lambda e: e.scale(value))

    def _same_shape(self, other: "RingMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"shape {self.shape} vs {other.shape}")

    def add(self, other: "RingMatrix") -> "RingMatrix":
        self._same_shape(other)
        return RingMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)])

    def sub(self, other: "RingMatrix") -> "RingMatrix":
        self._same_shape(other)
        return RingMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)])

    def matmul(self, other: "RingMatrix") -> "RingMatrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            out_row = []
            for j in range(other.cols):
                acc = self[i, 0] * other[0, j]
                for k in range(1, self.cols):
                    acc = acc + self[i, k] * other[k, j]
                out_row.append(acc)
            out.append(out_row)
        return RingMatrix(out)

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        return self.add(other)

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        return self.sub(other)

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        return self.matmul(other)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self._entries for e in row)

    def vanishing_order(self) -> int:
        return min(e.vanishing_order() for row in self._entries for e in row)

    def __repr__(self) -> str:
        return f"RingMatrix({self.rows}x{self.cols}, dim={self.dim}, order={self.order})"


def solve_left(matrix: RingMatrix, rhs: Sequence[SeriesElement]) -> List[SeriesElement]:
    """Solve M y = c over the ring by elimination with left multiplications.

    A pivot is admissible when its constant coefficient is invertible. Row
    interchanges only reorder equations, so the solution needs no correction.
    """
    n = matrix.rows
    if matrix.cols != n or len(rhs) != n:
        raise ShapeMismatch(f"elimination needs a square system, got {matrix.shape}")
    work = [list(row) for row in matrix.entries]
    b = list(rhs)
    pivot_inverses: List[SeriesElement] = []
    swaps: List[Tuple[int, int]] = []

    for p in range(n):
        pivot_row = next(
            (r for r in range(p, n) if cf.is_invertible(work[r][p].constant_term())), None
        )
        if pivot_row is None:
            raise SingularMinor(f"no admissible pivot in column {p}", {"column": p, "size": n})
        if pivot_row != p:
            work[p], work[pivot_row] = work[pivot_row], work[p]
            b[p], b[pivot_row] = b[pivot_row], b[p]
            swaps.append((p, pivot_row))
        pivot_inv = work[p][p].inv()
        pivot_inverses.append(pivot_inv)
        for r in range(p + 1, n):
            if work[r][p].is_zero():
                continue
            factor = work[r][p] * pivot_inv
            for c in range(p, n):
                work[r][c] = work[r][c] - factor * work[p][c]
            b[r] = b[r] - factor * b[p]

    if swaps:
        logger.debug(f"QDET: row interchanges {swaps} in {n}x{n} elimination")

    y: List[Optional[SeriesElement]] = [None] * n
    for p in reversed(range(n)):
        acc = b[p]
        for q in range(p + 1, n):
            acc = acc - work[p][q] * y[q]
        y[p] = pivot_inverses[p] * acc
    return y


def quasidet(x: RingMatrix, i: int, j: int) -> SeriesElement:
    """|X|_ij = x_ij - r_i (X^ij)^{-1} c_j with zero-based (i, j)."""
    n = x.rows
    if x.cols != n:
        raise ShapeMismatch(f"quasideterminant needs a square matrix, got {x.shape}")
    if n == 1:
        return x[0, 0]
    minor = x.minor(i, j)
    row = [e for c, e in enumerate(x.row(i)) if c != j]
    col = [e for r, e in enumerate(x.col(j)) if r != i]
    y = solve_left(minor, col)
    acc = x[i, j]
    for r_k, y_k in zip(row, y):
        acc = acc - r_k * y_k
    return acc


@dataclass(frozen=True)
class HankelSpec:
    """H_n(i, j): (n+1)x(n+1) Hankel matrix of a sequence, last row/column optionally overridden."""

    sequence: Tuple[SeriesElement, ...]
    size: int
    override: Optional[Tuple[int, int]] = None

    def index(self, s: int, t: int) -> int:
        n = self.size
        if self.override is None:
            return s + t
        i, j = self.override
        if s == n and t == n:
            return i + j
        if s == n:
            return i + t
        if t == n:
            return s + j
        return s + t

    def required_length(self) -> int:
        n = self.size
        return 1 + max(self.index(s, t) for s in range(n + 1) for t in range(n + 1))


def hankel(spec: HankelSpec) -> RingMatrix:
    needed = spec.required_length()
    if len(spec.sequence) < needed:
        raise InsufficientSequence(
            f"Hankel matrix of size {spec.size} needs {needed} terms, got {len(spec.sequence)}",
            {"needed": needed, "available": len(spec.sequence)},
        )
    n = spec.size
    return RingMatrix([[spec.sequence[spec.index(s, t)] for t in range(n + 1)] for s in range(n + 1)])


def almost_hankel_qdet(spec: HankelSpec) -> SeriesElement:
    """h_n(i, j) = |H_n(i, j)|_nn."""
    return quasidet(hankel(spec), spec.size, spec.size)


def commutative_det(x: RingMatrix) -> SeriesElement:
    """Leibniz expansion; only meaningful for d = 1 where the ring is commutative."""
    if x.dim != 1:
        raise DimensionMismatch("determinants are defined only for d = 1", {"dim": x.dim})
    n = x.rows
    if x.cols != n:
        raise ShapeMismatch(f"determinant needs a square matrix, got {x.shape}")
    total = None
    for perm in itertools.permutations(range(n)):
        term = x[0, perm[0]]
        for r in range(1, n):
            term = term * x[r, perm[r]]
        if Permutation(list(perm)).signature() < 0:
            term = -term
        total = term if total is None else total + term
    return total
