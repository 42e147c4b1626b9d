"""
Isomonodromic pairs for the nc P4 system: the 3x3 pair with spectral parameter
lambda, the 2x2 Jimbo-Miwa pair in mu, and the zero-curvature residual.

Spectral parameters stay formal: a LambdaMatrix is a finite Laurent polynomial
whose coefficients are RingMatrix blocks.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from src.errors import InconsistentParameters, ShapeMismatch
from src.painleve import AlphaParams, P4State
from src.qdet import RingMatrix
from src.ring import SeriesElement


class LambdaMatrix:
    """sum_k blocks[k] lambda^k over a finite exponent window."""

    def __init__(self, blocks: Dict[int, RingMatrix]):
        if not blocks:
            raise ShapeMismatch("a spectral matrix needs at least one block")
        shapes = {b.shape for b in blocks.values()}
        if len(shapes) != 1:
            raise ShapeMismatch(f"blocks mix shapes {sorted(shapes)}")
        self._blocks = dict(sorted(blocks.items()))

    @property
    def blocks(self) -> Dict[int, RingMatrix]:
        return dict(self._blocks)

    @property
    def shape(self) -> Tuple[int, int]:
        return next(iter(self._blocks.values())).shape

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(self._blocks)

    @property
    def order(self) -> int:
        return min(b.order for b in self._blocks.values())

    def block(self, k: int) -> Optional[RingMatrix]:
        return self._blocks.get(k)

    def _check(self, other: "LambdaMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"spectral matrices of shape {self.shape} and {other.shape}")

    def add(self, other: "LambdaMatrix") -> "LambdaMatrix":
        self._check(other)
        out = dict(self._blocks)
        for k, b in other._blocks.items():
            out[k] = out[k] + b if k in out else b
        return LambdaMatrix(out)

    def neg(self) -> "LambdaMatrix":
        return LambdaMatrix({k: b.scale(-1) for k, b in self._blocks.items()})

    def sub(self, other: "LambdaMatrix") -> "LambdaMatrix":
        return self.add(other.neg())

    def mul(self, other: "LambdaMatrix") -> "LambdaMatrix":
        """Exponent convolution, block products in operand order."""
        if self.shape[1] != other.shape[0]:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out: Dict[int, RingMatrix] = {}
        for i, a in self._blocks.items():
            for j, b in other._blocks.items():
                term = a @ b
                out[i + j] = out[i + j] + term if i + j in out else term
        return LambdaMatrix(out)

    def d_t(self) -> "LambdaMatrix":
        return LambdaMatrix({k: b.deriv() for k, b in self._blocks.items()})

    def d_lambda(self) -> "LambdaMatrix":
        out = {k - 1: b.scale(k) for k, b in self._blocks.items() if k != 0}
        if not out:
            zero = next(iter(self._blocks.values())).scale(0)
            out = {0: zero}
        return LambdaMatrix(out)

    def __add__(self, other: "LambdaMatrix") -> "LambdaMatrix":
        return self.add(other)

    def __sub__(self, other: "LambdaMatrix") -> "LambdaMatrix":
        return self.sub(other)

    def __mul__(self, other: "LambdaMatrix") -> "LambdaMatrix":
        return self.mul(other)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self._blocks.values())

    def vanishing_order(self) -> int:
        return min(b.vanishing_order() for b in self._blocks.values())

    def entries(self) -> Iterable[Tuple[int, int, int, SeriesElement]]:
        """(exponent, row, col, series) for every entry of every block."""
        for k, b in self._blocks.items():
            for i in range(b.rows):
                for j in range(b.cols):
                    yield k, i, j, b[i, j]

    def __repr__(self) -> str:
        return f"LambdaMatrix({self.shape[0]}x{self.shape[1]}, exponents={list(self._blocks)})"


@dataclass(frozen=True)
class BetaParams:
    b0: Fraction
    b1: Fraction
    b2: Fraction
    n: int = 0

    def alphas(self) -> AlphaParams:
        """Base parameters: a0 = 1 + b2 - b0 - n, a1 = b0 - b1 + n, a2 = b1 - b2."""
        return AlphaParams(1 + self.b2 - self.b0 - self.n, self.b0 - self.b1 + self.n, self.b1 - self.b2)

    def effective_alphas(self) -> AlphaParams:
        """Constants appearing in the compatibility system of the n-th pair."""
        return AlphaParams(1 + self.b2 - self.b0, self.b0 - self.b1, self.b1 - self.b2)


def beta_from_alpha(alphas: AlphaParams, n: int = 0, beta2: Fraction = Fraction(0)) -> BetaParams:
    beta2 = Fraction(beta2)
    beta1 = beta2 + alphas.a2
    beta0 = beta1 + alphas.a1 - n
    if alphas.a0 != 1 + beta2 - beta0 - n:
        raise InconsistentParameters(
            f"alphas {alphas} do not sum to 1", {"sum": str(alphas.total)}
        )
    return BetaParams(beta0, beta1, beta2, n)


def betas_for_state(state: P4State, n: int = 0, beta2: Fraction = Fraction(0)) -> BetaParams:
    """Betas of the n-th pair for a state whose alphas are already lattice-shifted by n."""
    return beta_from_alpha(state.alphas.lattice_shift(-n), n, beta2)


def _check_betas(state: P4State, betas: BetaParams) -> None:
    if betas.effective_alphas() != state.alphas:
        raise InconsistentParameters(
            f"betas give {betas.effective_alphas()} but the state carries {state.alphas}"
        )


def _matrix(rows, like: SeriesElement) -> RingMatrix:
    """Scalars become scalar multiples of the identity of the ring."""
    return RingMatrix(
        [[e if isinstance(e, SeriesElement) else like.like_scalar(e) for e in row] for row in rows]
    )


def ny_pair(state: P4State, betas: BetaParams) -> Tuple[LambdaMatrix, LambdaMatrix]:
    """A = A0 + A_-1 / lambda, B = B1 lambda + B0."""
    _check_betas(state, betas)
    f0, f1, f2 = state.fs
    b0, b1, b2 = betas.b0, betas.b1, betas.b2
    a_0 = _matrix([[0, 1, f0], [0, 0, 1], [0, 0, 0]], f0)
    a_m1 = _matrix([[b0, 0, 0], [f1, b1, 0], [1, f2, b2]], f0)
    b_1 = _matrix([[0, 0, 1], [0, 0, 0], [0, 0, 0]], f0)
    b_0 = _matrix([[-f2, 0, 0], [1, -f0, 0], [0, 1, -f1]], f0)
    return LambdaMatrix({0: a_0, -1: a_m1}), LambdaMatrix({1: b_1, 0: b_0})


def _require_reduced(betas: BetaParams) -> None:
    if betas.b2 != -1:
        raise InconsistentParameters(f"the 2x2 reduction needs beta_2 = -1, got {betas.b2}")


def jm_pair(state: P4State, betas: BetaParams) -> Tuple[LambdaMatrix, LambdaMatrix]:
    """2x2 Jimbo-Miwa form in mu (beta_2 = -1)."""
    _require_reduced(betas)
    _check_betas(state, betas)
    f0, f1, f2 = state.fs
    b0, b1 = betas.b0, betas.b1
    lead = _matrix([[1, 0], [0, 0]], f0)
    f12 = f1 * f2
    a_0 = _matrix([[f0 + f1 + f2, -f12 + (b1 + 1)], [1, 0]], f0)
    a_m1 = _matrix(
        [
            [f2 * f1 + (b0 + 1), -(f2 * f1 * f2) - f2 * (b0 - b1)],
            [f1, -f12 + (b1 + 1)],
        ],
        f0,
    )
    b_0 = _matrix([[0, -f12 + (b1 + 1)], [1, -f0 - f2]], f0)
    return LambdaMatrix({1: lead, 0: a_0, -1: a_m1}), LambdaMatrix({1: lead, 0: b_0})


def jm_pre_gauge_pair(state: P4State, betas: BetaParams) -> Tuple[LambdaMatrix, LambdaMatrix]:
    """Upper-left 2x2 part of the mu-pair before the gauge by g = [[1, f2], [0, 1]]."""
    _require_reduced(betas)
    _check_betas(state, betas)
    f0, f1, f2 = state.fs
    b0, b1 = betas.b0, betas.b1
    lead = _matrix([[1, f2], [0, 0]], f0)
    a_0 = _matrix([[f0 + f1, f0 * f2 + (b1 + 1)], [1, f2]], f0)
    a_m1 = _matrix([[b0 + 1, 0], [f1, b1 + 1]], f0)
    b_0 = _matrix([[-f2, 0], [1, -f0]], f0)
    return LambdaMatrix({1: lead, 0: a_0, -1: a_m1}), LambdaMatrix({1: lead, 0: b_0})


def jm_gauge(state: P4State) -> Tuple[RingMatrix, RingMatrix]:
    f2 = state.f2
    return _matrix([[1, f2], [0, 1]], f2), _matrix([[1, -f2], [0, 1]], f2)


def gauge_transform(
    a: LambdaMatrix, b: LambdaMatrix, g: RingMatrix, g_inv: RingMatrix
) -> Tuple[LambdaMatrix, LambdaMatrix]:
    """A -> g A g^-1, B -> g B g^-1 + g' g^-1 for a gauge independent of the spectral parameter."""
    new_a = LambdaMatrix({k: g @ blk @ g_inv for k, blk in a.blocks.items()})
    new_b = {k: g @ blk @ g_inv for k, blk in b.blocks.items()}
    shift = g.deriv() @ g_inv
    new_b[0] = new_b[0] + shift if 0 in new_b else shift
    return new_a, LambdaMatrix(new_b)


def zero_curvature_residual(a: LambdaMatrix, b: LambdaMatrix) -> LambdaMatrix:
    """d_t A - d_lambda B - (B A - A B)."""
    a._check(b)
    return a.d_t() - b.d_lambda() - (b * a - a * b)


def perturb_state(state: P4State, index: int = 0, amount=1) -> P4State:
    """Add a scalar to f_index; a solved state stops being a solution."""
    fs = list(state.fs)
    fs[index] = fs[index] + amount
    return replace(state, f0=fs[0], f1=fs[1], f2=fs[2])
