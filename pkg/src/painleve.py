"""
Noncommutative Painleve IV in symmetric form.

Holds the series solver, the Backlund generators s0, s1, s2, pi with their
relations and translations, the kappa conditions feeding the Toda chain, the
construction of P4 solutions from a Toda chain, and the scalar (d = 1) layer.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from loguru import logger

from src import coefficients as cf
from src.errors import (
    DimensionMismatch,
    InconsistentParameters,
    NonInvertibleConstantTerm,
    NonInvertiblePivot,
)
from src.ring import SeriesElement, sylvester_solve
from src.toda import ScalarKappaChain, TodaChain, eta, eta_inv, theta, theta_inv, toda_residual_eta, toda_residual_theta

Triple = Tuple[SeriesElement, SeriesElement, SeriesElement]


# ---------------------------------------------------------------------------- parameters
@dataclass(frozen=True)
class AlphaParams:
    """(alpha_0, alpha_1, alpha_2); P4 wants sum 1, the Lotka-Volterra variant sum 0."""

    a0: Fraction
    a1: Fraction
    a2: Fraction

    @classmethod
    def of(cls, values: Sequence[Union[int, str, Fraction, float]]) -> "AlphaParams":
        if len(values) != 3:
            raise InconsistentParameters(f"alphas need three entries, got {len(values)}")
        return cls(*(cf.parse_scalar(v, True) for v in values))

    @property
    def total(self) -> Fraction:
        return self.a0 + self.a1 + self.a2

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.a0, self.a1, self.a2)

    def __getitem__(self, i: int) -> Fraction:
        return self.as_tuple()[i % 3]

    def validate(self, lotka_volterra: bool = False) -> "AlphaParams":
        expected = 0 if lotka_volterra else 1
        if self.total != expected:
            raise InconsistentParameters(
                f"alpha sum is {self.total}, expected {expected}", {"alphas": [str(a) for a in self.as_tuple()]}
            )
        return self

    def lattice_shift(self, n: int) -> "AlphaParams":
        """Parameters of the n-th system of the T1 direction: (a0 + n, a1 - n, a2)."""
        return AlphaParams(self.a0 + n, self.a1 - n, self.a2)

    def __str__(self) -> str:
        return f"({self.a0}, {self.a1}, {self.a2})"


@dataclass(frozen=True)
class P4State:
    f0: SeriesElement
    f1: SeriesElement
    f2: SeriesElement
    alphas: AlphaParams
    a_param: Fraction = Fraction(1)

    @property
    def fs(self) -> Triple:
        return (self.f0, self.f1, self.f2)

    @property
    def dim(self) -> int:
        return self.f0.dim

    @property
    def order(self) -> int:
        return min(f.order for f in self.fs)

    @property
    def exact(self) -> bool:
        return self.f0.exact

    def with_fs(self, fs: Sequence[SeriesElement], alphas: Optional[AlphaParams] = None) -> "P4State":
        return replace(self, f0=fs[0], f1=fs[1], f2=fs[2], alphas=alphas or self.alphas)

    def t(self) -> SeriesElement:
        return SeriesElement.t(self.dim, self.order, self.exact)

    def first_integral(self) -> SeriesElement:
        """I = f0 + f1 + f2 - t."""
        return self.f0 + self.f1 + self.f2 - self.t()


def _field(value, exact: bool):
    return cf.to_field(value, exact)


def _initial_matrices(values: Sequence, exact: bool) -> List[np.ndarray]:
    """Matrices or scalars (read as multiples of the identity); d comes from the first matrix."""
    d = next((np.shape(v)[0] for v in values if np.ndim(v) == 2), 1)
    return [cf.as_matrix(v, d, exact) for v in values]


def p4_rhs(state: P4State) -> Triple:
    """a f_i f_{i+1} + (1-a) f_{i+1} f_i - a f_{i+2} f_i - (1-a) f_i f_{i+2} + alpha_i."""
    a = state.a_param
    b = 1 - a
    fs = state.fs
    out = []
    for i in range(3):
        fi, fj, fk = fs[i], fs[(i + 1) % 3], fs[(i + 2) % 3]
        terms = fi.like_scalar(state.alphas[i])
        if a != 0:
            terms = terms + (fi * fj - fk * fi) * a
        if b != 0:
            terms = terms + (fj * fi - fi * fk) * b
        out.append(terms)
    return tuple(out)


def p4_residual(state: P4State) -> Triple:
    """f_i' - rhs_i."""
    return tuple(f.deriv() - r for f, r in zip(state.fs, p4_rhs(state)))


def p4_solve_series(
    f0_init,
    f1_init,
    f2_init,
    alphas: AlphaParams,
    a: Union[int, Fraction] = 1,
    order: int = 8,
    exact: Optional[bool] = None,
) -> P4State:
    """Integrate the system order by order: (k+1) C_{k+1} = [t^k] rhs."""
    exact = cf.get_context().exact if exact is None else exact
    coeffs: List[List[np.ndarray]] = [[m] for m in _initial_matrices((f0_init, f1_init, f2_init), exact)]
    d = coeffs[0][0].shape[0]
    a_val = _field(a, exact)
    b_val = 1 - a_val
    eye = cf.eye(d, exact)
    alpha = [_field(x, exact) for x in alphas.as_tuple()]

    def conv(x: int, y: int, k: int) -> np.ndarray:
        acc = coeffs[x][0] @ coeffs[y][k]
        for j in range(1, k + 1):
            acc = acc + coeffs[x][j] @ coeffs[y][k - j]
        return acc

    for k in range(order):
        step = []
        for i in range(3):
            j, l = (i + 1) % 3, (i + 2) % 3
            rhs = eye * alpha[i] if k == 0 else cf.zeros(d, exact)
            if a_val != 0:
                rhs = rhs + (conv(i, j, k) - conv(l, i, k)) * a_val
            if b_val != 0:
                rhs = rhs + (conv(j, i, k) - conv(i, l, k)) * b_val
            step.append(rhs * _field(Fraction(1, k + 1), exact))
        for i in range(3):
            coeffs[i].append(step[i])

    fs = [SeriesElement(c) for c in coeffs]
    return P4State(fs[0], fs[1], fs[2], alphas, cf.parse_scalar(a, True))


def transpose_state(state: P4State) -> P4State:
    """Transpose every coefficient; (xy)^T = y^T x^T turns parameter a into 1 - a."""
    return P4State(state.f0.transpose(), state.f1.transpose(), state.f2.transpose(), state.alphas, 1 - state.a_param)


def states_equal(x: P4State, y: P4State) -> bool:
    return x.alphas == y.alphas and all(f.equals(g) for f, g in zip(x.fs, y.fs))


# ---------------------------------------------------------------------------- Backlund group
class Generator(str, Enum):
    S0 = "s0"
    S1 = "s1"
    S2 = "s2"
    PI = "pi"

    @property
    def number(self) -> int:
        """Subscript of s_i; -1 for pi."""
        return {"s0": 0, "s1": 1, "s2": 2, "pi": -1}[self.value]


@dataclass(frozen=True)
class BTransform:
    """A word in s0, s1, s2, pi; letters act on states from left to right."""

    word: Tuple[Generator, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "BTransform":
        return cls(tuple(Generator(tok) for tok in text.replace("*", " ").split()))

    @classmethod
    def of(cls, *letters: Union[str, Generator]) -> "BTransform":
        return cls(tuple(Generator(x) for x in letters))

    def __mul__(self, other: "BTransform") -> "BTransform":
        return BTransform(self.word + other.word)

    def __pow__(self, k: int) -> "BTransform":
        if k < 0:
            return self.inverse() ** (-k)
        return BTransform(self.word * k)

    def inverse(self) -> "BTransform":
        letters: List[Generator] = []
        for g in reversed(self.word):
            letters.extend([g, g] if g is Generator.PI else [g])
        return BTransform(tuple(letters))

    def normalized(self) -> sp.ImmutableMatrix:
        """The word as an integer linear map on (alpha_0, alpha_1, alpha_2).

        This action of the extended affine Weyl group is faithful, so two words
        are the same group element exactly when their maps agree. Braid
        relations reduce as well as s_i^2 = 1 and pi^3 = 1.
        """
        m = sp.eye(3)
        for g in self.word:
            m = _GENERATOR_MAPS[g] * m
        return sp.ImmutableMatrix(m)

    def is_identity_word(self) -> bool:
        return self.normalized() == sp.eye(3)

    def same_element(self, other: "BTransform") -> bool:
        return self.normalized() == other.normalized()

    def __str__(self) -> str:
        return " ".join(g.value for g in self.word) or "id"


_CARTAN = sp.Matrix(3, 3, lambda i, j: 2 if i == j else -1)


def _generator_map(g: Generator) -> sp.ImmutableMatrix:
    if g is Generator.PI:
        # (a0, a1, a2) -> (a1, a2, a0)
        return sp.ImmutableMatrix(3, 3, lambda i, j: 1 if j == (i + 1) % 3 else 0)
    i = g.number
    m = sp.eye(3)
    for j in range(3):
        m[j, i] -= _CARTAN[i, j]
    return sp.ImmutableMatrix(m)


_GENERATOR_MAPS: Dict[Generator, sp.ImmutableMatrix] = {g: _generator_map(g) for g in Generator}

TRANSLATIONS: Dict[int, BTransform] = {
    1: BTransform.parse("pi s2 s1"),
    2: BTransform.parse("s1 pi s2"),
    3: BTransform.parse("s2 s1 pi"),
}


def _apply_generator(g: Generator, state: P4State) -> P4State:
    fs = list(state.fs)
    al = list(state.alphas.as_tuple())
    if g is Generator.PI:
        return state.with_fs((fs[1], fs[2], fs[0]), AlphaParams(al[1], al[2], al[0]))
    i = g.number
    j, k = (i + 1) % 3, (i + 2) % 3
    ai = al[i]
    new_alphas = [None, None, None]
    new_alphas[i] = -ai
    new_alphas[j] = al[j] + ai
    new_alphas[k] = al[k] + ai
    if ai != 0:
        try:
            quotient = fs[i].inv() * ai
        except NonInvertibleConstantTerm as e:
            raise NonInvertiblePivot(f"{g.value} needs f{i}^-1 but its constant term is singular", {"generator": g.value}) from e
        fs[j] = fs[j] + quotient
        fs[k] = fs[k] - quotient
    return state.with_fs(fs, AlphaParams(*new_alphas))


def backlund_apply(g: Union[BTransform, Generator, str], state: P4State) -> P4State:
    if isinstance(g, str) and not isinstance(g, Generator):
        g = BTransform.parse(g)
    if isinstance(g, Generator):
        g = BTransform((g,))
    for letter in g.word:
        state = _apply_generator(letter, state)
    return state


def translation_apply(index: int, power: int, state: P4State) -> P4State:
    """T1 = pi s2 s1, T2 = s1 pi s2, T3 = s2 s1 pi raised to an integer power."""
    return backlund_apply(TRANSLATIONS[index] ** power, state)


@dataclass
class RelationRecord:
    name: str
    passed: bool
    detail: str = ""
    residuals: List[SeriesElement] = field(default_factory=list)
    error: Optional[NonInvertiblePivot] = None


@dataclass
class WeylReport:
    relations: List[RelationRecord] = field(default_factory=list)
    covariance: Dict[str, int] = field(default_factory=dict)
    required_order: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations) and all(
            v >= self.required_order for v in self.covariance.values()
        )


RELATIONS: List[Tuple[str, BTransform, BTransform]] = (
    [(f"s{i}^2 = 1", BTransform.of(f"s{i}", f"s{i}"), BTransform()) for i in range(3)]
    + [(f"(s{i} s{(i + 1) % 3})^3 = 1", BTransform.of(f"s{i}", f"s{(i + 1) % 3}") ** 3, BTransform()) for i in range(3)]
    + [("pi^3 = 1", BTransform.of("pi", "pi", "pi"), BTransform())]
    + [(f"pi s{i} = s{(i + 1) % 3} pi", BTransform.of("pi", f"s{i}"), BTransform.of(f"s{(i + 1) % 3}", "pi")) for i in range(3)]
    + [("T1 T2 T3 = 1", TRANSLATIONS[1] * TRANSLATIONS[2] * TRANSLATIONS[3], BTransform())]
)


def vanishing_order_of(residuals: Sequence[SeriesElement]) -> int:
    return min(r.vanishing_order() for r in residuals)


def weyl_relation_check(state: P4State) -> WeylReport:
    """Evaluate every defining relation as an equality of (alphas, f) tuples."""
    report = WeylReport(required_order=state.order)
    for name, lhs, rhs in RELATIONS:
        try:
            left = backlund_apply(lhs, state)
            right = backlund_apply(rhs, state)
            residuals = [x - y for x, y in zip(left.fs, right.fs)]
            report.relations.append(RelationRecord(name, states_equal(left, right), residuals=residuals))
        except NonInvertiblePivot as e:
            report.relations.append(RelationRecord(name, False, e.describe(), error=e))
    for g in Generator:
        try:
            image = backlund_apply(BTransform((g,)), state)
            report.covariance[g.value] = vanishing_order_of(p4_residual(image))
        except NonInvertiblePivot as e:
            logger.debug(f"BACKLUND: {g.value} skipped: {e}")
            report.covariance[g.value] = -1
    return report


# ---------------------------------------------------------------------------- kappa conditions
def solve_kappa_conditions(
    kappa1_0,
    kappa1_d0,
    kappa_m1_0,
    kappa_m1_d0,
    alphas: AlphaParams,
    order: int,
    exact: Optional[bool] = None,
) -> Tuple[SeriesElement, SeriesElement]:
    """Series solution of
    k1''  = -t k1'  - 2 k1 k-1 k1  - (a0 - a1) k1,
    k-1'' =  t k-1' - 2 k-1 k1 k-1 - (a0 - a1 - 2) k-1.
    """
    exact = cf.get_context().exact if exact is None else exact
    initial = _initial_matrices((kappa1_0, kappa1_d0, kappa_m1_0, kappa_m1_d0), exact)
    k1, km = initial[:2], initial[2:]
    for name, m in (("kappa_1(0)", k1[0]), ("kappa_-1(0)", km[0])):
        if not cf.is_invertible(m):
            raise NonInvertibleConstantTerm(f"{name} is not invertible", {"initial": name})
    c1 = _field(alphas.a0 - alphas.a1, exact)
    cm = _field(alphas.a0 - alphas.a1 - 2, exact)
    p: List[np.ndarray] = []  # coefficients of k1 k-1
    q: List[np.ndarray] = []  # coefficients of k-1 k1

    def conv(x: List[np.ndarray], y: List[np.ndarray], k: int) -> np.ndarray:
        acc = x[0] @ y[k]
        for j in range(1, k + 1):
            acc = acc + x[j] @ y[k - j]
        return acc

    for k in range(order - 1):
        p.append(conv(k1, km, k))
        q.append(conv(km, k1, k))
        scale = _field(Fraction(1, (k + 1) * (k + 2)), exact)
        rhs1 = -(k1[k] * k) - 2 * conv(p, k1, k) - k1[k] * c1
        rhsm = km[k] * k - 2 * conv(q, km, k) - km[k] * cm
        k1.append(rhs1 * scale)
        km.append(rhsm * scale)
    return SeriesElement(k1[: order + 1]), SeriesElement(km[: order + 1])


def kappa_condition_residuals(
    kappa1: SeriesElement, kappa_m1: SeriesElement, alphas: AlphaParams
) -> Tuple[SeriesElement, SeriesElement]:
    """Residuals of both conditions with theta_1 = kappa_1 and eta_-1 = kappa_-1."""
    t = SeriesElement.t(kappa1.dim, kappa1.order, kappa1.exact)
    r1 = (
        kappa1.deriv().deriv()
        + t * kappa1.deriv()
        + 2 * (kappa1 * kappa_m1 * kappa1)
        + kappa1 * (alphas.a0 - alphas.a1)
    )
    rm = (
        kappa_m1.deriv().deriv()
        - kappa_m1.deriv() * t
        + 2 * (kappa_m1 * kappa1 * kappa_m1)
        + kappa_m1 * (alphas.a0 - alphas.a1 - 2)
    )
    return r1, rm


def third_condition_residual(kappa1: SeriesElement, kappa_m1: SeriesElement, alphas: AlphaParams) -> SeriesElement:
    """Scalar first integral of the two conditions; zero iff the third condition holds."""
    if kappa1.dim != 1:
        raise DimensionMismatch("the third condition is scalar", {"dim": kappa1.dim})
    t = SeriesElement.t(1, kappa1.order, kappa1.exact)
    dk, dm = kappa1.deriv(), kappa_m1.deriv()
    prod = kappa_m1 * kappa1
    return (
        dm * dk
        + t * (dm * kappa1 - kappa_m1 * dk)
        + prod * prod
        - (t * t + (1 - alphas.a0 + alphas.a1)) * prod
        - kappa1.like_scalar(alphas.a1 * (alphas.a0 - 1))
    )


def admissible_scalar_initial_data(kappa1_0, kappa1_d0, kappa_m1_0, alphas: AlphaParams) -> Fraction:
    """kappa_-1'(0) making the third condition hold at t = 0 (d = 1, kappa_1'(0) != 0)."""
    k1, dk1, km = (Fraction(x) for x in (kappa1_0, kappa1_d0, kappa_m1_0))
    if dk1 == 0:
        raise InconsistentParameters("kappa_1'(0) must be nonzero to solve for kappa_-1'(0)")
    p0 = km * k1
    a0, a1 = alphas.a0, alphas.a1
    return (a1 * (a0 - 1) - p0 * p0 + (1 - a0 + a1) * p0) / dk1


def admissible_kappa_initial_data(
    diagonal: Sequence[Tuple[Any, Any, Any]],
    alphas: AlphaParams,
    conjugator=None,
    exact: Optional[bool] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(kappa_1(0), kappa_1'(0), kappa_-1(0), kappa_-1'(0)) as P diag(...) P^-1.

    Each diagonal entry (kappa_1(0), kappa_1'(0), kappa_-1(0)) is completed by
    `admissible_scalar_initial_data`. Conjugation by a constant P commutes with
    the kappa conditions, the Toda chain and `construct_p4_from_toda`, so every
    hypothesis of the construction holds on the result.
    """
    exact = cf.get_context().exact if exact is None else exact
    d = len(diagonal)
    rows = [(k1, dk1, km, admissible_scalar_initial_data(k1, dk1, km, alphas)) for k1, dk1, km in diagonal]
    out = []
    for values in zip(*rows):
        m = cf.zeros(d, exact)
        for i, v in enumerate(values):
            m[i, i] = _field(Fraction(v), exact)
        out.append(m)
    if conjugator is not None:
        p = cf.as_matrix(conjugator, d, exact)
        p_inv = cf.matrix_inverse(p)
        out = [p @ m @ p_inv for m in out]
    return tuple(out)


# ---------------------------------------------------------------------------- Toda -> P4
class Direction(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass
class HypothesisBundle:
    """Residuals whose vanishing the construction theorems assume."""

    residuals: Dict[str, SeriesElement]

    def vanishing_order(self) -> int:
        return min(r.vanishing_order() for r in self.residuals.values())

    def orders(self) -> Dict[str, int]:
        return {k: r.vanishing_order() for k, r in self.residuals.items()}

    def holds(self, ctx: Optional[cf.RingContext] = None) -> bool:
        """Every hypothesis vanishes through its own reliable order."""
        return all(r.is_zero(ctx) for r in self.residuals.values())


def construct_p4_from_toda(
    chain: TodaChain, n: int, direction: Union[Direction, str], alphas: AlphaParams
) -> Tuple[P4State, HypothesisBundle]:
    """Build (f0, f1, f2) for the n-th system from the Toda chain.

    Positive direction (n >= 0): f2 = theta' theta^-1 + t with theta = theta_{n+1},
    f1 from f1 f2 + f2 f1 = 2 (theta_{n+1} theta_n^-1 - (a1 - n)), f0 = t - f1 - f2;
    parameters (a0 + n, a1 - n, a2).
    Negative direction (m = n <= 0): f2 = -eta^-1 eta' + t with eta = eta_{m-1},
    f0 from f0 f2 + f2 f0 = 2 (eta_m^-1 eta_{m-1} + a0 + m - 1), f1 = t - f0 - f2;
    parameters of lattice index m - 1.
    """
    direction = Direction(direction)
    if direction is Direction.POSITIVE:
        th = theta(chain, n + 1)
        th_inv = theta_inv(chain, n + 1)
        t = SeriesElement.t(chain.dim, th.order, th.exact)
        f2 = th.deriv() * th_inv + t
        shift = alphas.a1 - n
        symmetric = th * theta_inv(chain, n) - shift
        f1 = sylvester_solve(f2, f2, 2 * symmetric)
        f0 = t - f1 - f2
        state = P4State(f0, f1, f2, alphas.lattice_shift(n))
        condition = (
            th.deriv().deriv()
            + t * th.deriv()
            + 2 * (th * theta_inv(chain, n) * th)
            + th * (alphas.a0 - alphas.a1 + 2 * n)
        )
        constraint = f1.deriv() - (f1 * f1 + f1 * f2 + f2 * f1 - t * f1 + f1.like_scalar(shift))
        toda = toda_residual_theta(chain, n)
        syl = f2 * f1 + f1 * f2 - 2 * symmetric
    else:
        m = n
        et, et_inv = eta(chain, m - 1), eta_inv(chain, m - 1)
        t = SeriesElement.t(chain.dim, et.order, et.exact)
        f2 = t - et_inv * et.deriv()
        shift = alphas.a0 + m - 1
        symmetric = eta_inv(chain, m) * et + shift
        f0 = sylvester_solve(f2, f2, 2 * symmetric)
        f1 = t - f0 - f2
        state = P4State(f0, f1, f2, alphas.lattice_shift(m - 1))
        condition = (
            et.deriv().deriv()
            - et.deriv() * t
            + 2 * (et * eta_inv(chain, m) * et)
            + et * (alphas.a0 - alphas.a1 + 2 * (m - 1))
        )
        constraint = f0.deriv() - (-(f0 * f0) - f0 * f2 - f2 * f0 + f0 * t + f0.like_scalar(shift))
        toda = toda_residual_eta(chain, m)
        syl = f2 * f0 + f0 * f2 - 2 * symmetric
    bundle = HypothesisBundle({"toda": toda, "condition": condition, "constraint": constraint, "sylvester": syl})
    logger.debug(f"TODA2P4: {direction.value} n={n} hypothesis orders {bundle.orders()}")
    return state, bundle


# ---------------------------------------------------------------------------- scalar layer
@dataclass(frozen=True)
class ScalarP4Data:
    """y_n = (ln kappa_{n+1} kappa_n^-1)' + t, z_n = kappa_{n-1} kappa_n^-2 kappa_{n+1} - (a1 + a2 - n)."""

    y: SeriesElement
    z: SeriesElement
    n: int
    alphas: AlphaParams
    y_prev: Optional[SeriesElement] = None

    def _t(self, like: SeriesElement) -> SeriesElement:
        return SeriesElement.t(1, like.order, like.exact)

    def z_condition_residual(self) -> SeriesElement:
        """-z' - [y^-1 z^2 + (a2 - y^2) y^-1 z - (a1 + a2 - n) y]."""
        y, z = self.y, self.z
        y_inv = y.inv()
        s = self.alphas.a1 + self.alphas.a2 - self.n
        return -z.deriv() - (y_inv * z * z + (y.like_scalar(self.alphas.a2) - y * y) * y_inv * z - y * s)

    def y_system_residual(self) -> SeriesElement:
        """-y' - [y^2 + 2z - t y + a2]."""
        y = self.y
        return -y.deriv() - (y * y + 2 * self.z - self._t(y) * y + y.like_scalar(self.alphas.a2))

    def z_condition_residual_negative(self) -> SeriesElement:
        """z' - [y_{n-1}^-1 z^2 + (a2 - y_{n-1}^2) y_{n-1}^-1 z - (a1 + a2 - n) y_{n-1}]."""
        y, z = self._require_prev(), self.z
        y_inv = y.inv()
        s = self.alphas.a1 + self.alphas.a2 - self.n
        return z.deriv() - (y_inv * z * z + (y.like_scalar(self.alphas.a2) - y * y) * y_inv * z - y * s)

    def y_system_residual_negative(self) -> SeriesElement:
        """y_{n-1}' - [2z + y_{n-1}^2 - t y_{n-1} + a2]."""
        y = self._require_prev()
        return y.deriv() - (2 * self.z + y * y - self._t(y) * y + y.like_scalar(self.alphas.a2))

    def _require_prev(self) -> SeriesElement:
        if self.y_prev is None:
            raise ValueError("y_{n-1} was not computed for this index")
        return self.y_prev


def _log_ratio_y(chain: ScalarKappaChain, n: int) -> SeriesElement:
    ratio = chain.kappa(n + 1) * chain.kappa(n).inv()
    t = SeriesElement.t(1, ratio.order, ratio.exact)
    return ratio.deriv() * ratio.inv() + t


def scalar_zn(chain: ScalarKappaChain, n: int, alphas: AlphaParams) -> ScalarP4Data:
    y = _log_ratio_y(chain, n)
    y_prev = _log_ratio_y(chain, n - 1) if n - 1 >= -chain.nmax else None
    k_inv = chain.kappa(n).inv()
    z = chain.kappa(n - 1) * k_inv * k_inv * chain.kappa(n + 1) - (alphas.a1 + alphas.a2 - n)
    return ScalarP4Data(y, z, n, alphas, y_prev)


def scalar_p4_residual(y: SeriesElement, n: int, alphas: AlphaParams) -> SeriesElement:
    """y'' - [1/2 y^-1 y'^2 + 3/2 y^3 - 2 t y^2 + (1/2 t^2 + a0 - a1 + 2n) y - 1/2 a2^2 y^-1]."""
    if y.dim != 1:
        raise DimensionMismatch("the scalar P4 equation needs d = 1", {"dim": y.dim})
    half = Fraction(1, 2)
    t = SeriesElement.t(1, y.order, y.exact)
    y_inv = y.inv()
    dy = y.deriv()
    y2 = y * y
    linear = t * t * half + (alphas.a0 - alphas.a1 + 2 * n)
    rhs = (
        y_inv * dy * dy * half
        + y2 * y * Fraction(3, 2)
        - t * y2 * 2
        + linear * y
        - y_inv * (alphas.a2 * alphas.a2 * half)
    )
    return dy.deriv() - rhs
