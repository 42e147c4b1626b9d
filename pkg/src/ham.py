"""
Word polynomials in noncommuting symbols, cyclic gradients and the
"Hamiltonian" form of the nc P4 system.
"""

import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from src import coefficients as cf
from src.errors import DimensionMismatch, UnassignedSymbol
from src.painleve import AlphaParams, P4State
from src.ring import SeriesElement

Word = Tuple[str, ...]

F_SYMBOLS = ("f0", "f1", "f2")
U_MATRIX = ((0, 1, -1), (-1, 0, 1), (1, -1, 0))


class WordPoly:
    """Finite sum of rational coefficients times words; equal words merged, zeros dropped."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping[Word, Any], Iterable[Tuple[Any, Sequence[str]]]] = ()):
        merged: Dict[Word, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((tuple(w), c) for c, w in terms)
        for word, coeff in items:
            word = tuple(word)
            merged[word] = merged.get(word, Fraction(0)) + Fraction(coeff)
        self._terms = {w: c for w, c in sorted(merged.items()) if c != 0}

    @classmethod
    def symbol(cls, name: str) -> "WordPoly":
        return cls({(name,): 1})

    @classmethod
    def constant(cls, value) -> "WordPoly":
        return cls({(): value})

    @classmethod
    def parse(cls, text: str) -> "WordPoly":
        """'2 p q p - 1/3 t + q' style: terms split on +/-, letters separated by spaces."""
        terms = []
        for sign, chunk in re.findall(r"([+-]?)\s*([^+-]+)", text.strip()):
            tokens = chunk.split()
            coeff = Fraction(-1 if sign == "-" else 1)
            if tokens and _is_number(tokens[0]):
                coeff *= Fraction(tokens.pop(0))
            terms.append((coeff, tuple(tokens)))
        return cls(terms)

    @property
    def terms(self) -> Dict[Word, Fraction]:
        return dict(self._terms)

    def symbols(self) -> Tuple[str, ...]:
        return tuple(sorted({s for w in self._terms for s in w}))

    def is_zero(self) -> bool:
        return not self._terms

    def add(self, other: "WordPoly") -> "WordPoly":
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return WordPoly(out)

    def scale(self, value) -> "WordPoly":
        value = Fraction(value)
        return WordPoly({w: c * value for w, c in self._terms.items()})

    def neg(self) -> "WordPoly":
        return self.scale(-1)

    def sub(self, other: "WordPoly") -> "WordPoly":
        return self.add(other.neg())

    def mul(self, other: "WordPoly") -> "WordPoly":
        """Concatenation product."""
        out: Dict[Word, Fraction] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                out[w1 + w2] = out.get(w1 + w2, Fraction(0)) + c1 * c2
        return WordPoly(out)

    def central(self, symbols: Iterable[str]) -> "WordPoly":
        """Move the given (central) symbols to the front of every word."""
        symbols = set(symbols)
        out: Dict[Word, Fraction] = {}
        for w, c in self._terms.items():
            key = tuple(s for s in w if s in symbols) + tuple(s for s in w if s not in symbols)
            out[key] = out.get(key, Fraction(0)) + c
        return WordPoly(out)

    def commutative(self) -> "WordPoly":
        """Sort letters inside every word."""
        out: Dict[Word, Fraction] = {}
        for w, c in self._terms.items():
            key = tuple(sorted(w))
            out[key] = out.get(key, Fraction(0)) + c
        return WordPoly(out)

    def _lift(self, other) -> "WordPoly":
        return other if isinstance(other, WordPoly) else WordPoly.constant(other)

    def __add__(self, other):
        return self.add(self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.sub(self._lift(other))

    def __rsub__(self, other):
        return self._lift(other).sub(self)

    def __neg__(self):
        return self.neg()

    def __mul__(self, other):
        return self.mul(self._lift(other))

    def __rmul__(self, other):
        return self._lift(other).mul(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, WordPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self._terms.items():
            body = " ".join(w)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c} {body}")
        return " + ".join(parts).replace("+ -", "- ")


def _is_number(token: str) -> bool:
    try:
        Fraction(token)
    except ValueError:
        return False
    return True


def eval_word_poly(
    poly: WordPoly,
    assignment: Mapping[str, Any],
    one: Any = None,
    mul: Callable[[Any, Any], Any] = operator.mul,
    coerce: Callable[[Fraction], Any] = lambda c: c,
) -> Any:
    """Sum of coefficient * product of assigned values, in word order.

    Works for SeriesElement values with the defaults and for numpy/sympy matrices
    given the matching `mul` and `one`.
    """
    missing = [s for s in poly.symbols() if s not in assignment]
    if missing:
        raise UnassignedSymbol(f"no value for {missing}", {"symbols": missing})
    if one is None:
        sample = next(iter(assignment.values()), None)
        if isinstance(sample, SeriesElement):
            one = sample.like_scalar(1)
    total = None
    for word, coeff in poly.terms.items():
        if word:
            term = assignment[word[0]]
            for s in word[1:]:
                term = mul(term, assignment[s])
        else:
            if one is None:
                raise UnassignedSymbol("a constant term needs an explicit unit")
            term = one
        term = term * coerce(coeff)
        total = term if total is None else total + term
    if total is None:
        if one is None:
            raise UnassignedSymbol("the zero polynomial needs an explicit unit to evaluate")
        return one * coerce(Fraction(0))
    return total


def cyclic_gradient(poly: WordPoly, x: str) -> WordPoly:
    """For each occurrence w = u x v emit the rotated word v u."""
    out: Dict[Word, Fraction] = {}
    for w, c in poly.terms.items():
        for k, s in enumerate(w):
            if s == x:
                rotated = w[k + 1:] + w[:k]
                out[rotated] = out.get(rotated, Fraction(0)) + c
    return WordPoly(out)


def substitute(poly: WordPoly, mapping: Mapping[str, WordPoly]) -> WordPoly:
    """Replace symbols by polynomials; unmapped symbols stay."""
    total = WordPoly()
    for w, c in poly.terms.items():
        term = WordPoly.constant(c)
        for s in w:
            term = term * mapping.get(s, WordPoly.symbol(s))
        total = total + term
    return total


def _linear_f_part(alphas: AlphaParams) -> WordPoly:
    a1, a2 = alphas.a1, alphas.a2
    third = Fraction(1, 3)
    return WordPoly(
        [
            ((a1 - a2) * third, ("f0",)),
            ((a1 + 2 * a2) * third, ("f1",)),
            (-(2 * a1 + a2) * third, ("f2",)),
        ]
    )


def nc_hamiltonian_f(a0, a1, alphas: AlphaParams) -> WordPoly:
    """H(f0, f1, f2) of the two-parameter family of orderings."""
    a0, a1 = Fraction(a0), Fraction(a1)
    cubic = WordPoly(
        [
            (a0, ("f0", "f1", "f2")),
            (2 - a0 - a1, ("f1", "f2", "f0")),
            (a1, ("f2", "f0", "f1")),
            (-(1 - a1), ("f1", "f0", "f2")),
            (1 - a0 - a1, ("f0", "f2", "f1")),
            (-(1 - a0), ("f2", "f1", "f0")),
        ]
    )
    return cubic + _linear_f_part(alphas)


def nc_hamiltonian_qpt(alphas: AlphaParams, a0=1, a1=1) -> WordPoly:
    """H in the canonical variables q = f1, p = f2 and t = f0 + f1 + f2."""
    a0, a1 = Fraction(a0), Fraction(a1)
    b = 1 - a0 - a1
    return WordPoly(
        [
            (-(1 - a0), "ppq"),
            (1 - 2 * a0, "pqp"),
            (-(1 - a0), "qpp"),
            (b, "qqp"),
            (-(3 - 2 * a0 - 2 * a1), "qpq"),
            (b, "pqq"),
            (b, "tpq"),
            (a1, "ptq"),
            (-(1 - a0), "pqt"),
            (2 - a0 - a1, "qpt"),
            (-(1 - a1), "qtp"),
            (a0, "tqp"),
            (-alphas.a1, "p"),
            (alphas.a2, "q"),
            ((alphas.a1 - alphas.a2) / 3, "t"),
        ]
    )


def canonical_substitution() -> Dict[str, WordPoly]:
    """f0 = t - q - p, f1 = q, f2 = p."""
    q, p, t = (WordPoly.symbol(s) for s in ("q", "p", "t"))
    return {"f0": t - q - p, "f1": q, "f2": p}


def scalar_hamiltonians(alphas: AlphaParams) -> Tuple[WordPoly, WordPoly, WordPoly]:
    """h0, h1, h2 of the commutative system (letters f0, f1, f2)."""
    a0, a1, a2 = alphas.as_tuple()
    third = Fraction(1, 3)
    cube = WordPoly([(1, ("f0", "f1", "f2"))])

    def linear(c0, c1, c2) -> WordPoly:
        return WordPoly([(c0 * third, ("f0",)), (c1 * third, ("f1",)), (c2 * third, ("f2",))])

    h0 = cube + linear(a1 - a2, a1 + 2 * a2, -(2 * a1 + a2))
    h1 = cube + linear(-(2 * a2 + a0), a2 - a0, a2 + 2 * a0)
    h2 = cube + linear(a0 + 2 * a1, -(2 * a0 + a1), a0 - a1)
    return h0, h1, h2


def poisson_bracket(left: WordPoly, right: WordPoly) -> WordPoly:
    """{P, Q} = sum_ij dP/df_i dQ/df_j u_ij for commutative polynomials in f0, f1, f2."""
    total = WordPoly()
    for i, fi in enumerate(F_SYMBOLS):
        dp = cyclic_gradient(left, fi)
        if dp.is_zero():
            continue
        for j, fj in enumerate(F_SYMBOLS):
            if U_MATRIX[i][j]:
                total = total + (dp * cyclic_gradient(right, fj)).scale(U_MATRIX[i][j])
    return total.commutative()


@dataclass
class CanonicalResiduals:
    q: SeriesElement
    p: SeriesElement

    def vanishing_order(self) -> int:
        return min(self.q.vanishing_order(), self.p.vanishing_order())


def check_canonical_equations(state: P4State, bind_time: str = "sum") -> CanonicalResiduals:
    """q' + dH/dp and p' - dH/dq with q = f1, p = f2.

    `bind_time="sum"` assigns the symbol t to f0 + f1 + f2, `"t"` to the model's
    own time series (equal when the first integral vanishes).
    """
    ham = nc_hamiltonian_qpt(state.alphas)
    time = state.f0 + state.f1 + state.f2 if bind_time == "sum" else state.t()
    assignment = {"q": state.f1, "p": state.f2, "t": time}
    dh_dp = eval_word_poly(cyclic_gradient(ham, "p"), assignment)
    dh_dq = eval_word_poly(cyclic_gradient(ham, "q"), assignment)
    return CanonicalResiduals(state.f1.deriv() + dh_dp, state.f2.deriv() - dh_dq)


def scalar_poisson_check(state: P4State) -> Tuple[SeriesElement, SeriesElement, SeriesElement]:
    """f0' - {H, f0} - (a0 + a1 + a2), f1' - {H, f1}, f2' - {H, f2} for d = 1."""
    if state.dim != 1:
        raise DimensionMismatch("the Poisson bracket form is commutative (d = 1)", {"dim": state.dim})
    ham = nc_hamiltonian_f(1, 1, state.alphas)
    assignment = dict(zip(F_SYMBOLS, state.fs))
    out = []
    for j, fj in enumerate(F_SYMBOLS):
        flow = eval_word_poly(poisson_bracket(ham, WordPoly.symbol(fj)), assignment)
        correction = state.alphas.total if j == 0 else 0
        out.append(state.fs[j].deriv() - flow - correction)
    return tuple(out)


def trace_gradient_discrepancy(
    poly: WordPoly,
    x: str,
    assignment: Mapping[str, np.ndarray],
    direction: np.ndarray,
    step: float = 1e-6,
) -> Union[Fraction, float]:
    """|d/de tr P(x + e E) at e = 0 - tr(E grad_x P)| on constant matrices.

    Exact matrices are differentiated symbolically, float matrices by a
    central difference.
    """
    grad = cyclic_gradient(poly, x)
    d = direction.shape[0]
    if cf.is_exact(direction):
        eps = sp.Symbol("eps")
        coerce = lambda c: sp.Rational(c.numerator, c.denominator)  # noqa: E731
        base = {k: cf.to_sympy(v) for k, v in assignment.items()}
        e = cf.to_sympy(direction)
        moved = dict(base, **{x: base[x] + eps * e})
        traced = eval_word_poly(poly, moved, one=sp.eye(d), coerce=coerce).trace()
        derivative = sp.diff(sp.expand(traced), eps).subs(eps, 0)
        expected = (e * eval_word_poly(grad, base, one=sp.eye(d), coerce=coerce)).trace()
        gap = sp.Rational(sp.simplify(derivative - expected))
        return abs(Fraction(int(gap.p), int(gap.q)))

    def trace_at(h: float) -> float:
        moved = dict(assignment, **{x: assignment[x] + h * direction})
        return float(np.trace(eval_word_poly(poly, moved, one=np.eye(d), mul=operator.matmul, coerce=float)))

    numeric = (trace_at(step) - trace_at(-step)) / (2 * step)
    analytic = float(np.trace(direction @ eval_word_poly(grad, assignment, one=np.eye(d), mul=operator.matmul, coerce=float)))
    return abs(numeric - analytic)
