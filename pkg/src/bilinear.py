"""
Hirota bilinear layer for the commutative (d = 1) case.

tau functions are never built: every tau equation is rewritten through the
logarithmic derivatives h_i = tau_i' / tau_i, which are the Hamiltonians.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence, Tuple

from src.errors import DimensionMismatch
from src.ham import F_SYMBOLS, eval_word_poly, scalar_hamiltonians
from src.painleve import AlphaParams, P4State
from src.ring import SeriesElement
from src.toda import ScalarKappaChain, kappa_bilinear_residual


@dataclass(frozen=True)
class HirotaPair:
    f: SeriesElement
    g: SeriesElement

    def __post_init__(self):
        if self.f.dim != 1 or self.g.dim != 1:
            raise DimensionMismatch("the Hirota operator is defined for d = 1 only")


def _derivatives(x: SeriesElement, n: int) -> Sequence[SeriesElement]:
    out = [x]
    for _ in range(n):
        out.append(out[-1].deriv())
    return out


def hirota(n: int, pair: HirotaPair) -> SeriesElement:
    """D_t^n f.g = sum_k (-1)^k C(n, k) f^(n-k) g^(k)."""
    if n < 0:
        raise ValueError("the Hirota order must be non-negative")
    df = _derivatives(pair.f, n)
    dg = _derivatives(pair.g, n)
    total = None
    for k in range(n + 1):
        term = df[n - k] * dg[k] * ((-1) ** k * comb(n, k))
        total = term if total is None else total + term
    return total


def kappa_toda_bilinear_residual(chain: ScalarKappaChain, n: int) -> SeriesElement:
    """(1/2 D_t^2 + kappa_-1 kappa_1) kappa_n . kappa_n - kappa_{n-1} kappa_{n+1}."""
    k = chain.kappa(n)
    return (
        hirota(2, HirotaPair(k, k)) * Fraction(1, 2)
        + chain.kappa_m1 * chain.kappa1 * k * k
        - chain.kappa(n - 1) * chain.kappa(n + 1)
    )


def kappa_bilinear_from_toda_residual(chain: ScalarKappaChain, n: int) -> SeriesElement:
    """Sum of the Hirota form and the Toda module's own residual; identically zero."""
    return kappa_toda_bilinear_residual(chain, n) + kappa_bilinear_residual(chain, n)


def bilkap_residual(chain: ScalarKappaChain, n: int, alphas: AlphaParams) -> SeriesElement:
    """(D_t^2 - t D_t + 2 kappa_-1 kappa_1 + (a0 - a1 + 2n)) kappa_n . kappa_{n+1}."""
    pair = HirotaPair(chain.kappa(n), chain.kappa(n + 1))
    product = pair.f * pair.g
    t = SeriesElement.t(1, product.order, product.exact)
    return (
        hirota(2, pair)
        - t * hirota(1, pair)
        + (2 * (chain.kappa_m1 * chain.kappa1) + (alphas.a0 - alphas.a1 + 2 * n)) * product
    )


TAU_PAIRS = ((0, 1), (1, 2), (2, 0))


def tau_bilinear_residual_via_logderivs(
    state: P4State, shifts: Sequence = (0, 0, 0)
) -> Tuple[SeriesElement, SeriesElement, SeriesElement]:
    """(D_t^2 + 1/3 T D_t - 2/9 T^2 + 1/3 (a_i - a_j)) tau_i . tau_j divided by tau_i tau_j.

    With h = tau'/tau this is h_i' + h_i^2 - 2 h_i h_j + h_j' + h_j^2
    + 1/3 T (h_i - h_j) - 2/9 T^2 + 1/3 (a_i - a_j), where T = f0 + f1 + f2
    is the time variable of the state. `shifts` adds constants to the h_i.
    """
    if state.dim != 1:
        raise DimensionMismatch("tau functions are scalar (d = 1)", {"dim": state.dim})
    assignment = dict(zip(F_SYMBOLS, state.fs))
    hs = [eval_word_poly(h, assignment) + c for h, c in zip(scalar_hamiltonians(state.alphas), shifts)]
    time = state.f0 + state.f1 + state.f2
    third = Fraction(1, 3)
    out = []
    for i, j in TAU_PAIRS:
        hi, hj = hs[i], hs[j]
        out.append(
            hi.deriv()
            + hi * hi
            - 2 * (hi * hj)
            + hj.deriv()
            + hj * hj
            + time * (hi - hj) * third
            - time * time * Fraction(2, 9)
            + (state.alphas[i] - state.alphas[j]) * third
        )
    return tuple(out)
