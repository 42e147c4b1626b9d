"""
Sequences a_n, b_n, theta_n, eta_m generated from initial data kappa_1, kappa_-1,
the two noncommutative Toda chains and the scalar Hankel-determinant chain.
"""

import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from loguru import logger

from src import coefficients as cf
from src.errors import DimensionMismatch, NonInvertibleConstantTerm
from src.qdet import HankelSpec, commutative_det, hankel, quasidet
from src.ring import SeriesElement


def _moment_sequence(first: SeriesElement, middle: SeriesElement, count: int) -> List[SeriesElement]:
    """x_0 = first, x_n = x_{n-1}' + sum_{i+j=n-2} x_i middle x_j."""
    seq = [first]
    for n in range(1, count + 1):
        term = seq[n - 1].deriv()
        for i in range(n - 1):
            term = term + seq[i] * middle * seq[n - 2 - i]
        seq.append(term)
    return seq


def build_a_seq(kappa1: SeriesElement, kappa_m1: SeriesElement, nmax: int) -> List[SeriesElement]:
    """a_0 = kappa_1, a_n = a_{n-1}' + sum a_i kappa_-1 a_j; returns a_0..a_nmax."""
    return _moment_sequence(kappa1, kappa_m1, nmax)


def build_b_seq(kappa1: SeriesElement, kappa_m1: SeriesElement, nmax: int) -> List[SeriesElement]:
    """b_0 = kappa_-1, b_n = b_{n-1}' + sum b_i kappa_1 b_j; returns b_0..b_nmax."""
    return _moment_sequence(kappa_m1, kappa1, nmax)


@dataclass(frozen=True)
class TodaChain:
    """theta_0..theta_nmax and eta_0, eta_-1, .., eta_-mmax with their generating sequences."""

    kappa1: SeriesElement
    kappa_m1: SeriesElement
    a_seq: Tuple[SeriesElement, ...]
    b_seq: Tuple[SeriesElement, ...]
    theta_seq: Tuple[SeriesElement, ...]
    eta_seq: Tuple[SeriesElement, ...]
    nmax: int
    mmax: int
    _inverses: Dict[Tuple[str, int], SeriesElement] = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.kappa1.dim

    def reliable_orders(self) -> Dict[str, List[int]]:
        return {
            "theta": [x.order for x in self.theta_seq],
            "eta": [x.order for x in self.eta_seq],
        }


def build_toda_chain(
    kappa1: SeriesElement, kappa_m1: SeriesElement, nmax: int, mmax: Optional[int] = None
) -> TodaChain:
    """Build theta_p+1 = |A_p|_pp and eta_-p-1 = |B_p|_pp up to the requested depth."""
    if kappa1.dim != kappa_m1.dim:
        raise DimensionMismatch("kappa_1 and kappa_-1 differ in dimension")
    mmax = nmax if mmax is None else mmax
    a_seq = build_a_seq(kappa1, kappa_m1, max(2 * nmax - 2, 0))
    b_seq = build_b_seq(kappa1, kappa_m1, max(2 * mmax - 2, 0))

    thetas = [kappa_m1.inv()]
    for p in range(nmax):
        thetas.append(quasidet(hankel(HankelSpec(tuple(a_seq), p)), p, p))
    etas = [kappa1.inv()]
    for p in range(mmax):
        etas.append(quasidet(hankel(HankelSpec(tuple(b_seq), p)), p, p))

    for name, seq, sign in (("theta", thetas, 1), ("eta", etas, -1)):
        for k, value in enumerate(seq):
            if not cf.is_invertible(value.constant_term()):
                raise NonInvertibleConstantTerm(
                    f"{name}_{sign * k} has a singular constant term", {"index": sign * k}
                )

    chain = TodaChain(kappa1, kappa_m1, tuple(a_seq), tuple(b_seq), tuple(thetas), tuple(etas), nmax, mmax)
    logger.debug(
        f"TODA: chain d={chain.dim} nmax={nmax} mmax={mmax} reliable orders {chain.reliable_orders()}"
    )
    return chain


def theta(chain: TodaChain, n: int) -> SeriesElement:
    """theta_n for 0 <= n <= nmax; below zero theta_n = eta_{n-1}^{-1}."""
    if n > chain.nmax:
        raise IndexError(f"theta_{n} is beyond the chain depth {chain.nmax}")
    if n >= 0:
        return chain.theta_seq[n]
    return _cached_inverse(chain, "eta", n - 1)


def eta(chain: TodaChain, m: int) -> SeriesElement:
    """eta_m for -mmax <= m <= 0; above zero eta_m = theta_{m+1}^{-1}."""
    if m < -chain.mmax:
        raise IndexError(f"eta_{m} is beyond the chain depth {chain.mmax}")
    if m <= 0:
        return chain.eta_seq[-m]
    return _cached_inverse(chain, "theta", m + 1)


def _cached_inverse(chain: TodaChain, name: str, index: int) -> SeriesElement:
    key = (name, index)
    with chain._lock:
        if key in chain._inverses:
            return chain._inverses[key]
    # outside the lock: theta and eta lookups recurse into this cache
    value = (theta(chain, index) if name == "theta" else eta(chain, index)).inv()
    with chain._lock:
        return chain._inverses.setdefault(key, value)


def theta_inv(chain: TodaChain, n: int) -> SeriesElement:
    return _cached_inverse(chain, "theta", n)


def eta_inv(chain: TodaChain, m: int) -> SeriesElement:
    return _cached_inverse(chain, "eta", m)


def toda_residual_theta(chain: TodaChain, n: int) -> SeriesElement:
    """(theta_n' theta_n^-1)' - theta_{n+1} theta_n^-1 + theta_n theta_{n-1}^-1."""
    th = theta(chain, n)
    th_inv = theta_inv(chain, n)
    left = (th.deriv() * th_inv).deriv()
    return left - theta(chain, n + 1) * th_inv + th * theta_inv(chain, n - 1)


def toda_residual_eta(chain: TodaChain, m: int) -> SeriesElement:
    """(eta_m^-1 eta_m')' - eta_m^-1 eta_{m-1} + eta_{m+1}^-1 eta_m."""
    et = eta(chain, m)
    et_inv = eta_inv(chain, m)
    left = (et_inv * et.deriv()).deriv()
    return left - et_inv * eta(chain, m - 1) + eta_inv(chain, m + 1) * et


def scalar_toda_log_residual(chain: TodaChain, n: int) -> SeriesElement:
    """Commutative form (ln theta_n)'' - theta_{n+1}/theta_n + theta_n/theta_{n-1}, via theta^-1 theta'."""
    if chain.dim != 1:
        raise DimensionMismatch("the logarithmic form needs d = 1", {"dim": chain.dim})
    th = theta(chain, n)
    th_inv = theta_inv(chain, n)
    left = (th_inv * th.deriv()).deriv()
    return left - theta(chain, n + 1) * th_inv + th * theta_inv(chain, n - 1)


@dataclass(frozen=True)
class ScalarKappaChain:
    """kappa_n for -nmax <= n <= nmax as d = 1 series, kappa_0 = 1."""

    kappas: Dict[int, SeriesElement]
    nmax: int

    def kappa(self, n: int) -> SeriesElement:
        if abs(n) > self.nmax:
            raise IndexError(f"kappa_{n} is beyond the chain depth {self.nmax}")
        return self.kappas[n]

    @property
    def kappa1(self) -> SeriesElement:
        return self.kappas[1]

    @property
    def kappa_m1(self) -> SeriesElement:
        return self.kappas[-1]


def scalar_kappa_chain(kappa1: SeriesElement, kappa_m1: SeriesElement, nmax: int) -> ScalarKappaChain:
    """kappa_n as |n| x |n| Hankel determinants of a_n (n > 0) and b_n (n < 0)."""
    if kappa1.dim != 1 or kappa_m1.dim != 1:
        raise DimensionMismatch("the kappa chain is scalar (d = 1)")
    a_seq = tuple(build_a_seq(kappa1, kappa_m1, max(2 * nmax - 2, 0)))
    b_seq = tuple(build_b_seq(kappa1, kappa_m1, max(2 * nmax - 2, 0)))
    kappas = {0: SeriesElement.one(1, kappa1.order, kappa1.exact)}
    for n in range(1, nmax + 1):
        kappas[n] = commutative_det(hankel(HankelSpec(a_seq, n - 1)))
        kappas[-n] = commutative_det(hankel(HankelSpec(b_seq, n - 1)))
    return ScalarKappaChain(kappas, nmax)


def kappa_bilinear_residual(chain: ScalarKappaChain, n: int) -> SeriesElement:
    """kappa_{n+1} kappa_{n-1} - kappa_n'' kappa_n + (kappa_n')^2 - kappa_-1 kappa_1 kappa_n^2."""
    k = chain.kappa(n)
    dk = k.deriv()
    return (
        chain.kappa(n + 1) * chain.kappa(n - 1)
        - dk.deriv() * k
        + dk * dk
        - chain.kappa_m1 * chain.kappa1 * k * k
    )
