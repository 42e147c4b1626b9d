"""
Check suites: one list of named checks per suite id.

Random data is drawn lazily per label from numpy generators seeded with
(scenario seed, crc32(label)), so a check sees the same inputs whatever
order the worker threads pick them up in.
"""

import itertools
import threading
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from src import coefficients as cf
from src.bilinear import (
    HirotaPair,
    bilkap_residual,
    hirota,
    kappa_bilinear_from_toda_residual,
    kappa_toda_bilinear_residual,
    tau_bilinear_residual_via_logderivs,
)
from src.errors import NCP4Error, NonInvertibleConstantTerm, SingularMinor
from src.ham import (
    WordPoly,
    canonical_substitution,
    check_canonical_equations,
    nc_hamiltonian_f,
    nc_hamiltonian_qpt,
    scalar_poisson_check,
    substitute,
    trace_gradient_discrepancy,
)
from src.lax import (
    LambdaMatrix,
    beta_from_alpha,
    betas_for_state,
    gauge_transform,
    jm_gauge,
    jm_pair,
    jm_pre_gauge_pair,
    ny_pair,
    perturb_state,
    zero_curvature_residual,
)
from src.painleve import (
    RELATIONS,
    Direction,
    Generator,
    P4State,
    admissible_kappa_initial_data,
    backlund_apply,
    construct_p4_from_toda,
    kappa_condition_residuals,
    p4_residual,
    p4_solve_series,
    scalar_p4_residual,
    scalar_zn,
    solve_kappa_conditions,
    third_condition_residual,
    translation_apply,
    transpose_state,
    weyl_relation_check,
)
from src.qdet import HankelSpec, RingMatrix, almost_hankel_qdet, commutative_det, hankel, quasidet
from src.residual_assessor import CheckOutcome
from src.ring import SeriesElement, sylvester_solve
from src.scenario import SUITE_IDS, Scenario
from src.toda import (
    build_toda_chain,
    eta,
    kappa_bilinear_residual,
    scalar_kappa_chain,
    scalar_toda_log_residual,
    theta,
    toda_residual_eta,
    toda_residual_theta,
)


@dataclass(frozen=True)
class Check:
    """A named check; `needs_p4` marks checks that only make sense for alpha sum 1."""

    check_id: str
    anchor: str
    run: Callable[[], CheckOutcome]
    needs_p4: bool = False


def _entries(matrix: LambdaMatrix) -> List[SeriesElement]:
    return [series for _, _, _, series in matrix.entries()]


class SuiteData:
    """Seeded, lazily built inputs shared by the checks of one run."""

    def __init__(self, scenario: Scenario, ctx: cf.RingContext, attempts: int = 25):
        self.scenario = scenario
        self.ctx = ctx
        self.exact = ctx.exact
        self.dim = scenario.dim
        self.order = scenario.order
        self.alphas = scenario.alpha_params
        self.attempts = attempts
        self._cache: Dict[str, Any] = {}
        self._lock = threading.Lock()

    def rng(self, label: str) -> np.random.Generator:
        return np.random.default_rng([self.scenario.seed, zlib.crc32(label.encode("utf-8"))])

    def draw(self, label: str, build: Callable[[np.random.Generator], Any]) -> Any:
        """Build once per label, redrawing while the data is singular."""
        with self._lock:
            if label in self._cache:
                return self._cache[label]
        rng = self.rng(label)
        last: Optional[NCP4Error] = None
        for attempt in range(self.attempts):
            try:
                value = build(rng)
                break
            except NCP4Error as e:
                last = e
                logger.debug(f"SUITE DATA: {label} draw {attempt} rejected: {e}")
        else:
            raise last
        with self._lock:
            return self._cache.setdefault(label, value)

    def depth(self, requested: int) -> int:
        """Chain depth the truncation order can support (a_{2p} must keep two orders)."""
        depth = max(2, min(requested, self.order // 2))
        if depth != requested:
            logger.debug(f"SUITE DATA: chain depth {requested} clamped to {depth} at order {self.order}")
        return depth

    # -------------------------------------------------------------- raw draws
    def series(self, rng: np.random.Generator, dim: Optional[int] = None, invertible: bool = False) -> SeriesElement:
        return SeriesElement.random(
            rng, dim or self.dim, self.order, self.exact, self.scenario.entry_range, invertible
        )

    def matrix(self, rng: np.random.Generator, key: str, dim: int, invertible: bool = False) -> np.ndarray:
        """Scenario-provided initial value when it fits, otherwise a random matrix."""
        if dim == self.dim:
            given = self.scenario.initial_matrix(key, self.exact)
            if given is not None:
                return given
        if invertible:
            return cf.random_invertible_matrix(rng, dim, self.exact, self.scenario.entry_range)
        return cf.random_matrix(rng, dim, self.exact, self.scenario.entry_range)

    # -------------------------------------------------------------- shared objects
    def solved_state(self, dim: Optional[int] = None, zero_integral: bool = True, a: Any = 1) -> P4State:
        """Solver output; with `zero_integral` f0(0) = -f1(0) - f2(0) so that f0 + f1 + f2 = t."""
        dim = dim or self.dim

        def build(rng):
            f1 = self.matrix(rng, "f1", dim, invertible=True)
            f2 = self.matrix(rng, "f2", dim, invertible=True)
            f0 = -(f1 + f2) if zero_integral else self.matrix(rng, "f0", dim, invertible=True)
            if not cf.is_invertible(f0):
                raise NonInvertibleConstantTerm("f0(0) is singular")
            return p4_solve_series(f0, f1, f2, self.alphas, a=a, order=self.order, exact=self.exact)

        tag = "zero" if zero_integral else "free"
        return self.draw(f"state/d{dim}/{tag}/a{a}", build)

    def toda_chain(self):
        nmax, mmax = self.depth(self.scenario.nmax), self.depth(self.scenario.mmax)

        def build(rng):
            return build_toda_chain(self.series(rng, invertible=True), self.series(rng, invertible=True), nmax, mmax)

        return self.draw("toda/chain", build)

    def scalar_kappas(self, depth: int):
        """Random d = 1 kappa chain (no conditions imposed)."""
        depth = self.depth(depth)

        def build(rng):
            return scalar_kappa_chain(self.series(rng, 1), self.series(rng, 1), depth)

        return self.draw(f"kappa/random/{depth}", build)

    def admissible_initial(self, rng: np.random.Generator, dim: int):
        """Initial kappa data satisfying the third condition blockwise.

        d = 1 honours the scenario's kappa1, kappa1_prime and kappa_m1; for d > 1
        the data is P diag(scalar admissible data) P^-1 with a random constant P.
        """
        if dim == 1:
            keys = ("kappa1", "kappa1_prime", "kappa_m1")
            diagonal = [tuple(self.matrix(rng, key, 1, invertible=True)[0, 0] for key in keys)]
            return admissible_kappa_initial_data(diagonal, self.alphas, exact=self.exact)
        r = self.scenario.entry_range
        diagonal = [tuple(cf.random_invertible_matrix(rng, 1, self.exact, r)[0, 0] for _ in range(3)) for _ in range(dim)]
        conjugator = cf.random_invertible_matrix(rng, dim, self.exact, r)
        return admissible_kappa_initial_data(diagonal, self.alphas, conjugator, self.exact)

    def kappa_solution(self, dim: int, admissible: bool = False):
        """(kappa_1, kappa_-1) solving both conditions; `admissible` also imposes the third."""

        def build(rng):
            if admissible:
                initial = self.admissible_initial(rng, dim)
            else:
                initial = (
                    self.matrix(rng, "kappa1", dim, invertible=True),
                    self.matrix(rng, "kappa1_prime", dim),
                    self.matrix(rng, "kappa_m1", dim, invertible=True),
                    self.matrix(rng, "kappa_m1_prime", dim),
                )
            return solve_kappa_conditions(*initial, self.alphas, self.order, self.exact)

        return self.draw(f"kappa/solved/d{dim}/{'admissible' if admissible else 'free'}", build)

    def toda_to_p4(self):
        """Chain from admissible kappa data plus every construction the suite inspects."""
        depth = self.depth(3)
        indices = ((0, Direction.POSITIVE), (1, Direction.POSITIVE), (0, Direction.NEGATIVE), (-1, Direction.NEGATIVE))

        def build(rng):
            initial = self.admissible_initial(rng, self.dim)
            kappa1, kappa_m1 = solve_kappa_conditions(*initial, self.alphas, self.order, self.exact)
            chain = build_toda_chain(kappa1, kappa_m1, depth, depth)
            built = {(n, d): construct_p4_from_toda(chain, n, d, self.alphas) for n, d in indices}
            return chain, built

        return self.draw("toda2p4/constructions", build)


# ------------------------------------------------------------------ ring
def ring_checks(data: SuiteData) -> List[Check]:
    def inverse():
        x = data.draw("ring/invertible", lambda rng: data.series(rng, invertible=True))
        x_inv = x.inv()
        return CheckOutcome([x * x_inv - 1, x_inv * x - 1])

    def leibniz():
        x, y = data.draw("ring/pair", lambda rng: (data.series(rng), data.series(rng)))
        return CheckOutcome([(x * y).deriv() - x.deriv() * y - x * y.deriv()])

    def associativity():
        x, y, z = data.draw("ring/triple", lambda rng: tuple(data.series(rng) for _ in range(3)))
        return CheckOutcome([(x * y) * z - x * (y * z)])

    def sylvester():
        # a diagonal shift of d * r + 1 keeps every eigenvalue in Re > 0
        shift = data.dim * data.scenario.entry_range + 1

        def build(rng):
            return data.series(rng) + shift, data.series(rng) + shift, data.series(rng)

        a, b, s = data.draw("ring/sylvester", build)
        x = sylvester_solve(a, b, s, data.ctx)
        return CheckOutcome([a * x + x * b - s])

    return [
        Check("ring.inverse", "two-sided inverse of a unit series", inverse),
        Check("ring.leibniz", "Leibniz rule of d/dt", leibniz),
        Check("ring.associativity", "associativity of the series product", associativity),
        Check("ring.sylvester", "order-by-order Sylvester solve", sylvester),
    ]


# ------------------------------------------------------------------ qdet
def qdet_checks(data: SuiteData) -> List[Check]:
    samples = data.scenario.qdet_samples

    def commutative_ratio():
        def build(rng):
            out = []
            while len(out) < samples:
                size = 2 + len(out) % 3
                x = RingMatrix([[data.series(rng, 1) for _ in range(size)] for _ in range(size)])
                i, j = (int(v) for v in rng.integers(0, size, size=2))
                try:
                    out.append((x, i, j, quasidet(x, i, j)))
                except SingularMinor:
                    continue
            return out

        residuals = []
        for x, i, j, q in data.draw("qdet/commutative", build):
            sign = -1 if (i + j) % 2 else 1
            residuals.append(q * commutative_det(x.minor(i, j)) - commutative_det(x) * sign)
        return CheckOutcome(residuals)

    def almost_hankel():
        def build(rng):
            # overrides up to (n + 2, n + 2) reach x_{2n+4}
            sequence = tuple(data.series(rng) for _ in range(2 * 3 + 5))
            out = []
            for n in (1, 2, 3):
                for i, j in itertools.product(range(n + 3), repeat=2):
                    if i < n or j < n:
                        out.append(almost_hankel_qdet(HankelSpec(sequence, n, (i, j))))
            return out

        return CheckOutcome(list(data.draw("qdet/almost-hankel", build)))

    def theta_two():
        a = data.draw("qdet/theta2", lambda rng: [data.series(rng, invertible=True) for _ in range(3)])
        worked = a[2] - a[1] * a[0].inv() * a[1]
        return CheckOutcome([quasidet(hankel(HankelSpec(tuple(a), 1)), 1, 1) - worked])

    return [
        Check("qdet.commutative-ratio", "quasideterminant as a determinant ratio (d = 1)", commutative_ratio),
        Check("qdet.almost-hankel-vanishing", "vanishing of degenerate almost-Hankel quasideterminants", almost_hankel),
        Check("qdet.theta2", "2x2 Hankel quasideterminant a2 - a1 a0^-1 a1", theta_two),
    ]


# ------------------------------------------------------------------ toda
def toda_checks(data: SuiteData) -> List[Check]:
    nmax, mmax = data.depth(data.scenario.nmax), data.depth(data.scenario.mmax)
    checks: List[Check] = []

    for n in range(0, nmax):
        checks.append(
            Check(
                f"toda.theta.n={n}",
                "noncommutative Toda chain for theta",
                lambda n=n: CheckOutcome([toda_residual_theta(data.toda_chain(), n)]),
            )
        )
    for m in range(0, -mmax, -1):
        checks.append(
            Check(
                f"toda.eta.m={m}",
                "noncommutative Toda chain for eta",
                lambda m=m: CheckOutcome([toda_residual_eta(data.toda_chain(), m)]),
            )
        )

    def boundary():
        chain = data.toda_chain()
        return CheckOutcome([theta(chain, 0) * eta(chain, -1) - 1, eta(chain, 0) * theta(chain, 1) - 1])

    checks.append(Check("toda.boundary", "theta_0 = eta_-1^-1 and eta_0 = theta_1^-1", boundary))

    if data.dim == 1:
        def kappa_bilinear():
            chain = data.scalar_kappas(nmax)
            return CheckOutcome([kappa_bilinear_residual(chain, n) for n in range(-(chain.nmax - 1), chain.nmax)])

        def theta_ratio():
            chain = data.toda_chain()
            kappas = scalar_kappa_chain(chain.kappa1, chain.kappa_m1, nmax)
            return CheckOutcome(
                [theta(chain, n) - kappas.kappa(n) * kappas.kappa(n - 1).inv() for n in range(1, nmax + 1)]
            )

        def log_form():
            chain = data.toda_chain()
            return CheckOutcome([scalar_toda_log_residual(chain, n) for n in range(1, nmax)])

        checks += [
            Check("toda.kappa-bilinear", "Hankel-determinant kappa_n bilinear Toda equation", kappa_bilinear),
            Check("toda.theta-kappa-ratio", "theta_n = kappa_n kappa_{n-1}^-1 (d = 1)", theta_ratio),
            Check("toda.log-form", "logarithmic Toda equation (d = 1)", log_form),
        ]
    return checks


# ------------------------------------------------------------------ p4
def p4_checks(data: SuiteData) -> List[Check]:
    a = data.scenario.a_value

    def solver():
        return CheckOutcome(list(p4_residual(data.solved_state(zero_integral=False, a=a))))

    def first_integral():
        state = data.solved_state(zero_integral=False, a=a)
        # (f0 + f1 + f2)' = alpha_0 + alpha_1 + alpha_2 for every a
        total = state.f0 + state.f1 + state.f2
        return CheckOutcome([total.deriv() - data.alphas.total])

    def transpose():
        state = data.solved_state(zero_integral=False, a=a)
        image = transpose_state(state)
        return CheckOutcome(list(p4_residual(image)), verdict=image.a_param == 1 - state.a_param)

    checks = [
        Check("p4.solver", "symmetric noncommutative P4 system", solver),
        Check("p4.first-integral", "(f0 + f1 + f2)' equals the alpha sum", first_integral),
        Check("p4.transpose", "transposition maps parameter a to 1 - a", transpose),
    ]
    if data.dim == 1:
        def scalar():
            state = data.solved_state(dim=1)
            return CheckOutcome([scalar_p4_residual(state.f2, 0, state.alphas)])

        checks.append(Check("p4.scalar-equation", "f2 solves the scalar P4 equation (d = 1)", scalar, needs_p4=True))
    return checks


# ------------------------------------------------------------------ backlund
def backlund_checks(data: SuiteData) -> List[Check]:
    checks: List[Check] = []

    def report():
        state = data.solved_state()
        return data.draw("backlund/weyl", lambda rng: weyl_relation_check(state))

    for k, (name, _, _) in enumerate(RELATIONS):
        def relation(k=k):
            record = report().relations[k]
            if record.error is not None:
                raise record.error
            return CheckOutcome(record.residuals, verdict=record.passed)

        checks.append(Check(f"backlund.relation.{k:02d}", name, relation))

    for g in Generator:
        checks.append(
            Check(
                f"backlund.covariance.{g.value}",
                f"{g.value} maps solutions to solutions",
                lambda g=g: CheckOutcome(list(p4_residual(backlund_apply(g, data.solved_state())))),
            )
        )

    total = data.alphas.total
    shifts = {1: (total, -total, 0), 2: (0, total, -total), 3: (-total, 0, total)}
    for index, shift in shifts.items():
        def translation(index=index, shift=shift):
            state = data.solved_state()
            image = translation_apply(index, 1, state)
            moved = tuple(x + s for x, s in zip(state.alphas.as_tuple(), shift))
            return CheckOutcome(list(p4_residual(image)), verdict=image.alphas.as_tuple() == moved)

        checks.append(Check(f"backlund.translation.T{index}", f"T{index} shifts alpha by {shift}", translation))

    def inverse():
        state = data.solved_state()
        back = translation_apply(1, -1, translation_apply(1, 1, state))
        return CheckOutcome([x - y for x, y in zip(back.fs, state.fs)], verdict=back.alphas == state.alphas)

    checks.append(Check("backlund.translation.inverse", "T1^-1 T1 = 1", inverse))

    if data.dim == 1:
        def lattice_scalar():
            state = data.solved_state(dim=1)
            return CheckOutcome([scalar_p4_residual(translation_apply(1, 1, state).f2, 1, state.alphas)])

        checks.append(
            Check("backlund.t1-scalar", "T1 image solves the scalar P4 of lattice index 1", lattice_scalar, needs_p4=True)
        )
    return checks


# ------------------------------------------------------------------ toda2p4
def toda2p4_checks(data: SuiteData) -> List[Check]:
    checks: List[Check] = []
    for n, direction in ((0, Direction.POSITIVE), (1, Direction.POSITIVE), (0, Direction.NEGATIVE), (-1, Direction.NEGATIVE)):
        def construction(n=n, direction=direction):
            _, built = data.toda_to_p4()
            state, bundle = built[(n, direction)]
            # admissible data: hypotheses and conclusion both vanish through their reliable orders
            return CheckOutcome(
                list(p4_residual(state)),
                verdict=bundle.holds(data.ctx),
                details={"hypothesis": bundle.orders()},
            )

        label = "n" if direction is Direction.POSITIVE else "m"
        checks.append(
            Check(
                f"toda2p4.{direction.value}.{label}={n}",
                f"P4 solution from the Toda chain ({direction.value} direction)",
                construction,
                needs_p4=True,
            )
        )

    def conditions():
        kappa1, kappa_m1 = data.kappa_solution(data.dim)
        return CheckOutcome(list(kappa_condition_residuals(kappa1, kappa_m1, data.alphas)))

    checks.append(Check("toda2p4.kappa-conditions", "series solution of the kappa conditions", conditions, needs_p4=True))

    if data.dim == 1:
        def third():
            kappa1, kappa_m1 = data.kappa_solution(1, admissible=True)
            return CheckOutcome([third_condition_residual(kappa1, kappa_m1, data.alphas)])

        def scalar_system():
            kappa1, kappa_m1 = data.kappa_solution(1, admissible=True)
            zn = scalar_zn(scalar_kappa_chain(kappa1, kappa_m1, 2), 0, data.alphas)
            return CheckOutcome([zn.y_system_residual(), zn.z_condition_residual()])

        def scalar_p4():
            kappa1, kappa_m1 = data.kappa_solution(1, admissible=True)
            zn = scalar_zn(scalar_kappa_chain(kappa1, kappa_m1, 2), 0, data.alphas)
            return CheckOutcome([scalar_p4_residual(zn.y, 0, data.alphas)])

        def f2_matches_y():
            chain, built = data.toda_to_p4()
            state, _ = built[(0, Direction.POSITIVE)]
            zn = scalar_zn(scalar_kappa_chain(chain.kappa1, chain.kappa_m1, 2), 0, data.alphas)
            return CheckOutcome([state.f2 - zn.y])

        checks += [
            Check("toda2p4.third-condition", "third scalar condition on admissible data", third, needs_p4=True),
            Check("toda2p4.scalar-system", "scalar (y, z) system at n = 0", scalar_system, needs_p4=True),
            Check("toda2p4.scalar-p4", "y_0 solves the scalar P4 equation", scalar_p4, needs_p4=True),
            Check("toda2p4.f2-equals-y", "f2 of the construction equals y_0", f2_matches_y, needs_p4=True),
        ]
    return checks


# ------------------------------------------------------------------ lax
def lax_checks(data: SuiteData) -> List[Check]:
    beta2 = data.scenario.beta2_value

    def ny(perturb: bool = False, lattice: int = 0):
        state = data.solved_state()
        if lattice:
            state = translation_apply(1, lattice, state)
        betas = betas_for_state(state, lattice, Fraction(0) if beta2 is None else beta2)
        if perturb:
            state = perturb_state(state, 0, 1)
        a, b = ny_pair(state, betas)
        return CheckOutcome(_entries(zero_curvature_residual(a, b)), expect_nonzero=perturb)

    def jm(perturb: bool = False):
        state = data.solved_state()
        betas = betas_for_state(state, 0, Fraction(-1) if beta2 is None else beta2)
        if perturb:
            state = perturb_state(state, 0, 1)
        a, b = jm_pair(state, betas)
        return CheckOutcome(_entries(zero_curvature_residual(a, b)), expect_nonzero=perturb)

    def roundtrip():
        ok = True
        for n in range(3):
            betas = beta_from_alpha(data.alphas, n, Fraction(0) if beta2 is None else beta2)
            ok = ok and betas.alphas() == data.alphas and betas.effective_alphas() == data.alphas.lattice_shift(n)
        return CheckOutcome(verdict=ok)

    checks = [
        Check("lax.ny.zero-curvature", "3x3 Lax pair compatibility", ny, needs_p4=True),
        Check("lax.ny.perturbed", "3x3 compatibility fails off solutions", lambda: ny(perturb=True), needs_p4=True),
        Check("lax.ny.lattice", "3x3 pair of lattice index 1 on the T1 image", lambda: ny(lattice=1), needs_p4=True),
        Check("lax.beta-roundtrip", "beta <-> alpha parameter map", roundtrip, needs_p4=True),
        Check("lax.jm.zero-curvature", "2x2 Lax pair compatibility (beta_2 = -1)", jm, needs_p4=True),
        Check("lax.jm.perturbed", "2x2 compatibility fails off solutions", lambda: jm(perturb=True), needs_p4=True),
    ]

    if data.scenario.with_intermediate:
        def gauge():
            state = data.solved_state()
            betas = betas_for_state(state, 0, Fraction(-1) if beta2 is None else beta2)
            g, g_inv = jm_gauge(state)
            ga, gb = gauge_transform(*jm_pre_gauge_pair(state, betas), g, g_inv)
            a, b = jm_pair(state, betas)
            return CheckOutcome(_entries(ga - a) + _entries(gb - b))

        checks.append(Check("lax.jm.gauge", "gauge by [[1, f2], [0, 1]] to the 2x2 pair", gauge, needs_p4=True))
    return checks


# ------------------------------------------------------------------ ham
def ham_checks(data: SuiteData) -> List[Check]:
    def trace_gradient():
        def build(rng):
            return {s: data.matrix(rng, f"_{s}", data.dim) for s in ("q", "p", "e")}

        values = data.draw("ham/matrices", build)
        assignment = {"q": values["q"], "p": values["p"]}
        gaps = []
        for length in range(1, 5):
            for word in itertools.product("qp", repeat=length):
                poly = WordPoly({tuple(word): Fraction(1)})
                for x in sorted(set(word)):
                    gaps.append(trace_gradient_discrepancy(poly, x, assignment, values["e"]))
        return CheckOutcome(discrepancies=gaps, discrepancy_tol=1e-6)

    def substitution():
        lhs = substitute(nc_hamiltonian_f(1, 1, data.alphas), canonical_substitution())
        return CheckOutcome(verdict=(lhs - nc_hamiltonian_qpt(data.alphas)).is_zero())

    def canonical():
        result = check_canonical_equations(data.solved_state())
        return CheckOutcome([result.q, result.p])

    checks = [
        Check("ham.trace-gradient", "cyclic gradient is the trace gradient", trace_gradient),
        Check("ham.substitution", "H(t - q - p, q, p) = H(q, p, t)", substitution),
        Check("ham.canonical", "canonical equations q' = -dH/dp, p' = dH/dq", canonical),
    ]
    if data.dim == 1:
        checks.append(
            Check(
                "ham.poisson",
                "Poisson bracket flow of H (d = 1)",
                lambda: CheckOutcome(list(scalar_poisson_check(data.solved_state(dim=1)))),
            )
        )
    return checks


# ------------------------------------------------------------------ bilinear
def bilinear_checks(data: SuiteData) -> List[Check]:
    max_power = 4

    def pair():
        return data.draw("bilinear/pair", lambda rng: (data.series(rng, 1), data.series(rng, 1)))

    def antisymmetry():
        f, g = pair()
        return CheckOutcome(
            [hirota(n, HirotaPair(f, g)) - hirota(n, HirotaPair(g, f)) * (-1) ** n for n in range(1, max_power + 1)]
        )

    def with_one():
        f, _ = pair()
        out, derivative = [], f
        for n in range(1, max_power + 1):
            derivative = derivative.deriv()
            out.append(hirota(n, HirotaPair(f, f.like_scalar(1))) - derivative)
        return CheckOutcome(out)

    def kappa_toda():
        chain = data.scalar_kappas(4)
        span = range(-(chain.nmax - 1), chain.nmax)
        return CheckOutcome([kappa_toda_bilinear_residual(chain, n) for n in span])

    def cross_check():
        chain = data.scalar_kappas(4)
        span = range(-(chain.nmax - 1), chain.nmax)
        return CheckOutcome([kappa_bilinear_from_toda_residual(chain, n) for n in span])

    def bilkap(n: int):
        kappa1, kappa_m1 = data.kappa_solution(1)
        return CheckOutcome([bilkap_residual(scalar_kappa_chain(kappa1, kappa_m1, 2), n, data.alphas)])

    def tau(shifts: Sequence = (0, 0, 0)):
        perturbed = any(shifts)
        return CheckOutcome(
            list(tau_bilinear_residual_via_logderivs(data.solved_state(dim=1, zero_integral=False), shifts)),
            expect_nonzero=perturbed,
        )

    return [
        Check("bilinear.hirota-antisymmetry", "D^n g.f = (-1)^n D^n f.g", antisymmetry),
        Check("bilinear.hirota-unit", "D^n f.1 = f^(n)", with_one),
        Check("bilinear.kappa-toda", "Hirota form of the kappa Toda equation", kappa_toda),
        Check("bilinear.kappa-cross-check", "Hirota form agrees with the Toda-module form", cross_check),
        Check("bilinear.bilkap.n=0", "bilinear kappa_0, kappa_1 equation", lambda: bilkap(0), needs_p4=True),
        Check("bilinear.bilkap.n=-1", "bilinear kappa_-1, kappa_0 equation", lambda: bilkap(-1), needs_p4=True),
        Check("bilinear.tau", "tau-function bilinear equations via Hamiltonians", tau, needs_p4=True),
        Check("bilinear.tau.perturbed", "tau equations fail for shifted Hamiltonians", lambda: tau((1, 0, 0)), needs_p4=True),
    ]


SUITES: Dict[str, Callable[[SuiteData], List[Check]]] = {
    "ring": ring_checks,
    "qdet": qdet_checks,
    "toda": toda_checks,
    "p4": p4_checks,
    "backlund": backlund_checks,
    "toda2p4": toda2p4_checks,
    "lax": lax_checks,
    "ham": ham_checks,
    "bilinear": bilinear_checks,
}


def build_checks(scenario: Scenario, ctx: cf.RingContext, suite: Optional[str] = None) -> List[Check]:
    """Every check of the selected suites; alpha-sum-1 checks are left out for Lotka-Volterra."""
    if suite is not None and suite != "all" and suite not in SUITE_IDS:
        raise KeyError(f"unknown suite {suite!r}")
    data = SuiteData(scenario, ctx)
    checks: List[Check] = []
    for suite_id in scenario.selected_suites(suite):
        for check in SUITES[suite_id](data):
            if check.needs_p4 and scenario.lotka_volterra:
                logger.debug(f"SUITE: {check.check_id} skipped for alpha sum 0")
                continue
            checks.append(check)
    return checks
