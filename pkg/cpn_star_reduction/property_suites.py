"""Seeded property suites for the star products and their reduction.

Every suite is a function ``(rng, cfg) -> SuiteResult``. Random instances come
from ``InstanceGenerator``; each failing instance is recorded as a witness in
the input grammar so it can be replayed through the CLI.

Example:
    from property_suites import SuiteConfig, run_suite

    result = run_suite("qmm", SuiteConfig(n=1, order=3), seed=7)
    result.ok             # True
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from tools.classification import (
    Verdict,
    default_basis,
    cor42_check,
    equivalence_verdict,
    lemma41_check,
)
from tools.errors import NotInIdealError, StarReductionError
from tools.expr_parser import format_expr, format_series
from tools.function_ring import FuncExpr, LambdaFuncSeries, fe_grading
from tools.reduction import (
    ReducedElement,
    ReductionContext,
    ideal_divide,
    ideal_generator,
    ideal_member,
    momentum_map,
    quantum_momentum,
    reduce_at_mu,
    reduced_star,
)
from tools.scalars import GaussianRational, TruncUniSeries, series_invert
from tools.star_products import (
    DSeries,
    m_r_apply,
    poisson_bracket,
    star_hom_coefficients,
    star_invariant,
    wick_commutator,
    wick_product,
)

logger = logging.getLogger(__name__)

COEFFICIENTS: Tuple[GaussianRational, ...] = (
    GaussianRational(1),
    GaussianRational(-1),
    GaussianRational(2),
    GaussianRational(Fraction(1, 2)),
    GaussianRational(Fraction(-1, 3)),
    GaussianRational(0, 1),
    GaussianRational(1, 1),
    GaussianRational(0, Fraction(-1, 2)),
)

# d_r values; zero is listed twice so sparse D-series are common
D_VALUES: Tuple[Fraction, ...] = (
    Fraction(0),
    Fraction(0),
    Fraction(1),
    Fraction(-1),
    Fraction(2),
    Fraction(1, 2),
    Fraction(-1, 3),
)

# D = 1, 1 + l, 1 + l^2
D_TAILS: Tuple[Tuple[int, ...], ...] = ((), (1,), (0, 1))

HALF_I = GaussianRational(0, Fraction(1, 2))


@dataclass(frozen=True)
class SuiteConfig:
    n: int = 1
    order: int = 4
    mu: Fraction = Fraction(-1, 2)
    instances: Optional[int] = None
    basis_degree: int = 1

    def count(self, default: int) -> int:
        return self.instances if self.instances is not None else default

    @property
    def context(self) -> ReductionContext:
        return ReductionContext(n=self.n, mu=self.mu)


@dataclass
class SuiteResult:
    suite: str
    passed: int = 0
    failed: int = 0
    witnesses: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    @property
    def total(self) -> int:
        return self.passed + self.failed

    def check(self, index: int, predicate: Callable[[], bool], witness: Callable[[], str]) -> bool:
        """Run one instance; exceptions from the kernel count as failures."""
        try:
            ok = bool(predicate())
            reason = ""
        except StarReductionError as exc:
            ok = False
            reason = f" ({type(exc).__name__}: {exc})"
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.witnesses.append(f"#{index}: {witness()}{reason}")
            logger.error("suite %s: instance %d failed", self.suite, index)
        return ok


# -----------------------------
# Random instances
# -----------------------------


class InstanceGenerator:
    """Bounded random inputs: monomial degrees <= 3, x-exponents in [-2, 2]."""

    def __init__(self, rng: Random, n: int):
        self.rng = rng
        self.n = n

    def coefficient(self) -> GaussianRational:
        return self.rng.choice(COEFFICIENTS)

    def _exponents(self, degree: int) -> Tuple[int, ...]:
        counts = [0] * (self.n + 1)
        for _ in range(degree):
            counts[self.rng.randrange(self.n + 1)] += 1
        return tuple(counts)

    def _sum(self, terms: Sequence[FuncExpr]) -> FuncExpr:
        total = FuncExpr.zero(self.n)
        for term in terms:
            total = total + term
        return total

    def polynomial(self, max_degree: int = 3, max_terms: int = 3) -> FuncExpr:
        """Polynomial in z, zb without x; generally not invariant."""
        terms = []
        for _ in range(self.rng.randint(1, max_terms)):
            total = self.rng.randint(0, max_degree)
            holo = self.rng.randint(0, total)
            terms.append(
                FuncExpr.monomial(
                    self._exponents(holo), self._exponents(total - holo), 0, self.coefficient()
                )
            )
        return self._sum(terms)

    def homogeneous_term(self, max_degree: int = 2) -> FuncExpr:
        d = self.rng.randint(0, max_degree)
        return FuncExpr.monomial(self._exponents(d), self._exponents(d), -d, self.coefficient())

    def homogeneous(self, max_degree: int = 2, max_terms: int = 2) -> FuncExpr:
        return self._sum([self.homogeneous_term(max_degree) for _ in range(self.rng.randint(1, max_terms))])

    def invariant(self, max_terms: int = 2, max_degree: int = 2) -> FuncExpr:
        """Sums of (homogeneous monomial of degree <= max_degree) * x^p, p in [-2, 2]."""
        terms = []
        for _ in range(self.rng.randint(1, max_terms)):
            terms.append(self.homogeneous_term(max_degree).times_x(self.rng.randint(-2, 2)))
        return self._sum(terms)

    def invariant_series(self, order: int) -> LambdaFuncSeries:
        """Invariant order-0 coefficient, and half the time an invariant lambda^1 coefficient."""
        coeffs = [self.invariant()]
        if order >= 1 and self.rng.random() < 0.5:
            coeffs.append(self.invariant(max_terms=1))
        return LambdaFuncSeries.from_coeffs(coeffs, order, n=self.n)

    def dseries(self, order: int) -> DSeries:
        return DSeries.from_d([self.rng.choice(D_VALUES) for _ in range(order)], order)

    def divergent_pair(self, k: int, order: int) -> Tuple[DSeries, DSeries]:
        """D, D' whose C-series agree below lambda^k and differ at lambda^k."""
        c = [Fraction(1)] + [self.rng.choice(D_VALUES) for _ in range(order)]
        c_prime = list(c)
        c_prime[k] = c[k] + self.rng.choice([v for v in D_VALUES if v])
        for r in range(k + 1, order + 1):
            c_prime[r] = self.rng.choice(D_VALUES)
        pair = []
        for values in (c, c_prime):
            d = series_invert(TruncUniSeries.from_coeffs(values, order))
            pair.append(DSeries.from_series(d))
        return pair[0], pair[1]


def _d_choice(index: int, order: int) -> DSeries:
    return DSeries.from_d(D_TAILS[index % len(D_TAILS)], order)


def _terms(**values) -> str:
    parts = []
    for name, value in values.items():
        if isinstance(value, FuncExpr):
            text = format_expr(value)
        elif isinstance(value, LambdaFuncSeries):
            text = format_series(value)
        elif isinstance(value, ReducedElement):
            text = format_series(value.series)
        else:
            text = str(value)
        parts.append(f"{name}={text}")
    return "; ".join(parts)


# -----------------------------
# Suites on the Wick product
# -----------------------------


def assoc_wick(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """(F*G)*H = F*(G*H) mod lambda^{N+1} for random polynomials."""
    result = SuiteResult("assoc-wick")
    gen, N = InstanceGenerator(rng, cfg.n), cfg.order
    for i in range(cfg.count(50)):
        F, G, H = gen.polynomial(), gen.polynomial(), gen.polynomial()
        result.check(
            i,
            lambda: wick_product(wick_product(F, G, N), H, N).equals(
                wick_product(F, wick_product(G, H, N), N)
            ),
            lambda: _terms(F=F, G=G, H=H),
        )
    return result


def zeroth_first_order(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """Order 0 of F*G is F G; order 1 of F*G - G*F is (i/2){F, G}."""
    result = SuiteResult("zeroth-first-order")
    gen = InstanceGenerator(rng, cfg.n)
    for i in range(cfg.count(50)):
        F, G = gen.polynomial(), gen.polynomial()

        def holds() -> bool:
            commutator = wick_commutator(F, G, 1)
            return wick_product(F, G, 1)[0].equals(F * G) and commutator[1].equals(
                poisson_bracket(F, G).scale(HALF_I)
            )

        result.check(i, holds, lambda: _terms(F=F, G=G))
    return result


def qmm(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """F*J - J*F = (i lambda/2){F, J} exactly for D = 1; S_D J is central among invariants."""
    result = SuiteResult("qmm")
    gen, N = InstanceGenerator(rng, cfg.n), cfg.order
    J = momentum_map(cfg.n)
    for i in range(cfg.count(20)):
        F = gen.polynomial()
        expected = LambdaFuncSeries.from_coeffs(
            [FuncExpr.zero(cfg.n), poisson_bracket(F, J).scale(HALF_I)], N, n=cfg.n
        )
        result.check(i, lambda: wick_commutator(F, J, N).equals(expected), lambda: _terms(F=F))

        D = gen.dseries(N)
        invariant = gen.invariant()
        S = quantum_momentum(D, N, cfg.n)

        def central() -> bool:
            commutator = star_invariant(invariant, S, D, N) - star_invariant(S, invariant, D, N)
            return all(c.is_zero() for c in commutator.coeffs) and poisson_bracket(invariant, J).is_zero()

        result.check(i, central, lambda: _terms(F=invariant, D=D))
    return result


def closure(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """Wick products of invariant functions have invariant coefficients."""
    result = SuiteResult("closure")
    gen, N = InstanceGenerator(rng, cfg.n), cfg.order
    for i in range(cfg.count(30)):
        F, G = gen.invariant(), gen.invariant()
        result.check(
            i,
            lambda: all(fe_grading(c).invariant for c in wick_product(F, G, N).coeffs),
            lambda: _terms(F=F, G=G),
        )
    return result


# -----------------------------
# Suites on *^D and the reduction
# -----------------------------


def assoc_invariant(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    result = SuiteResult("assoc-invariant")
    gen, N = InstanceGenerator(rng, cfg.n), cfg.order
    for i in range(cfg.count(20)):
        D = _d_choice(i, N)
        F, G, H = (gen.invariant_series(N) for _ in range(3))
        result.check(
            i,
            lambda: star_invariant(star_invariant(F, G, D, N), H, D, N).equals(
                star_invariant(F, star_invariant(G, H, D, N), D, N)
            ),
            lambda: _terms(D=D, F=F, G=G, H=H),
        )
    return result


def assoc_reduced(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """Associativity and the unit law of *^D_mu on homogeneous representatives."""
    result = SuiteResult("assoc-reduced")
    gen, N, ctx = InstanceGenerator(rng, cfg.n), cfg.order, cfg.context
    one = ReducedElement.of(FuncExpr.one(cfg.n), N)
    for i in range(cfg.count(20)):
        D = _d_choice(i, N)
        phi, psi, chi = (ReducedElement.of(gen.homogeneous(), N) for _ in range(3))

        def holds() -> bool:
            left = reduced_star(reduced_star(phi, psi, D, ctx, N), chi, D, ctx, N)
            right = reduced_star(phi, reduced_star(psi, chi, D, ctx, N), D, ctx, N)
            unit = reduced_star(phi, one, D, ctx, N).equals(phi) and reduced_star(one, phi, D, ctx, N).equals(phi)
            return left.equals(right) and unit

        result.check(i, holds, lambda: _terms(D=D, phi=phi, psi=psi, chi=chi))
    return result


def compat(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """Reduction is multiplicative: (F *^D G)_mu = F_mu *^D_mu G_mu."""
    result = SuiteResult("compat")
    gen, N, ctx = InstanceGenerator(rng, cfg.n), cfg.order, cfg.context
    for i in range(cfg.count(20)):
        D = _d_choice(i, N)
        F, G = gen.invariant_series(N), gen.invariant_series(N)
        result.check(
            i,
            lambda: reduce_at_mu(star_invariant(F, G, D, N), ctx).equals(
                reduced_star(reduce_at_mu(F, ctx), reduce_at_mu(G, ctx), D, ctx, N)
            ),
            lambda: _terms(D=D, F=F, G=G),
        )
    return result


def ideal(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """G *^D generator lies in the ideal and is recovered by division; F_mu != 0 is refuted."""
    result = SuiteResult("ideal")
    gen, N, ctx = InstanceGenerator(rng, cfg.n), cfg.order, cfg.context
    count = cfg.count(20)
    for i in range(count):
        D = _d_choice(i, N)
        G = gen.invariant_series(N)
        generator = ideal_generator(D, ctx, N)
        F = star_invariant(G, generator, D, N)

        def round_trip() -> bool:
            if not ideal_member(F, ctx):
                return False
            quotient = ideal_divide(F, D, ctx, N)
            return star_invariant(quotient, generator, D, N).equals(F)

        result.check(i, round_trip, lambda: _terms(D=D, G=G))

    for i in range(count, count + max(1, count // 2)):
        D = _d_choice(i, N)
        F = gen.homogeneous_term()

        def refuted() -> bool:
            if ideal_member(F, ctx):
                return False
            try:
                ideal_divide(F, D, ctx, N)
            except NotInIdealError:
                return True
            return False

        result.check(i, refuted, lambda: _terms(D=D, F=F))
    return result


# -----------------------------
# Suites on the classification
# -----------------------------


def lemma41(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """K-tables agree through row k; row k+1 differs by (c_k - c'_k) M_1, also as operators."""
    result = SuiteResult("lemma41")
    gen = InstanceGenerator(rng, cfg.n)
    for i in range(cfg.count(10)):
        k = 1 + i % 3
        N = k + 2
        D, Dp = gen.divergent_pair(k, N)
        f, g = gen.homogeneous(max_degree=1), gen.homogeneous(max_degree=1)

        def holds() -> bool:
            witness = lemma41_check(D, Dp, N)
            if not witness.holds or witness.k != k:
                return False
            difference = star_hom_coefficients(f, g, D, N)[k + 1] - star_hom_coefficients(f, g, Dp, N)[k + 1]
            return difference.equals(m_r_apply(1, f, g).scale(witness.delta))

        result.check(i, holds, lambda: _terms(D=D, Dprime=Dp, f=f, g=g))
    return result


def cor42(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """The reduced operator identity on every pair of the default basis."""
    result = SuiteResult("cor42")
    gen, ctx = InstanceGenerator(rng, cfg.n), cfg.context
    basis = default_basis(cfg.n, cfg.basis_degree)
    for i in range(cfg.count(10)):
        k = 1 + i % 3
        N = k + 2
        D, Dp = gen.divergent_pair(k, N)
        result.check(i, lambda: cor42_check(D, Dp, ctx, N, basis), lambda: _terms(D=D, Dprime=Dp))
    return result


def verdict(rng: Random, cfg: SuiteConfig) -> SuiteResult:
    """Equivalent iff D and D' agree to order N; every fifth pair is identical."""
    result = SuiteResult("verdict")
    gen, N = InstanceGenerator(rng, cfg.n), cfg.order
    for i in range(cfg.count(50)):
        D = gen.dseries(N)
        Dp = D if i % 5 == 0 else gen.dseries(N)

        def holds() -> bool:
            report = equivalence_verdict(D, Dp, N)
            same = all(D.d_r(r) == Dp.d_r(r) for r in range(1, N + 1))
            if same:
                return report.verdict is Verdict.EQUIVALENT and report.first_divergence is None
            k = report.first_divergence
            return (
                report.verdict is Verdict.NON_EQUIVALENT
                and report.delta == D.c_r(k) - Dp.c_r(k)
                and (report.witness is None or report.witness.holds)
            )

        result.check(i, holds, lambda: _terms(D=D, Dprime=Dp))
    return result


SUITES: Dict[str, Callable[[Random, SuiteConfig], SuiteResult]] = {
    "assoc-wick": assoc_wick,
    "zeroth-first-order": zeroth_first_order,
    "qmm": qmm,
    "closure": closure,
    "assoc-invariant": assoc_invariant,
    "assoc-reduced": assoc_reduced,
    "compat": compat,
    "ideal": ideal,
    "lemma41": lemma41,
    "cor42": cor42,
    "verdict": verdict,
}


def run_suite(name: str, cfg: SuiteConfig, seed: int) -> SuiteResult:
    """Run one named suite on its own stream Random(f"{seed}:{name}")."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = Random(f"{seed}:{name}")
    result = SUITES[name](rng, cfg)
    logger.info("suite %s: %d passed, %d failed", name, result.passed, result.failed)
    return result


def run_suites(names: Sequence[str], cfg: SuiteConfig, seed: int) -> List[SuiteResult]:
    return [run_suite(name, cfg, seed) for name in names]
