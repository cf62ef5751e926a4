"""Tool: reduction
Momentum maps, the ideal generated by S_D J - D(lambda/(-2 mu)) mu, ideal
division and the reduced star products on CP^n.

Functions on CP^n are carried by their homogeneous pullbacks; the level
x = -2 mu of the constraint surface enters only through powers of -2 mu.

Example:
    from tools.reduction import ReductionContext, reduce_at_mu

    ctx = ReductionContext.from_text(1, "-1/2")
    reduce_at_mu(series, ctx)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

from tools.errors import NotHomogeneousError, NotInIdealError, PreconditionError
from tools.function_ring import (
    FuncExpr,
    LambdaFuncSeries,
    as_series,
    decompose_invariant,
    fe_is_zero,
    fe_mul,
)
from tools.star_products import (
    DSeries,
    SeriesLike,
    check_order,
    require_invariant,
    star_hom_coefficients,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReductionContext:
    """Fixed data (n, mu) of the reduction; mu is a negative rational."""

    n: int
    mu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.mu >= 0:
            raise PreconditionError(f"mu must be negative, got {self.mu}")
        if self.n < 0:
            raise PreconditionError(f"n must be non-negative, got {self.n}")

    @classmethod
    def from_text(cls, n: int, mu: str) -> "ReductionContext":
        try:
            value = Fraction(mu.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"mu must be a rational like '-1/2', got {mu!r}") from exc
        return cls(n=n, mu=value)

    @property
    def level(self) -> Fraction:
        """-2 mu, the value of x on the constraint surface."""
        return -2 * self.mu


@dataclass(frozen=True)
class ReducedElement:
    """An element of C^inf(CP^n)[[lambda]] given by homogeneous representatives."""

    series: LambdaFuncSeries

    def __post_init__(self):
        if not self.series.is_homogeneous():
            raise NotHomogeneousError("reduced elements need homogeneous coefficients")

    @classmethod
    def of(cls, value: Union[FuncExpr, LambdaFuncSeries, "ReducedElement"], order: int) -> "ReducedElement":
        if isinstance(value, ReducedElement):
            return value
        return cls(as_series(value, order))

    @property
    def order(self) -> int:
        return self.series.order

    def __getitem__(self, k: int) -> FuncExpr:
        return self.series[k]

    def equals(self, other: "ReducedElement") -> bool:
        return self.series.equals(other.series)


# -----------------------------
# Momentum maps
# -----------------------------


def momentum_map(n: int) -> FuncExpr:
    """J = -x/2."""
    return FuncExpr.x_power(1, n).scale(Fraction(-1, 2))


def quantum_momentum(D: DSeries, N: int, n: int) -> LambdaFuncSeries:
    """S_D J = D(lambda/x) J = -(x + sum_r d_r lambda^r x^{1-r}) / 2."""
    coeffs = [momentum_map(n)]
    for r in range(1, N + 1):
        coeffs.append(FuncExpr.x_power(1 - r, n).scale(D.d_r(r) * Fraction(-1, 2)))
    return LambdaFuncSeries(tuple(coeffs))


def is_strongly_invariant(D: DSeries) -> bool:
    """True iff S_D J = J, which happens only for D = 1."""
    return not any(D.d_r(r) for r in range(1, D.order + 1))


def ideal_generator(D: DSeries, ctx: ReductionContext, N: int) -> LambdaFuncSeries:
    """S_D J - D(lambda/(-2 mu)) mu; every coefficient vanishes at x = -2 mu."""
    qmm = quantum_momentum(D, N, ctx.n)
    coeffs = [qmm[0] - FuncExpr.constant(ctx.mu, ctx.n)]
    for r in range(1, N + 1):
        value = D.d_r(r) * (ctx.mu * ctx.level ** -r)
        coeffs.append(qmm[r] - FuncExpr.constant(value, ctx.n))
    return LambdaFuncSeries(tuple(coeffs))


# -----------------------------
# Restriction to the constraint surface
# -----------------------------


def _reduce_expr(f: FuncExpr, ctx: ReductionContext) -> FuncExpr:
    total = FuncExpr.zero(f.n)
    for h, p in decompose_invariant(f):
        total = total + h.scale(ctx.level ** p)
    return total


def reduce_at_mu(F: SeriesLike, ctx: ReductionContext) -> ReducedElement:
    """F_mu: per lambda-order, sum_p h_p x^p maps to sum_p h_p (-2 mu)^p."""
    F = as_series(F, 0)
    require_invariant(F, "F")
    return ReducedElement(F.map(lambda f: _reduce_expr(f, ctx)))


def ideal_member(F: SeriesLike, ctx: ReductionContext) -> bool:
    """F lies in the ideal iff F_mu vanishes at every lambda-order."""
    reduced = reduce_at_mu(F, ctx)
    return all(fe_is_zero(c) for c in reduced.series.coeffs)


def _divide_by_constraint(f: FuncExpr, ctx: ReductionContext, stage: int) -> FuncExpr:
    """Exact quotient f / (x - a), a = -2 mu, via synthetic division in x."""
    parts = decompose_invariant(f)
    if not parts:
        return FuncExpr.zero(f.n)
    a = ctx.level
    p_min = parts[0][1]
    degree = parts[-1][1] - p_min
    b = [FuncExpr.zero(f.n) for _ in range(degree + 1)]
    for h, p in parts:
        b[p - p_min] = h
    q: List[FuncExpr] = [FuncExpr.zero(f.n) for _ in range(degree)]
    if degree:
        q[degree - 1] = b[degree]
        for i in range(degree - 1, 0, -1):
            q[i - 1] = b[i] + q[i].scale(a)
        remainder = b[0] + q[0].scale(a)
    else:
        remainder = b[0]
    if not fe_is_zero(remainder):
        logger.debug("ideal_divide: non-zero remainder at lambda-order %d", stage)
        raise NotInIdealError(
            f"lambda-order {stage} does not vanish on the constraint surface", witness=remainder
        )
    quotient = FuncExpr.zero(f.n)
    for i, coeff in enumerate(q):
        quotient = quotient + coeff.times_x(p_min + i)
    return quotient


def ideal_divide(F: SeriesLike, D: DSeries, ctx: ReductionContext, N: int) -> LambdaFuncSeries:
    """G with G *^D generator = F, built lowest lambda-order first.

    The generator is radial, so *^D against it is the pointwise product and
    G_k = (F_k - sum_{j>=1} G_{k-j} g_j) / g_0 with g_0 = -(x + 2 mu)/2.
    """
    F = as_series(F, N)
    check_order(F, N, "F")
    require_invariant(F, "F")
    reduced = reduce_at_mu(F, ctx)
    for k, c in enumerate(reduced.series.coeffs[: N + 1]):
        if not fe_is_zero(c):
            logger.debug("ideal_divide: F_mu is non-zero at lambda-order %d", k)
            raise NotInIdealError(f"F_mu does not vanish at lambda-order {k}", witness=c)
    gen = ideal_generator(D, ctx, N)
    G: List[FuncExpr] = []
    for k in range(N + 1):
        residual = F[k]
        for j in range(1, k + 1):
            if gen[j]:
                residual = residual - fe_mul(G[k - j], gen[j])
        G.append(_divide_by_constraint(residual, ctx, k).scale(-2))
        logger.debug("ideal_divide: stage %d has %d terms", k, len(G[-1]))
    return LambdaFuncSeries(tuple(G))


# -----------------------------
# Reduced star products
# -----------------------------


def reduced_star(
    phi: Union[FuncExpr, LambdaFuncSeries, ReducedElement],
    psi: Union[FuncExpr, LambdaFuncSeries, ReducedElement],
    D: DSeries,
    ctx: ReductionContext,
    N: int,
) -> ReducedElement:
    """phi *^D_mu psi = sum_k (lambda/(-2 mu))^k K~^D_k(phi, psi)."""
    phi = ReducedElement.of(phi, N)
    psi = ReducedElement.of(psi, N)
    check_order(phi.series, N, "phi")
    check_order(psi.series, N, "psi")
    out = [FuncExpr.zero(ctx.n) for _ in range(N + 1)]
    for i in range(min(N, phi.order) + 1):
        if not phi[i]:
            continue
        for j in range(min(N - i, psi.order) + 1):
            if not psi[j]:
                continue
            coeffs = star_hom_coefficients(phi[i], psi[j], D, N - i - j)
            for k, c in enumerate(coeffs):
                if c:
                    out[i + j + k] = out[i + j + k] + c.scale(ctx.level ** -k)
    return ReducedElement(LambdaFuncSeries(tuple(out)))
