"""Tool: classification
Decides whether two reduced star products *^D_mu and *^D'_mu can be
equivalent by locating the first divergent coefficient of C = D^{-1}.

If c_r = c'_r for r < k and c_k != c'_k, the K-tables agree through row k
and row k+1 differs by (c_k - c'_k) M_1. The antisymmetric part of M~_1 is
the Poisson bracket of the Fubini-Study form, which is not exact, so the two
reduced products are not equivalent. The verdict computed here is the
certificate of that hypothesis; the non-exactness itself is taken as known.

Example:
    from tools.classification import equivalence_verdict

    report = equivalence_verdict(D, D_prime, N=4)
    report.verdict        # Verdict.NON_EQUIVALENT
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple, Union

from tools.errors import PreconditionError, TruncationOrderError
from tools.function_ring import FuncExpr, compositions
from tools.reduction import ReducedElement, ReductionContext, reduced_star
from tools.scalars import ZERO, GaussianRational
from tools.star_products import DSeries, k_table, m_r_apply

logger = logging.getLogger(__name__)

BasisElement = Union[FuncExpr, ReducedElement]


class Verdict(str, Enum):
    EQUIVALENT = "equivalent"
    NON_EQUIVALENT = "non-equivalent"


@dataclass(frozen=True)
class Lemma41Witness:
    """Row-by-row comparison of two K-tables around the first divergence k."""

    holds: bool
    k: int
    delta: GaussianRational
    agreeing_rows: int
    difference_row: Tuple[GaussianRational, ...]


@dataclass(frozen=True)
class ObstructionReport:
    first_divergence: Optional[int]
    delta: Optional[GaussianRational]
    c_params: Tuple[GaussianRational, ...]
    c_params_prime: Tuple[GaussianRational, ...]
    verdict: Verdict
    witness: Optional[Lemma41Witness] = field(default=None)


def c_parameters(D: DSeries, N: int) -> Tuple[GaussianRational, ...]:
    """(c_1, ..., c_N)."""
    if D.order < N:
        raise TruncationOrderError(f"D is known to order {D.order}, need {N}")
    return tuple(D.c_r(r) for r in range(1, N + 1))


def first_divergence(D: DSeries, Dp: DSeries, N: int) -> Optional[int]:
    """Smallest k <= N with c_k != c'_k, or None."""
    for k, (c, cp) in enumerate(zip(c_parameters(D, N), c_parameters(Dp, N)), start=1):
        if c != cp:
            return k
    return None


def _divergence_or_raise(D: DSeries, Dp: DSeries, N: int) -> Tuple[int, GaussianRational]:
    k = first_divergence(D, Dp, N)
    if k is None:
        raise PreconditionError("D and D' agree to the truncation order; there is no divergence")
    if k + 1 > N:
        raise TruncationOrderError(f"first divergence at k = {k} needs order at least {k + 1}, got {N}")
    return k, D.c_r(k) - Dp.c_r(k)


def lemma41_check(D: DSeries, Dp: DSeries, N: int) -> Lemma41Witness:
    """K^D_r = K^D'_r for r <= k and K^D_{k+1} - K^D'_{k+1} = (c_k - c'_k) M_1."""
    k, delta = _divergence_or_raise(D, Dp, N)
    table, table_p = k_table(D, N), k_table(Dp, N)
    agreeing = 0
    while agreeing <= N and table.rows[agreeing] == table_p.rows[agreeing]:
        agreeing += 1
    difference = table.row_difference(table_p, k + 1)
    expected = tuple(delta if r == 1 else ZERO for r in range(k + 2))
    holds = agreeing >= k + 1 and difference == expected
    logger.debug("lemma41_check: k=%d delta=%s holds=%s", k, delta, holds)
    return Lemma41Witness(holds=holds, k=k, delta=delta, agreeing_rows=agreeing, difference_row=difference)


def default_basis(n: int, degree: int = 1) -> List[FuncExpr]:
    """All z^alpha zb^beta x^{-d} with |alpha| = |beta| = d, in canonical order."""
    if degree < 0:
        raise PreconditionError(f"basis degree must be non-negative, got {degree}")
    exponents = sorted(compositions(degree, n + 1))
    return [FuncExpr.monomial(alpha, beta, -degree) for alpha, beta in product(exponents, exponents)]


def reduced_operator_rows(
    D: DSeries, ctx: ReductionContext, phi: BasisElement, psi: BasisElement, N: int
) -> List[FuncExpr]:
    """K~^D_r(phi, psi) = (-2 mu)^r times the lambda^r coefficient of phi *^D_mu psi."""
    star = reduced_star(phi, psi, D, ctx, N)
    return [star[r].scale(ctx.level ** r) for r in range(N + 1)]


def cor42_check(
    D: DSeries,
    Dp: DSeries,
    ctx: ReductionContext,
    N: int,
    basis: Optional[Sequence[BasisElement]] = None,
) -> bool:
    """K~^D_r = K~^D'_r for r <= k and K~^D_{k+1} - K~^D'_{k+1} = (c_k - c'_k) M~_1 on basis pairs."""
    k, delta = _divergence_or_raise(D, Dp, N)
    elements = list(basis) if basis is not None else default_basis(ctx.n)
    if not elements:
        raise PreconditionError("the comparison basis must not be empty")
    for phi in elements:
        for psi in elements:
            rows = reduced_operator_rows(D, ctx, phi, psi, N)
            rows_p = reduced_operator_rows(Dp, ctx, phi, psi, N)
            if not all(rows[r].equals(rows_p[r]) for r in range(k + 1)):
                logger.error("cor42_check: rows below %d differ on a basis pair", k + 1)
                return False
            lhs = rows[k + 1] - rows_p[k + 1]
            f = ReducedElement.of(phi, 0)[0]
            g = ReducedElement.of(psi, 0)[0]
            if not lhs.equals(m_r_apply(1, f, g).scale(delta)):
                logger.error("cor42_check: row %d difference is not %s * M~_1", k + 1, delta)
                return False
    return True


def first_order_extract(
    D: DSeries, ctx: ReductionContext, phi: BasisElement, psi: BasisElement
) -> FuncExpr:
    """lambda^1 coefficient of (phi *^D_mu psi - psi *^D_mu phi) / 2."""
    forward = reduced_star(phi, psi, D, ctx, 1)
    backward = reduced_star(psi, phi, D, ctx, 1)
    return (forward[1] - backward[1]).scale(Fraction(1, 2))


def equivalence_verdict(D: DSeries, Dp: DSeries, N: int) -> ObstructionReport:
    """Equivalent iff c agrees with c' to order N; otherwise report k and c_k - c'_k."""
    c, cp = c_parameters(D, N), c_parameters(Dp, N)
    k = first_divergence(D, Dp, N)
    if k is None:
        return ObstructionReport(
            first_divergence=None,
            delta=None,
            c_params=c,
            c_params_prime=cp,
            verdict=Verdict.EQUIVALENT,
        )
    witness = lemma41_check(D, Dp, N) if k + 1 <= N else None
    return ObstructionReport(
        first_divergence=k,
        delta=c[k - 1] - cp[k - 1],
        c_params=c,
        c_params_prime=cp,
        verdict=Verdict.NON_EQUIVALENT,
        witness=witness,
    )
