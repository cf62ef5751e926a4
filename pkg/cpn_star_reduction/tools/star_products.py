"""Tool: star_products
The Wick star product on C^{n+1} minus the origin, the bidifferential
operators M_r, the K-coefficient tables and the products *^D on the
U(1)-invariant subalgebra.

Note: the plain Wick product does not make radial functions central
(x * x = x^2 + lambda x), so *^D with D = 1 is not the Wick product on
invariant functions. The two agree in orders 0 and 1 only.

Example:
    from tools.star_products import DSeries, star_hom, k_table

    D = DSeries.from_d([1], order=4)        # D = 1 + lambda
    table = k_table(D, 4)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import Dict, Sequence, Tuple, Union

from tools.errors import NotHomogeneousError, NotInvariantError, TruncationOrderError
from tools.function_ring import (
    Direction,
    FuncExpr,
    LambdaFuncSeries,
    as_series,
    decompose_invariant,
    fe_diff,
    fe_grading,
    fe_mul,
)
from tools.scalars import (
    ONE,
    ZERO,
    GaussianRational,
    Number,
    TruncUniSeries,
    product_of_inverses,
    series_invert,
)

logger = logging.getLogger(__name__)

SeriesLike = Union[FuncExpr, LambdaFuncSeries]


@dataclass(frozen=True)
class DSeries:
    """D(lambda) = 1 + sum d_r lambda^r together with its inverse C(lambda)."""

    d: TruncUniSeries
    c: TruncUniSeries

    @classmethod
    def from_series(cls, d: TruncUniSeries) -> "DSeries":
        return cls(d=d, c=series_invert(d))

    @classmethod
    def from_d(cls, tail: Sequence[Number], order: int) -> "DSeries":
        """Build from d_1, d_2, ...; missing orders are zero."""
        return cls.from_series(TruncUniSeries.from_coeffs([ONE, *tail], order))

    @classmethod
    def one(cls, order: int) -> "DSeries":
        return cls.from_d([], order)

    @property
    def order(self) -> int:
        return self.d.order

    def d_r(self, r: int) -> GaussianRational:
        return self.d[r]

    def c_r(self, r: int) -> GaussianRational:
        return self.c[r]

    def __str__(self) -> str:
        """Input-grammar form, e.g. ``1 - l + 1/2*l^3``."""
        text = "1"
        for r in range(1, self.order + 1):
            coeff = self.d[r]
            if not coeff:
                continue
            negative = coeff.is_real and coeff.re < 0
            magnitude = -coeff if negative else coeff
            power = "l" if r == 1 else f"l^{r}"
            term = power if magnitude == ONE else f"{magnitude}*{power}"
            text += f" {'-' if negative else '+'} {term}"
        return text


@dataclass(frozen=True)
class KTable:
    """a[k][r] with K^D_k = sum_{r<=k} a[k][r] M_r."""

    rows: Tuple[Tuple[GaussianRational, ...], ...]

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    def entry(self, k: int, r: int) -> GaussianRational:
        if r > k:
            return ZERO
        return self.rows[k][r]

    def row_difference(self, other: "KTable", k: int) -> Tuple[GaussianRational, ...]:
        return tuple(a - b for a, b in zip(self.rows[k], other.rows[k]))

    def apply(self, k: int, m_values: Sequence[FuncExpr]) -> FuncExpr:
        """K_k(f, g) given precomputed M_0(f, g) .. M_k(f, g)."""
        total = FuncExpr.zero(m_values[0].n)
        for r, coeff in enumerate(self.rows[k]):
            if coeff:
                total = total + m_values[r].scale(coeff)
        return total

    def format_row(self, k: int) -> str:
        return format_combination(self.rows[k])


def format_combination(row: Sequence[GaussianRational]) -> str:
    """sum_r row[r] M_r as text, e.g. ``-1*M_1 + 1/2*M_2``."""
    parts = [f"{coeff}*M_{r}" for r, coeff in enumerate(row) if coeff]
    return " + ".join(parts) if parts else "0"


# -----------------------------
# Derivative tables
# -----------------------------


def _derivative_table(f: FuncExpr, which: Direction, max_order: int) -> Dict[Tuple[int, ...], FuncExpr]:
    """All derivatives of f along sorted index tuples of length <= max_order."""
    table: Dict[Tuple[int, ...], FuncExpr] = {(): f}
    frontier = [()]
    for _ in range(max_order):
        nxt = []
        for idx in frontier:
            base = table[idx]
            if not base:
                continue
            start = idx[-1] if idx else 0
            for k in range(start, f.n + 1):
                key = idx + (k,)
                table[key] = fe_diff(base, which, k)
                nxt.append(key)
        frontier = nxt
    return table


def _inverse_multiplicity(idx: Tuple[int, ...]) -> Fraction:
    """1/gamma! for the multi-index gamma counted by a sorted index tuple."""
    denom = 1
    run = 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            run += 1
            denom *= run
        else:
            run = 1
    return Fraction(1, denom)


def _contraction(
    left: Dict[Tuple[int, ...], FuncExpr],
    right: Dict[Tuple[int, ...], FuncExpr],
    n: int,
    r: int,
) -> FuncExpr:
    """sum over |gamma| = r of (1/gamma!) d^gamma F * db^gamma G."""
    total = FuncExpr.zero(n)
    for idx in combinations_with_replacement(range(n + 1), r):
        lf = left.get(idx)
        rg = right.get(idx)
        if not lf or not rg:
            continue
        total = total + fe_mul(lf, rg).scale(_inverse_multiplicity(idx))
    return total


# -----------------------------
# Wick product and friends
# -----------------------------



def check_order(series: LambdaFuncSeries, N: int, name: str) -> None:
    if series.order < N:
        raise TruncationOrderError(f"{name} is known to order {series.order}, need {N}")


def wick_product(F: SeriesLike, G: SeriesLike, N: int) -> LambdaFuncSeries:
    """F * G = sum_r (lambda^r / r!) d^r F / dz^{i_1..i_r} * d^r G / dzb^{i_1..i_r}, mod lambda^{N+1}."""
    F = as_series(F, N)
    G = as_series(G, N)
    F[0]._check_same(G[0])
    check_order(F, N, "F")
    check_order(G, N, "G")
    n = F.n
    left = [_derivative_table(F[i], Direction.HOLOMORPHIC, N - i) for i in range(N + 1)]
    right = [_derivative_table(G[j], Direction.ANTIHOLOMORPHIC, N - j) for j in range(N + 1)]
    out = [FuncExpr.zero(n) for _ in range(N + 1)]
    for i in range(N + 1):
        if not F[i]:
            continue
        for j in range(N + 1 - i):
            if not G[j]:
                continue
            for r in range(N + 1 - i - j):
                out[i + j + r] = out[i + j + r] + _contraction(left[i], right[j], n, r)
    return LambdaFuncSeries(tuple(out))


def wick_commutator(F: SeriesLike, G: SeriesLike, N: int) -> LambdaFuncSeries:
    return wick_product(F, G, N) - wick_product(G, F, N)


def poisson_bracket(F: FuncExpr, G: FuncExpr) -> FuncExpr:
    """{F, G} = -2i sum_k (dF/dz^k dG/dzb^k - dF/dzb^k dG/dz^k).

    This sign makes F * J - J * F = (i lambda / 2) {F, J} hold for the Wick product.
    """
    F._check_same(G)
    total = FuncExpr.zero(F.n)
    for k in range(F.n + 1):
        total = total + fe_mul(fe_diff(F, Direction.HOLOMORPHIC, k), fe_diff(G, Direction.ANTIHOLOMORPHIC, k))
        total = total - fe_mul(fe_diff(F, Direction.ANTIHOLOMORPHIC, k), fe_diff(G, Direction.HOLOMORPHIC, k))
    return total.scale(GaussianRational(0, -2))


def m_r_apply(r: int, f: FuncExpr, g: FuncExpr) -> FuncExpr:
    """M_r(f, g) = x^r sum_{i_1..i_r} d^r f / dz^{i_1..i_r} * d^r g / dzb^{i_1..i_r}."""
    return m_r_all(r, f, g)[r]


@lru_cache(maxsize=4096)
def m_r_all(max_r: int, f: FuncExpr, g: FuncExpr) -> Tuple[FuncExpr, ...]:
    """(M_0(f, g), ..., M_max_r(f, g)) sharing one pair of derivative tables."""
    if max_r < 0:
        raise TruncationOrderError(f"r must be non-negative, got {max_r}")
    f._check_same(g)
    left = _derivative_table(f, Direction.HOLOMORPHIC, max_r)
    right = _derivative_table(g, Direction.ANTIHOLOMORPHIC, max_r)
    values = []
    for r in range(max_r + 1):
        values.append(_contraction(left, right, f.n, r).scale(factorial(r)).times_x(r))
    return tuple(values)


# -----------------------------
# K-tables and *^D
# -----------------------------


@lru_cache(maxsize=128)
def k_table(D: DSeries, N: int) -> KTable:
    """a[k][r] = u^k coefficient of (1/r!) (uC(u))^r prod_{s=1..r} (1 + s uC(u))^{-1}."""
    if D.order < N - 1:
        raise TruncationOrderError(f"D is known to order {D.order}, need at least {N - 1}")
    expansions = [product_of_inverses(r, D.c, N) for r in range(N + 1)]
    rows = tuple(tuple(expansions[r][k] for r in range(k + 1)) for k in range(N + 1))
    logger.debug("k_table: built %d rows for D = %s", N + 1, D)
    return KTable(rows=rows)


def _require_homogeneous(f: FuncExpr, name: str) -> None:
    if not fe_grading(f).homogeneous:
        logger.error("star_hom: %s is not homogeneous", name)
        raise NotHomogeneousError(f"{name} must be homogeneous (|alpha| = |beta| = -m on every term)")


def star_hom_coefficients(f: FuncExpr, g: FuncExpr, D: DSeries, N: int) -> Tuple[FuncExpr, ...]:
    """K^D_k(f, g) for k = 0..N; homogeneous f, g give homogeneous results."""
    _require_homogeneous(f, "f")
    _require_homogeneous(g, "g")
    return _star_hom_coefficients(f, g, D, N)


@lru_cache(maxsize=8192)
def _star_hom_coefficients(f: FuncExpr, g: FuncExpr, D: DSeries, N: int) -> Tuple[FuncExpr, ...]:
    table = k_table(D, N)
    m_values = m_r_all(N, f, g)
    return tuple(table.apply(k, m_values) for k in range(N + 1))


def star_hom(f: FuncExpr, g: FuncExpr, D: DSeries, N: int) -> LambdaFuncSeries:
    """f *^D g = sum_k lambda^k x^{-k} K^D_k(f, g) for homogeneous f, g."""
    coeffs = star_hom_coefficients(f, g, D, N)
    return LambdaFuncSeries(tuple(c.times_x(-k) for k, c in enumerate(coeffs)))


def require_invariant(series: LambdaFuncSeries, name: str) -> None:
    if not series.is_invariant():
        logger.error("star_invariant: %s has a non-invariant coefficient", name)
        raise NotInvariantError(f"{name} must have U(1)-invariant coefficients")


def star_invariant(F: SeriesLike, G: SeriesLike, D: DSeries, N: int) -> LambdaFuncSeries:
    """*^D on invariant series: (h1 x^p) *^D (h2 x^q) = x^{p+q} (h1 *^D h2), extended bilinearly."""
    F = as_series(F, N)
    G = as_series(G, N)
    F[0]._check_same(G[0])
    check_order(F, N, "F")
    check_order(G, N, "G")
    require_invariant(F, "F")
    require_invariant(G, "G")
    n = F.n
    out = [FuncExpr.zero(n) for _ in range(N + 1)]
    left = [decompose_invariant(F[i]) for i in range(N + 1)]
    right = [decompose_invariant(G[j]) for j in range(N + 1)]
    for i in range(N + 1):
        for j in range(N + 1 - i):
            room = N - i - j
            for h1, p in left[i]:
                for h2, q in right[j]:
                    coeffs = _star_hom_coefficients(h1, h2, D, room)
                    for k, c in enumerate(coeffs):
                        if c:
                            out[i + j + k] = out[i + j + k] + c.times_x(p + q - k)
    return LambdaFuncSeries(tuple(out))
