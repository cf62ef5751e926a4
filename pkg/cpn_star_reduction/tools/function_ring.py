"""Tool: function_ring
Polynomial-type functions on C^{n+1} minus the origin.

A FuncExpr is a finite sum of monomials c * z^alpha zb^beta x^m where
x = sum_k z^k zb^k is kept as a formal generator (m may be negative).
Structural equality compares term maps; semantic equality (the one that
matters for identities) goes through fe_is_zero.

Example:
    from tools.function_ring import FuncExpr, fe_diff, Direction

    x = FuncExpr.x_power(1, n=1)
    fe_diff(x, Direction.HOLOMORPHIC, 0)     # zb0
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import QQ_I, Poly, Symbol, symbols

from tools.errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    NotInvariantError,
    PreconditionError,
)
from tools.scalars import ZERO, GaussianRational, Number

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    HOLOMORPHIC = "holomorphic"
    ANTIHOLOMORPHIC = "antiholomorphic"


@dataclass(frozen=True, order=True)
class Monomial:
    """z^alpha zb^beta x^m; ordering is lexicographic on (alpha, beta, m)."""

    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    m: int = 0

    @property
    def holomorphic_degree(self) -> int:
        return sum(self.alpha)

    @property
    def antiholomorphic_degree(self) -> int:
        return sum(self.beta)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(
            tuple(a + b for a, b in zip(self.alpha, other.alpha)),
            tuple(a + b for a, b in zip(self.beta, other.beta)),
            self.m + other.m,
        )


def _unit(n: int, k: int) -> Tuple[int, ...]:
    return tuple(1 if j == k else 0 for j in range(n + 1))


class FuncExpr:
    """Exact finite linear combination of monomials; no zero coefficients stored."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Optional[Dict[Monomial, GaussianRational]] = None):
        if n < 0:
            raise PreconditionError(f"dimension parameter n must be non-negative, got {n}")
        self.n = n
        clean: Dict[Monomial, GaussianRational] = {}
        for mono, coeff in (terms or {}).items():
            if len(mono.alpha) != n + 1 or len(mono.beta) != n + 1:
                raise DimensionMismatchError(
                    f"monomial has {len(mono.alpha)} coordinates, expected {n + 1}"
                )
            coeff = GaussianRational.coerce(coeff)
            if coeff:
                clean[mono] = coeff
        self.terms = clean
        self._hash = None

    # -----------------------------
    # Constructors
    # -----------------------------

    @classmethod
    def zero(cls, n: int) -> "FuncExpr":
        return cls(n)

    @classmethod
    def constant(cls, value: Number, n: int) -> "FuncExpr":
        zeros = (0,) * (n + 1)
        return cls(n, {Monomial(zeros, zeros, 0): GaussianRational.coerce(value)})

    @classmethod
    def one(cls, n: int) -> "FuncExpr":
        return cls.constant(1, n)

    @classmethod
    def monomial(
        cls,
        alpha: Sequence[int],
        beta: Sequence[int],
        m: int = 0,
        coeff: Number = 1,
    ) -> "FuncExpr":
        n = len(alpha) - 1
        if len(beta) != len(alpha):
            raise DimensionMismatchError("alpha and beta must have the same length")
        if any(a < 0 for a in alpha) or any(b < 0 for b in beta):
            raise PreconditionError("z and zb exponents must be non-negative")
        return cls(n, {Monomial(tuple(alpha), tuple(beta), m): GaussianRational.coerce(coeff)})

    @classmethod
    def z(cls, k: int, n: int) -> "FuncExpr":
        _check_index(k, n)
        return cls.monomial(_unit(n, k), (0,) * (n + 1))

    @classmethod
    def zb(cls, k: int, n: int) -> "FuncExpr":
        _check_index(k, n)
        return cls.monomial((0,) * (n + 1), _unit(n, k))

    @classmethod
    def x_power(cls, m: int, n: int) -> "FuncExpr":
        zeros = (0,) * (n + 1)
        return cls.monomial(zeros, zeros, m)

    # -----------------------------
    # Ring operations
    # -----------------------------

    def _check_same(self, other: "FuncExpr") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(f"dimension mismatch: n={self.n} vs n={other.n}")

    def __add__(self, other: "FuncExpr") -> "FuncExpr":
        self._check_same(other)
        acc = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc[mono] = acc.get(mono, ZERO) + coeff
        return FuncExpr(self.n, acc)

    def __sub__(self, other: "FuncExpr") -> "FuncExpr":
        return self + (-other)

    def __neg__(self) -> "FuncExpr":
        return FuncExpr(self.n, {mono: -c for mono, c in self.terms.items()})

    def scale(self, factor: Number) -> "FuncExpr":
        f = GaussianRational.coerce(factor)
        if not f:
            return FuncExpr.zero(self.n)
        return FuncExpr(self.n, {mono: f * c for mono, c in self.terms.items()})

    def __mul__(self, other: "FuncExpr") -> "FuncExpr":
        return fe_mul(self, other)

    def times_x(self, p: int) -> "FuncExpr":
        """Multiply by x^p (a pure exponent shift)."""
        if p == 0:
            return self
        return FuncExpr(
            self.n, {Monomial(mono.alpha, mono.beta, mono.m + p): c for mono, c in self.terms.items()}
        )

    # -----------------------------
    # Inspection
    # -----------------------------

    def items(self) -> List[Tuple[Monomial, GaussianRational]]:
        """Terms in canonical (alpha, beta, m) order."""
        return sorted(self.terms.items(), key=lambda item: item[0])

    def __iter__(self) -> Iterator[Tuple[Monomial, GaussianRational]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FuncExpr):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def is_zero(self) -> bool:
        return fe_is_zero(self)

    def equals(self, other: "FuncExpr") -> bool:
        """Semantic equality on C^{n+1} minus the origin."""
        return fe_is_zero(self - other)

    def __repr__(self) -> str:
        return f"FuncExpr(n={self.n}, terms={len(self.terms)})"


def _check_index(k: int, n: int) -> None:
    if not 0 <= k <= n:
        raise IndexOutOfRangeError(f"coordinate index {k} out of range 0..{n}")


def fe_mul(a: FuncExpr, b: FuncExpr) -> FuncExpr:
    """Pointwise product."""
    a._check_same(b)
    acc: Dict[Monomial, GaussianRational] = defaultdict(lambda: ZERO)
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            acc[ma * mb] = acc[ma * mb] + ca * cb
    return FuncExpr(a.n, acc)


def fe_diff(a: FuncExpr, which: Direction, k: int) -> FuncExpr:
    """d/dz^k or d/dzb^k, with dx^m/dz^k = m x^{m-1} zb^k and dx^m/dzb^k = m x^{m-1} z^k."""
    _check_index(k, a.n)
    holomorphic = Direction(which) is Direction.HOLOMORPHIC
    acc: Dict[Monomial, GaussianRational] = defaultdict(lambda: ZERO)
    for mono, coeff in a.terms.items():
        own = mono.alpha if holomorphic else mono.beta
        if own[k]:
            lowered = tuple(e - 1 if j == k else e for j, e in enumerate(own))
            key = (
                Monomial(lowered, mono.beta, mono.m)
                if holomorphic
                else Monomial(mono.alpha, lowered, mono.m)
            )
            acc[key] = acc[key] + coeff * own[k]
        if mono.m:
            if holomorphic:
                raised = tuple(e + 1 if j == k else e for j, e in enumerate(mono.beta))
                key = Monomial(mono.alpha, raised, mono.m - 1)
            else:
                raised = tuple(e + 1 if j == k else e for j, e in enumerate(mono.alpha))
                key = Monomial(raised, mono.beta, mono.m - 1)
            acc[key] = acc[key] + coeff * mono.m
    return FuncExpr(a.n, acc)


@lru_cache(maxsize=32)
def _generators(n: int) -> Tuple[Symbol, ...]:
    """z0..zn followed by zb0..zbn as sympy symbols."""
    return tuple(symbols(f"z0:{n + 1}", seq=True)) + tuple(symbols(f"zb0:{n + 1}", seq=True))


@lru_cache(maxsize=256)
def _x_power_poly(n: int, power: int) -> Poly:
    """(sum_k z^k zb^k)^power expanded over QQ_I."""
    gens = _generators(n)
    x = Poly(sum(gens[k] * gens[n + 1 + k] for k in range(n + 1)), *gens, domain=QQ_I)
    return x ** power


def to_poly(a: FuncExpr, shift: int) -> Poly:
    """x^shift * a as a polynomial in z, zb; shift must clear every negative x-power."""
    gens = _generators(a.n)
    by_power: Dict[int, Dict[Tuple[int, ...], object]] = defaultdict(dict)
    for mono, coeff in a.terms.items():
        power = mono.m + shift
        if power < 0:
            raise PreconditionError(f"x-shift {shift} leaves x^{power}")
        by_power[power][mono.alpha + mono.beta] = coeff.value
    total = Poly(0, *gens, domain=QQ_I)
    for power, rep in by_power.items():
        total = total + Poly.from_dict(rep, *gens, domain=QQ_I) * _x_power_poly(a.n, power)
    return total


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def fe_is_zero(a: FuncExpr) -> bool:
    """True iff a vanishes identically: clear x-denominators, substitute x, expand."""
    if not a.terms:
        return True
    shift = max(0, -min(mono.m for mono in a.terms))
    return to_poly(a, shift).is_zero


def _bump(exponents: Tuple[int, ...], k: int, step: int = 1) -> Tuple[int, ...]:
    return tuple(e + step if j == k else e for j, e in enumerate(exponents))


def fe_normal_form(a: FuncExpr) -> FuncExpr:
    """Rewrite z^n zb^n as x - sum_{k<n} z^k zb^k until no term contains both.

    The result is canonical: two expressions are equal as functions iff
    their normal forms are identical term maps.
    """
    n = a.n
    terms: Dict[Monomial, GaussianRational] = dict(a.terms)
    while True:
        reducible = [mono for mono in terms if mono.alpha[n] and mono.beta[n]]
        if not reducible:
            break
        for mono in reducible:
            coeff = terms.pop(mono)
            alpha, beta = _bump(mono.alpha, n, -1), _bump(mono.beta, n, -1)
            lifted = Monomial(alpha, beta, mono.m + 1)
            terms[lifted] = terms.get(lifted, ZERO) + coeff
            for k in range(n):
                key = Monomial(_bump(alpha, k), _bump(beta, k), mono.m)
                terms[key] = terms.get(key, ZERO) - coeff
    return FuncExpr(n, terms)


@dataclass(frozen=True)
class GradingReport:
    invariant: bool
    homogeneous: bool
    radial: bool


def fe_grading(a: FuncExpr) -> GradingReport:
    """U(1)-invariance (|alpha| = |beta|), homogeneity (|alpha| = |beta| = -m), radiality."""
    invariant = all(mono.holomorphic_degree == mono.antiholomorphic_degree for mono in a.terms)
    homogeneous = invariant and all(mono.holomorphic_degree == -mono.m for mono in a.terms)
    radial = all(not any(mono.alpha) and not any(mono.beta) for mono in a.terms)
    return GradingReport(invariant=invariant, homogeneous=homogeneous, radial=radial)


def decompose_invariant(a: FuncExpr) -> List[Tuple[FuncExpr, int]]:
    """Write an invariant a as sum_p h_p x^p with h_p homogeneous, sorted by p."""
    buckets: Dict[int, Dict[Monomial, GaussianRational]] = defaultdict(dict)
    for mono, coeff in a.terms.items():
        d = mono.holomorphic_degree
        if d != mono.antiholomorphic_degree:
            logger.error("decompose_invariant: term of U(1) weight %d", d - mono.antiholomorphic_degree)
            raise NotInvariantError("expression is not U(1)-invariant")
        buckets[mono.m + d][Monomial(mono.alpha, mono.beta, -d)] = coeff
    return [(FuncExpr(a.n, buckets[p]), p) for p in sorted(buckets)]


def recombine(parts: Iterable[Tuple[FuncExpr, int]], n: int) -> FuncExpr:
    """Inverse of decompose_invariant: sum_p h_p x^p."""
    total = FuncExpr.zero(n)
    for h, p in parts:
        total = total + h.times_x(p)
    return total


def fe_evaluate(a: FuncExpr, point: Sequence[Number]) -> GaussianRational:
    """Value at z = point (zb is the conjugate); x(z) must be non-zero."""
    if len(point) != a.n + 1:
        raise DimensionMismatchError(f"point has {len(point)} coordinates, expected {a.n + 1}")
    z = [GaussianRational.coerce(p) for p in point]
    zb = [p.conjugate() for p in z]
    x = ZERO
    for p, q in zip(z, zb):
        x = x + p * q
    if not x:
        raise PreconditionError("x(z) = 0: the origin is not in the domain")
    total = ZERO
    for mono, coeff in a.terms.items():
        value = coeff * (x ** mono.m)
        for k in range(a.n + 1):
            if mono.alpha[k]:
                value = value * (z[k] ** mono.alpha[k])
            if mono.beta[k]:
                value = value * (zb[k] ** mono.beta[k])
        total = total + value
    return total


def fe_conjugate(a: FuncExpr) -> FuncExpr:
    """Complex conjugate: swap z and zb, conjugate coefficients (x is real)."""
    return FuncExpr(
        a.n, {Monomial(mono.beta, mono.alpha, mono.m): c.conjugate() for mono, c in a.terms.items()}
    )


@dataclass(frozen=True)
class LambdaFuncSeries:
    """F_0 + lambda F_1 + ... + lambda^N F_N with FuncExpr coefficients."""

    coeffs: Tuple[FuncExpr, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise PreconditionError("a lambda-series needs at least the order-0 coefficient")
        n = self.coeffs[0].n
        if any(c.n != n for c in self.coeffs):
            raise DimensionMismatchError("all lambda-coefficients must share the same n")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[FuncExpr], order: int, n: Optional[int] = None) -> "LambdaFuncSeries":
        values = list(coeffs)[: order + 1]
        if n is None:
            if not values:
                raise PreconditionError("cannot infer n from an empty coefficient list")
            n = values[0].n
        values.extend(FuncExpr.zero(n) for _ in range(order + 1 - len(values)))
        return cls(tuple(values))

    @classmethod
    def constant(cls, f: FuncExpr, order: int) -> "LambdaFuncSeries":
        return cls.from_coeffs([f], order)

    @property
    def n(self) -> int:
        return self.coeffs[0].n

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> FuncExpr:
        if 0 <= k <= self.order:
            return self.coeffs[k]
        return FuncExpr.zero(self.n)

    def truncate(self, order: int) -> "LambdaFuncSeries":
        return LambdaFuncSeries(self.coeffs[: min(order, self.order) + 1])

    def __add__(self, other: "LambdaFuncSeries") -> "LambdaFuncSeries":
        order = min(self.order, other.order)
        return LambdaFuncSeries(tuple(self[k] + other[k] for k in range(order + 1)))

    def __sub__(self, other: "LambdaFuncSeries") -> "LambdaFuncSeries":
        order = min(self.order, other.order)
        return LambdaFuncSeries(tuple(self[k] - other[k] for k in range(order + 1)))

    def __neg__(self) -> "LambdaFuncSeries":
        return LambdaFuncSeries(tuple(-c for c in self.coeffs))

    def scale(self, factor: Number) -> "LambdaFuncSeries":
        return LambdaFuncSeries(tuple(c.scale(factor) for c in self.coeffs))

    def map(self, fn) -> "LambdaFuncSeries":
        return LambdaFuncSeries(tuple(fn(c) for c in self.coeffs))

    def equals(self, other: "LambdaFuncSeries") -> bool:
        """Semantic equality modulo lambda^{min order + 1}."""
        if self.n != other.n:
            return False
        order = min(self.order, other.order)
        return all(self[k].equals(other[k]) for k in range(order + 1))

    def is_invariant(self) -> bool:
        return all(fe_grading(c).invariant for c in self.coeffs)

    def is_homogeneous(self) -> bool:
        return all(fe_grading(c).homogeneous for c in self.coeffs)

    def __repr__(self) -> str:
        return f"LambdaFuncSeries(n={self.n}, order={self.order})"


def as_series(value, order: int) -> LambdaFuncSeries:
    """Promote a FuncExpr to a constant lambda-series; series pass through."""
    if isinstance(value, LambdaFuncSeries):
        return value
    if isinstance(value, FuncExpr):
        return LambdaFuncSeries.constant(value, order)
    raise TypeError(f"expected FuncExpr or LambdaFuncSeries, got {type(value).__name__}")
