"""Tool: scalars
Exact Gaussian rationals and truncated univariate power series.

Coefficient arithmetic is sympy's QQ_I domain; GaussianRational wraps a
domain element so the rest of the package can mix it with ints, Fractions
and "p/q" strings.

Example:
    from tools.scalars import GaussianRational, TruncUniSeries, series_invert

    d = TruncUniSeries.from_coeffs([1, 1], order=3)
    c = series_invert(d)          # 1 - t + t^2 - t^3
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

from sympy import QQ, QQ_I

from tools.errors import PreconditionError, SeriesNormalizationError, TruncationOrderError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, str, "GaussianRational"]


def _to_qq(value: Union[int, Fraction, str]):
    f = Fraction(value)
    return QQ(f.numerator, f.denominator)


def _to_fraction(value) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


class GaussianRational:
    """An element re + im*i of Q(i), held as an element of sympy's QQ_I domain."""

    __slots__ = ("value",)

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        self.value = QQ_I(_to_qq(re), _to_qq(im))

    @classmethod
    def from_domain(cls, value) -> "GaussianRational":
        """Wrap a QQ_I element (or anything QQ_I.convert accepts)."""
        obj = cls.__new__(cls)
        obj.value = QQ_I.convert(value)
        return obj

    @classmethod
    def coerce(cls, value: Number) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating point complex numbers are not exact")
        if isinstance(value, float):
            raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
        return cls(value)

    @property
    def re(self) -> Fraction:
        return _to_fraction(self.value.x)

    @property
    def im(self) -> Fraction:
        return _to_fraction(self.value.y)

    # -----------------------------
    # Arithmetic
    # -----------------------------

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return GaussianRational.from_domain(QQ_I.add(self.value, o.value))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return GaussianRational.from_domain(QQ_I.sub(self.value, o.value))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return GaussianRational.from_domain(QQ_I.mul(self.value, o.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        if not o:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational.from_domain(QQ_I.quo(self.value, o.value))

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __neg__(self):
        return GaussianRational.from_domain(QQ_I.neg(self.value))

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer powers are exact")
        if exponent < 0:
            return GaussianRational(1) / (self ** -exponent)
        return GaussianRational.from_domain(QQ_I.pow(self.value, exponent))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational.from_domain(QQ_I(self.value.x, -self.value.y))

    # -----------------------------
    # Comparison and hashing
    # -----------------------------

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.value == o.value

    def __hash__(self):
        if not self.value.y:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.value.x) or bool(self.value.y)

    @property
    def is_real(self) -> bool:
        return not self.value.y

    # -----------------------------
    # Serialization
    # -----------------------------

    def canonical(self) -> str:
        """JSON form ``re_p/re_q+im_p/im_qi`` (sign of the imaginary part inline)."""
        sign = "-" if self.im < 0 else "+"
        im = abs(self.im)
        return (
            f"{self.re.numerator}/{self.re.denominator}"
            f"{sign}{im.numerator}/{im.denominator}i"
        )

    def __str__(self):
        if not self.im:
            return _fraction_text(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"({_fraction_text(self.re)}{sign}{_fraction_text(abs(self.im))}i)"

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"


def _fraction_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


@dataclass(frozen=True)
class TruncUniSeries:
    """Power series c_0 + c_1 t + ... + c_N t^N, exact modulo t^{N+1}."""

    coeffs: Tuple[GaussianRational, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Number], order: int) -> "TruncUniSeries":
        if order < 0:
            raise PreconditionError(f"truncation order must be non-negative, got {order}")
        values = [GaussianRational.coerce(c) for c in coeffs][: order + 1]
        values.extend(ZERO for _ in range(order + 1 - len(values)))
        return cls(tuple(values))

    @classmethod
    def one(cls, order: int) -> "TruncUniSeries":
        return cls.from_coeffs([1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> GaussianRational:
        if 0 <= k <= self.order:
            return self.coeffs[k]
        return ZERO

    def __add__(self, other: "TruncUniSeries") -> "TruncUniSeries":
        order = min(self.order, other.order)
        return TruncUniSeries.from_coeffs((self[k] + other[k] for k in range(order + 1)), order)

    def __sub__(self, other: "TruncUniSeries") -> "TruncUniSeries":
        order = min(self.order, other.order)
        return TruncUniSeries.from_coeffs((self[k] - other[k] for k in range(order + 1)), order)

    def scale(self, factor: Number) -> "TruncUniSeries":
        f = GaussianRational.coerce(factor)
        return TruncUniSeries(tuple(f * c for c in self.coeffs))

    def __mul__(self, other: "TruncUniSeries") -> "TruncUniSeries":
        return series_mul(self, other)

    def leading_order(self) -> int:
        """Index of the first non-zero coefficient, or order+1 for the zero series."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return self.order + 1

    def __str__(self):
        parts: List[str] = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            parts.append(f"{c}" if k == 0 else f"{c}*t^{k}")
        return " + ".join(parts) if parts else "0"


def series_mul(a: TruncUniSeries, b: TruncUniSeries) -> TruncUniSeries:
    """Cauchy product truncated at min(order(a), order(b))."""
    order = min(a.order, b.order)
    out = []
    for k in range(order + 1):
        acc = ZERO
        for j in range(k + 1):
            if a.coeffs[j] and b.coeffs[k - j]:
                acc = acc + a.coeffs[j] * b.coeffs[k - j]
        out.append(acc)
    return TruncUniSeries(tuple(out))


def series_invert(d: TruncUniSeries) -> TruncUniSeries:
    """Inverse of a series starting with 1: c_0 = 1, c_k = -sum_{j=1..k} d_j c_{k-j}."""
    if d.coeffs[0] != ONE:
        logger.error("series_invert: constant term %s is not 1", d.coeffs[0])
        raise SeriesNormalizationError(f"constant term must be 1, got {d.coeffs[0]}")
    c: List[GaussianRational] = [ONE]
    for k in range(1, d.order + 1):
        acc = ZERO
        for j in range(1, k + 1):
            if d.coeffs[j]:
                acc = acc + d.coeffs[j] * c[k - j]
        c.append(-acc)
    return TruncUniSeries(tuple(c))


def product_of_inverses(r: int, c: TruncUniSeries, N: int) -> TruncUniSeries:
    """(1/r!) (u C(u))^r prod_{s=1..r} (1 + s u C(u))^{-1} as a series in u to order N.

    The s = 0 factor of the product is 1 and is skipped.
    """
    if r < 0:
        raise PreconditionError(f"r must be non-negative, got {r}")
    if c.coeffs[0] != ONE:
        raise SeriesNormalizationError("the C-series must start with 1")
    if c.order < N - 1:
        raise TruncationOrderError(f"C is known to order {c.order}, need at least {N - 1}")
    w = TruncUniSeries.from_coeffs([ZERO, *c.coeffs], N)
    result = TruncUniSeries.one(N).scale(Fraction(1, math.factorial(r)))
    for _ in range(r):
        result = series_mul(result, w)
    one = TruncUniSeries.one(N)
    for s in range(1, r + 1):
        result = series_mul(result, series_invert(one + w.scale(s)))
    return result
