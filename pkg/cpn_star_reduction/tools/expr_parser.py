"""Tool: expr_parser
Text grammar for functions, lambda-series and D-series, plus the canonical
serializers used by the CLI.

Grammar:
    expr    := term (('+' | '-') term)*
    term    := ['-' | '+'] factor ('*' factor)*
    factor  := coeff | z<i>['^'k] | zb<i>['^'k] | x['^'[-]k]
    coeff   := p['/'q] | '(' [+-]p[/q] [(+|-)[p[/q]]i] ')' | '(' [+-][p[/q]]i ')'
    series  := '[' expr (';' expr)* ']'
    dseries := dterm (('+' | '-') dterm)*   with dterm := coeff ['*' l['^'k]] | l['^'k]

Example:
    from tools.expr_parser import parse_expr, format_expr

    f = parse_expr("1/2*z0*zb1 + (0+1i)*x^2", n=1)
    format_expr(f)        # (0+1i)*x^2 + 1/2*z0*zb1
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from pyparsing import (
    Group,
    ParseBaseException,
    ParseFatalException,
    ParserElement,
    Optional,
    Regex,
    Suppress,
    ZeroOrMore,
    one_of,
)

from tools.errors import ExprSyntaxError, IndexOutOfRangeError, SeriesNormalizationError
from tools.function_ring import FuncExpr, LambdaFuncSeries, Monomial
from tools.scalars import ONE, ZERO, GaussianRational, TruncUniSeries
from tools.star_products import DSeries

logger = logging.getLogger(__name__)

_RATIONAL = r"\d+(?:/\d+)?"


# -----------------------------
# Parse actions
# -----------------------------


@dataclass(frozen=True)
class _Coeff:
    value: GaussianRational


@dataclass(frozen=True)
class _Var:
    kind: str
    index: int
    power: int
    loc: int


@dataclass(frozen=True)
class _Power:
    """x^power in expressions, l^power in D-series."""

    power: int


def _fraction(text: str, s: str, loc: int) -> Fraction:
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise ParseFatalException(s, loc, f"malformed rational {text!r}: zero denominator")


def _real_action(s, loc, toks):
    return _Coeff(GaussianRational(_fraction(toks[0], s, loc)))


def _imag_action(s, loc, toks):
    text = toks[0].replace(" ", "")[:-1]
    sign = -1 if text.startswith("-") else 1
    digits = text.lstrip("+-") or "1"
    return _Coeff(GaussianRational(0, sign * _fraction(digits, s, loc)))


def _paren_action(s, loc, toks):
    total = ZERO
    for part in toks:
        total = total + part.value
    return _Coeff(total)


def _var_action(s, loc, toks):
    name = toks[0]
    kind = "zb" if name.startswith("zb") else "z"
    power = int(toks[1]) if len(toks) > 1 else 1
    if power < 0:
        raise ParseFatalException(s, loc, "negative exponents are only allowed on x")
    return _Var(kind=kind, index=int(name[len(kind):]), power=power, loc=loc)


def _power_action(s, loc, toks):
    return _Power(int(toks[0]) if toks else 1)


@lru_cache(maxsize=1)
def _grammar() -> Dict[str, ParserElement]:
    sign = one_of("+ -")
    exponent = Suppress("^") + Regex(r"-?\d+")

    real = Regex(rf"[+-]?\s*{_RATIONAL}").set_parse_action(_real_action)
    imag_only = Regex(rf"[+-]?\s*(?:{_RATIONAL})?i").set_parse_action(_imag_action)
    imag_signed = Regex(rf"[+-]\s*(?:{_RATIONAL})?i").set_parse_action(_imag_action)
    paren = (
        Suppress("(") + (imag_only | real + Optional(imag_signed)) + Suppress(")")
    ).set_parse_action(_paren_action)
    coeff = paren | Regex(_RATIONAL).set_parse_action(_real_action)

    variable = (Regex(r"zb?\d+") + Optional(exponent)).set_parse_action(_var_action)
    x_power = (Suppress("x") + Optional(exponent)).set_parse_action(_power_action)
    factor = coeff | variable | x_power
    product = factor + ZeroOrMore(Suppress("*") + factor)

    expr = Group(Optional(sign) + product) + ZeroOrMore(Group(sign + product))
    series = Suppress("[") + Group(expr) + ZeroOrMore(Suppress(";") + Group(expr)) + Suppress("]")

    l_power = (Suppress("l") + Optional(Suppress("^") + Regex(r"\d+"))).set_parse_action(_power_action)
    dterm = (coeff + Optional(Suppress("*") + l_power)) | l_power
    dseries = Group(Optional(sign) + dterm) + ZeroOrMore(Group(sign + dterm))
    return {"expr": expr, "series": series, "dseries": dseries}


def _parse(kind: str, src: str):
    try:
        return _grammar()[kind].parse_string(src, parse_all=True)
    except ParseBaseException as exc:
        logger.debug("parse %s failed: %s", kind, exc)
        raise ExprSyntaxError(exc.msg, exc.loc) from exc


# -----------------------------
# Parsers
# -----------------------------


def _build_expr(terms, n: int) -> FuncExpr:
    acc: Dict[Monomial, GaussianRational] = defaultdict(lambda: ZERO)
    for term in terms:
        coeff = ONE
        alpha = [0] * (n + 1)
        beta = [0] * (n + 1)
        m = 0
        for item in term:
            if item == "-":
                coeff = -coeff
            elif item == "+":
                continue
            elif isinstance(item, _Coeff):
                coeff = coeff * item.value
            elif isinstance(item, _Power):
                m += item.power
            else:
                if item.index > n:
                    raise IndexOutOfRangeError(
                        f"variable {item.kind}{item.index} at position {item.loc} exceeds n = {n}"
                    )
                (alpha if item.kind == "z" else beta)[item.index] += item.power
        key = Monomial(tuple(alpha), tuple(beta), m)
        acc[key] = acc[key] + coeff
    return FuncExpr(n, acc)


def parse_expr(src: str, n: int) -> FuncExpr:
    """Parse one function on C^{n+1} minus the origin."""
    return _build_expr(_parse("expr", src), n)


def parse_series(src: str, n: int, order: int) -> LambdaFuncSeries:
    """Parse "[f0; f1; ...]" (or a bare expression for a lambda-constant series), padded to order."""
    text = src.strip()
    if not text.startswith("["):
        return LambdaFuncSeries.constant(parse_expr(text, n), order)
    groups = _parse("series", text)
    return LambdaFuncSeries.from_coeffs((_build_expr(g, n) for g in groups), order, n=n)


def parse_dseries(text: str, N: int) -> DSeries:
    """Parse "1 + l + 1/2*l^3" into D(lambda) known to order N; higher powers are truncated."""
    coeffs: Dict[int, GaussianRational] = defaultdict(lambda: ZERO)
    for term in _parse("dseries", text):
        value, power = ONE, 0
        for item in term:
            if item == "-":
                value = -value
            elif item == "+":
                continue
            elif isinstance(item, _Coeff):
                value = value * item.value
            else:
                power = item.power
        coeffs[power] = coeffs[power] + value
    if coeffs[0] != ONE:
        logger.error("parse_dseries: constant term %s", coeffs[0])
        raise SeriesNormalizationError(f"D must start with 1, got constant term {coeffs[0]}")
    series = TruncUniSeries.from_coeffs((coeffs[k] for k in range(N + 1)), N)
    return DSeries.from_series(series)


# -----------------------------
# Serializers
# -----------------------------


def _factor_text(name: str, power: int) -> str:
    return name if power == 1 else f"{name}^{power}"


def _monomial_factors(mono: Monomial) -> List[str]:
    factors = [_factor_text(f"z{k}", e) for k, e in enumerate(mono.alpha) if e]
    factors += [_factor_text(f"zb{k}", e) for k, e in enumerate(mono.beta) if e]
    if mono.m:
        factors.append(_factor_text("x", mono.m))
    return factors


def _term_text(mono: Monomial, coeff: GaussianRational) -> Tuple[bool, str]:
    """(negative, text without the sign)."""
    negative = coeff.is_real and coeff.re < 0
    magnitude = -coeff if negative else coeff
    factors = _monomial_factors(mono)
    if magnitude != ONE or not factors:
        factors.insert(0, str(magnitude))
    return negative, "*".join(factors)


def format_expr(f: FuncExpr) -> str:
    """Canonical text: terms lexicographic on (alpha, beta, m), "0" for the empty sum."""
    parts: List[str] = []
    for mono, coeff in f.items():
        negative, text = _term_text(mono, coeff)
        if not parts:
            parts.append(f"-{text}" if negative else text)
        else:
            parts.append(f"{'-' if negative else '+'} {text}")
    return " ".join(parts) if parts else "0"


def format_series(series: LambdaFuncSeries) -> str:
    return "[" + "; ".join(format_expr(c) for c in series.coeffs) + "]"


def series_to_records(series: LambdaFuncSeries) -> List[List[dict]]:
    """JSON form: one list per lambda-order of {alpha, beta, m, coeff} records."""
    return [
        [
            {"alpha": list(mono.alpha), "beta": list(mono.beta), "m": mono.m, "coeff": coeff.canonical()}
            for mono, coeff in c.items()
        ]
        for c in series.coeffs
    ]
