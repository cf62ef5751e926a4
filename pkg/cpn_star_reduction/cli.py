"""Command-line surface for the star-product kernel.

Subcommands: star, reduce, divide, classify, check, ktable, history. Every run is
validated into a ``RunConfig``; reports go to stdout (text or JSON), logs to
stderr. Exit codes: 0 success, 1 failed check or refuted membership, 2
invalid input.

Example:
    python main.py classify --D "1" --Dprime "1 + l" --order 4
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from config import (
    STAR_BASIS_DEGREE,
    STAR_DEFAULT_MU,
    STAR_DEFAULT_N,
    STAR_DEFAULT_ORDER,
    STAR_DEFAULT_SEED,
    STAR_LOG_DIR,
    STAR_LOG_LEVEL,
)
from property_suites import SUITES, SuiteConfig, SuiteResult, run_suites
from tools.classification import ObstructionReport, cor42_check, default_basis, equivalence_verdict
from tools.errors import NotInIdealError, PreconditionError, StarReductionError
from tools.expr_parser import format_expr, parse_dseries, parse_series, series_to_records
from tools.function_ring import FuncExpr, LambdaFuncSeries, fe_normal_form
from tools.reduction import ReducedElement, ReductionContext, ideal_divide, reduce_at_mu, reduced_star
from tools.run_logger import RunLogger
from tools.star_products import format_combination, k_table, star_invariant, wick_product

logger = logging.getLogger(__name__)


# -----------------------------
# Models
# -----------------------------


class RunConfig(BaseModel):
    """Validated settings of one run; echoed under "config" in JSON reports."""

    model_config = ConfigDict(frozen=True)

    n: int = STAR_DEFAULT_N
    order: int = STAR_DEFAULT_ORDER
    mu: str = STAR_DEFAULT_MU
    d_series: str = "1"
    dprime_series: Optional[str] = None
    seed: int = STAR_DEFAULT_SEED
    format: Literal["text", "json"] = "text"
    basis_degree: int = STAR_BASIS_DEGREE
    instances: Optional[int] = None

    @field_validator("n", "order", "basis_degree")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("instances")
    @classmethod
    def _positive_instances(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("mu")
    @classmethod
    def _negative_rational(cls, value: str) -> str:
        try:
            mu = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"mu must be a rational like -1/2, got {value!r}")
        if mu >= 0:
            raise ValueError(f"mu must be negative, got {value!r}")
        return str(mu)

    @field_validator("seed")
    @classmethod
    def _seed_64_bit(cls, value: int) -> int:
        if not 0 <= value < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        return value

    @property
    def context(self) -> ReductionContext:
        return ReductionContext.from_text(self.n, self.mu)


class CommandReport(BaseModel):
    command: str
    config: RunConfig
    result: Any


@dataclass
class Outcome:
    result: Any
    text: str
    exit_code: int = 0


# -----------------------------
# Formatting
# -----------------------------


def _series_text(series: LambdaFuncSeries) -> str:
    return "\n".join(f"lambda^{k}: {format_expr(c)}" for k, c in enumerate(series.coeffs))


def _report_record(report: ObstructionReport) -> Dict[str, Any]:
    witness = report.witness
    return {
        "verdict": report.verdict.value,
        "first_divergence": report.first_divergence,
        "delta": report.delta.canonical() if report.delta is not None else None,
        "c_params": [c.canonical() for c in report.c_params],
        "c_params_prime": [c.canonical() for c in report.c_params_prime],
        "witness": None
        if witness is None
        else {
            "holds": witness.holds,
            "k": witness.k,
            "agreeing_rows": witness.agreeing_rows,
            "difference_row": [c.canonical() for c in witness.difference_row],
        },
    }


def _suite_record(result: SuiteResult) -> Dict[str, Any]:
    return {
        "suite": result.suite,
        "passed": result.passed,
        "failed": result.failed,
        "witnesses": list(result.witnesses),
    }


# -----------------------------
# Commands
# -----------------------------


def _operands(args: argparse.Namespace, cfg: RunConfig):
    f = parse_series(args.f, cfg.n, cfg.order)
    g = parse_series(args.g, cfg.n, cfg.order)
    return f, g


def cmd_star(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    f, g = _operands(args, cfg)
    if args.wick:
        product = wick_product(f, g, cfg.order)
    elif args.reduced:
        D = parse_dseries(cfg.d_series, cfg.order)
        phi, psi = ReducedElement.of(f, cfg.order), ReducedElement.of(g, cfg.order)
        product = reduced_star(phi, psi, D, cfg.context, cfg.order).series
    else:
        D = parse_dseries(cfg.d_series, cfg.order)
        product = star_invariant(f, g, D, cfg.order)
    product = product.map(fe_normal_form)
    return Outcome(result=series_to_records(product), text=_series_text(product))


def cmd_reduce(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    F = parse_series(args.F, cfg.n, cfg.order)
    reduced = reduce_at_mu(F, cfg.context).series.map(fe_normal_form)
    return Outcome(result=series_to_records(reduced), text=_series_text(reduced))


def cmd_divide(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    F = parse_series(args.F, cfg.n, cfg.order)
    D = parse_dseries(cfg.d_series, cfg.order)
    try:
        quotient = ideal_divide(F, D, cfg.context, cfg.order).map(fe_normal_form)
    except NotInIdealError as exc:
        witness = exc.witness if isinstance(exc.witness, FuncExpr) else FuncExpr.zero(cfg.n)
        return Outcome(
            result={"member": False, "reason": str(exc), "witness": format_expr(witness)},
            text=f"not in the ideal: {exc}\nwitness: {format_expr(witness)}",
            exit_code=1,
        )
    return Outcome(
        result={"member": True, "quotient": series_to_records(quotient)},
        text=_series_text(quotient),
    )


def cmd_classify(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    D = parse_dseries(cfg.d_series, cfg.order)
    Dp = parse_dseries(cfg.dprime_series, cfg.order)
    report = equivalence_verdict(D, Dp, cfg.order)
    record = _report_record(report)

    lines = [f"verdict: {report.verdict.value}"]
    if report.first_divergence is not None:
        lines.append(f"first divergence: k = {report.first_divergence}")
        lines.append(f"delta: {report.delta}")
    lines.append("c: " + ", ".join(str(c) for c in report.c_params))
    lines.append("c': " + ", ".join(str(c) for c in report.c_params_prime))
    identity = None
    if report.witness is not None:
        k = report.witness.k
        lines.append(f"K-table rows agreeing: {report.witness.agreeing_rows}")
        lines.append(f"row {k + 1} difference: {format_combination(report.witness.difference_row)}")
        basis = default_basis(cfg.n, cfg.basis_degree)
        identity = cor42_check(D, Dp, cfg.context, cfg.order, basis)
        lines.append(
            f"reduced operator identity on {len(basis) ** 2} basis pairs: {'holds' if identity else 'FAILS'}"
        )
    record["reduced_identity"] = identity
    exit_code = 1 if (report.witness is not None and not report.witness.holds) or identity is False else 0
    return Outcome(result=record, text="\n".join(lines), exit_code=exit_code)


def cmd_check(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    suite_cfg = SuiteConfig(
        n=cfg.n,
        order=cfg.order,
        mu=Fraction(cfg.mu),
        instances=cfg.instances,
        basis_degree=cfg.basis_degree,
    )
    results = run_suites(names, suite_cfg, cfg.seed)
    lines: List[str] = []
    for result in results:
        lines.append(f"{result.suite}: {result.passed} passed, {result.failed} failed")
        lines.extend(f"  {w}" for w in result.witnesses)
    failed = any(not r.ok for r in results)
    return Outcome(
        result=[_suite_record(r) for r in results],
        text="\n".join(lines),
        exit_code=1 if failed else 0,
    )


def cmd_ktable(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    D = parse_dseries(cfg.d_series, cfg.order)
    table = k_table(D, cfg.order)
    lines = [f"K_{k} = {table.format_row(k)}" for k in range(table.order + 1)]
    rows = [[c.canonical() for c in row] for row in table.rows]
    return Outcome(result={"rows": rows}, text="\n".join(lines))


def _summary_line(name: str, summary: Dict[str, Any]) -> str:
    if "error" in summary:
        return f"{name}: no runs logged"
    runs = summary["runs"]
    return (
        f"{name}: {runs['total']} runs ({runs['succeeded']} succeeded, "
        f"{runs['check_failures']} failed checks, {runs['rejected']} rejected)"
    )


def cmd_history(args: argparse.Namespace, cfg: RunConfig) -> Outcome:
    if not args.log_dir:
        raise PreconditionError("history needs --log-dir or STAR_LOG_DIR")
    audit = RunLogger(args.log_dir)
    names = [args.of] if args.of else audit.list_commands()
    if args.clear:
        cleared = [name for name in names if audit.delete_history(name)]
        text = "\n".join(f"cleared {name}" for name in cleared) or "nothing to clear"
        return Outcome(result={"cleared": cleared}, text=text)
    summaries = {name: audit.summarize_runs(name) for name in names}
    text = "\n".join(_summary_line(name, s) for name, s in summaries.items()) or "no runs logged"
    return Outcome(result={"summaries": summaries}, text=text)


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], Outcome]] = {
    "star": cmd_star,
    "reduce": cmd_reduce,
    "divide": cmd_divide,
    "classify": cmd_classify,
    "check": cmd_check,
    "ktable": cmd_ktable,
    "history": cmd_history,
}

AUDITED = [name for name in COMMANDS if name != "history"]


# -----------------------------
# Entry point
# -----------------------------


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reads ``-p/q`` as a negative value, not an option.

    Subparsers are built with the parent's class, so every subcommand accepts
    ``--mu -1/2`` without the ``--mu=-1/2`` spelling.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")


def build_parser() -> argparse.ArgumentParser:
    common = CliParser(add_help=False)
    common.add_argument("--n", type=int, default=STAR_DEFAULT_N, help="dimension parameter of C^{n+1}")
    common.add_argument("--order", type=int, default=STAR_DEFAULT_ORDER, help="lambda truncation order N")
    common.add_argument("--mu", default=STAR_DEFAULT_MU, help="negative rational momentum value")
    common.add_argument("--seed", type=int, default=STAR_DEFAULT_SEED)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--log-dir", default=STAR_LOG_DIR, help="append a JSONL audit record here")

    parser = CliParser(prog="cpn-star", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    star = sub.add_parser("star", parents=[common], help="star product of two functions or series")
    star.add_argument("--f", required=True)
    star.add_argument("--g", required=True)
    star.add_argument("--D", default="1")
    mode = star.add_mutually_exclusive_group()
    mode.add_argument("--reduced", action="store_true", help="reduced product on CP^n")
    mode.add_argument("--wick", action="store_true", help="plain Wick product on C^{n+1}")

    reduce = sub.add_parser("reduce", parents=[common], help="restrict to the constraint surface")
    reduce.add_argument("--F", required=True)

    divide = sub.add_parser("divide", parents=[common], help="divide by the ideal generator")
    divide.add_argument("--F", required=True)
    divide.add_argument("--D", default="1")

    classify = sub.add_parser("classify", parents=[common], help="equivalence verdict for D and D'")
    classify.add_argument("--D", default="1")
    classify.add_argument("--Dprime", required=True)
    classify.add_argument("--basis-degree", type=int, default=STAR_BASIS_DEGREE)

    check = sub.add_parser("check", parents=[common], help="run a seeded property suite")
    check.add_argument("--suite", choices=[*SUITES, "all"], required=True)
    check.add_argument("--instances", type=int, default=None)
    check.add_argument("--basis-degree", type=int, default=STAR_BASIS_DEGREE)

    ktable = sub.add_parser("ktable", parents=[common], help="K-coefficient table of D")
    ktable.add_argument("--D", default="1")

    history = sub.add_parser("history", parents=[common], help="summarize the audit trail in --log-dir")
    history.add_argument("--of", choices=AUDITED, default=None, help="one command instead of all")
    history.add_argument("--clear", action="store_true", help="delete the selected logs")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        n=args.n,
        order=args.order,
        mu=args.mu,
        d_series=getattr(args, "D", "1"),
        dprime_series=getattr(args, "Dprime", None),
        seed=args.seed,
        format=args.format,
        basis_degree=getattr(args, "basis_degree", STAR_BASIS_DEGREE),
        instances=getattr(args, "instances", None),
    )


def _validation_message(exc: ValidationError) -> str:
    first = exc.errors()[0]
    field = ".".join(str(part) for part in first.get("loc", ()))
    return f"invalid {field}: {first.get('msg')}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=STAR_LOG_LEVEL,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    cfg: Optional[RunConfig] = None
    try:
        cfg = _config_from_args(args)
        outcome = COMMANDS[args.command](args, cfg)
    except ValidationError as exc:
        print(f"error: {_validation_message(exc)}", file=sys.stderr)
        outcome = Outcome(result={"error": _validation_message(exc)}, text="", exit_code=2)
    except StarReductionError as exc:
        logger.debug("%s rejected: %s", args.command, exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        outcome = Outcome(result={"error": f"{type(exc).__name__}: {exc}"}, text="", exit_code=2)

    if cfg is not None and outcome.exit_code != 2:
        if cfg.format == "json":
            report = CommandReport(command=args.command, config=cfg, result=outcome.result)
            print(json.dumps(report.model_dump(mode="json"), indent=2))
        else:
            print(outcome.text)

    if args.log_dir and args.command in AUDITED:
        audit = RunLogger(args.log_dir)
        audit.log_run(
            args.command,
            config=cfg.model_dump(mode="json") if cfg is not None else {},
            exit_code=outcome.exit_code,
            result=outcome.result,
        )
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
