import pytest
import json
from fractions import Fraction
from pathlib import Path
import sys

# Adjust import path
repo_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(repo_root))

import cli
from tools.expr_parser import parse_expr
from tools.function_ring import FuncExpr

N1 = 1
PHI = "z0*zb0*x^-1"


def _lines(capsys):
    return capsys.readouterr().out.strip().splitlines()


def _coefficient(line: str) -> FuncExpr:
    return parse_expr(line.split(": ", 1)[1], N1)


class TestClassifyCommand:

    def test_first_order_divergence(self, capsys):
        code = cli.main(["classify", "--D", "1", "--Dprime", "1 + l", "--order", "4"])
        lines = _lines(capsys)
        assert code == 0
        assert lines[0] == "verdict: non-equivalent"
        assert "first divergence: k = 1" in lines
        assert "delta: 1" in lines
        assert "c: 0, 0, 0, 0" in lines
        assert "c': -1, 1, -1, 1" in lines
        assert "K-table rows agreeing: 2" in lines
        assert "row 2 difference: 1*M_1" in lines
        assert "reduced operator identity on 16 basis pairs: holds" in lines

    def test_third_order_divergence(self, capsys):
        code = cli.main(["classify", "--D", "1 + l", "--Dprime", "1 + l + 5*l^3", "--order", "5"])
        lines = _lines(capsys)
        assert code == 0
        assert "first divergence: k = 3" in lines
        assert "delta: 5" in lines
        assert "row 4 difference: 5*M_1" in lines

    def test_equivalent_after_truncation(self, capsys):
        code = cli.main(["classify", "--D", "1 + l", "--Dprime", "1 + l + l^6", "--order", "4"])
        lines = _lines(capsys)
        assert code == 0
        assert lines[0] == "verdict: equivalent"
        assert not any(line.startswith("first divergence") for line in lines)

    def test_divergence_at_truncation_order(self, capsys):
        code = cli.main(["classify", "--Dprime", "1 + l^4", "--order", "4"])
        lines = _lines(capsys)
        assert code == 0
        assert "first divergence: k = 4" in lines
        assert not any(line.startswith("K-table rows") for line in lines)

    def test_json_report(self, capsys):
        code = cli.main(["classify", "--Dprime", "1 + l", "--order", "3", "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["command"] == "classify"
        assert report["config"]["mu"] == "-1/2"
        assert report["config"]["dprime_series"] == "1 + l"
        assert report["result"]["verdict"] == "non-equivalent"
        assert report["result"]["first_divergence"] == 1
        assert report["result"]["delta"] == "1/1+0/1i"
        assert report["result"]["witness"]["difference_row"] == ["0/1+0/1i", "1/1+0/1i", "0/1+0/1i"]
        assert report["result"]["reduced_identity"] is True

    def test_dprime_is_required(self):
        with pytest.raises(SystemExit) as exc_info:
            cli.main(["classify", "--D", "1"])
        assert exc_info.value.code == 2

    def test_unnormalized_d_rejected(self, capsys):
        code = cli.main(["classify", "--Dprime", "2 + l"])
        assert code == 2
        assert "SeriesNormalizationError" in capsys.readouterr().err


class TestStarCommand:

    def test_reduced_worked_example(self, capsys):
        """Test phi *_mu phi = phi^2 + lambda phi (1 - phi) at mu = -1/2."""
        code = cli.main(["star", "--reduced", "--f", PHI, "--g", PHI, "--order", "1"])
        lines = _lines(capsys)
        phi = parse_expr(PHI, N1)
        assert code == 0
        assert len(lines) == 2
        assert _coefficient(lines[0]).equals(phi * phi)
        assert _coefficient(lines[1]).equals(phi * (FuncExpr.one(N1) - phi))

    def test_wick(self, capsys):
        code = cli.main(["star", "--wick", "--f", "z0", "--g", "zb0", "--order", "2"])
        lines = _lines(capsys)
        assert code == 0
        assert lines == ["lambda^0: z0*zb0", "lambda^1: 1", "lambda^2: 0"]

    def test_invariant_radial_factor(self, capsys):
        code = cli.main(["star", "--f", "x^2", "--g", PHI, "--D", "1 + l", "--order", "2"])
        lines = _lines(capsys)
        assert code == 0
        assert lines == ["lambda^0: z0*zb0*x", "lambda^1: 0", "lambda^2: 0"]

    def test_reduced_requires_homogeneous(self, capsys):
        code = cli.main(["star", "--reduced", "--f", "x", "--g", PHI])
        assert code == 2
        assert "NotHomogeneousError" in capsys.readouterr().err

    def test_parse_error(self, capsys):
        code = cli.main(["star", "--f", "z0 +", "--g", "1"])
        assert code == 2
        assert "ExprSyntaxError" in capsys.readouterr().err

    def test_modes_are_exclusive(self):
        with pytest.raises(SystemExit):
            cli.main(["star", "--reduced", "--wick", "--f", "1", "--g", "1"])

    def test_negative_fraction_mu_as_separate_argument(self, capsys):
        """Test --mu "-1/2" is read as a value, with the result in normal form."""
        argv = [
            "star", "--n", "1", "--order", "1", "--D", "1", "--mu", "-1/2",
            "--reduced", "--f", PHI, "--g", PHI,
        ]
        code = cli.main(argv)
        assert code == 0
        assert _lines(capsys) == [
            "lambda^0: z0^2*zb0^2*x^-2",
            "lambda^1: z0*zb0*x^-1 - z0^2*zb0^2*x^-2",
        ]

    def test_negative_fraction_mu_other_value(self, capsys):
        code = cli.main(["reduce", "--F", "x", "--mu", "-3/2", "--order", "1"])
        assert code == 0
        assert _lines(capsys) == ["lambda^0: 3", "lambda^1: 0"]

    def test_json_records_match_text(self, capsys):
        code = cli.main(["star", "--reduced", "--f", PHI, "--g", PHI, "--order", "1", "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["config"]["mu"] == "-1/2"
        first_order = report["result"][1]
        assert [(r["alpha"], r["beta"], r["m"], r["coeff"]) for r in first_order] == [
            ([1, 0], [1, 0], -1, "1/1+0/1i"),
            ([2, 0], [2, 0], -2, "-1/1+0/1i"),
        ]


class TestReduceAndDivideCommands:

    def test_reduce(self, capsys):
        code = cli.main(["reduce", "--F", "[z0*zb0 + x^2; x^-1]", "--mu", "-1", "--order", "1"])
        lines = _lines(capsys)
        assert code == 0
        assert _coefficient(lines[0]).equals(parse_expr(f"2*{PHI} + 4", N1))
        assert _coefficient(lines[1]).equals(FuncExpr.constant(Fraction(1, 2), N1))

    def test_divide(self, capsys):
        code = cli.main(["divide", "--F", "x - 1", "--order", "1"])
        lines = _lines(capsys)
        assert code == 0
        assert lines == ["lambda^0: -2", "lambda^1: 0"]

    def test_divide_refuted(self, capsys):
        code = cli.main(["divide", "--F", "x", "--order", "1"])
        out = capsys.readouterr().out
        assert code == 1
        assert "not in the ideal" in out
        assert "witness: 1" in out

    def test_divide_refuted_json(self, capsys):
        code = cli.main(["divide", "--F", PHI, "--order", "1", "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        assert code == 1
        assert report["result"]["member"] is False
        assert report["result"]["witness"] == PHI


class TestValidation:

    @pytest.mark.parametrize("mu", ["1/2", "0", "abc"])
    def test_invalid_mu(self, mu, capsys):
        code = cli.main(["reduce", "--F", "1", "--mu", mu])
        assert code == 2
        assert "invalid mu" in capsys.readouterr().err

    def test_invalid_order(self, capsys):
        code = cli.main(["ktable", "--order", "0"])
        assert code == 2
        assert "invalid order" in capsys.readouterr().err


class TestKTableAndCheckCommands:

    def test_ktable(self, capsys):
        code = cli.main(["ktable", "--D", "1", "--order", "3"])
        lines = _lines(capsys)
        assert code == 0
        assert lines[0] == "K_0 = 1*M_0"
        assert lines[1] == "K_1 = 1*M_1"
        assert lines[2] == "K_2 = -1*M_1 + 1/2*M_2"

    def test_ktable_json(self, capsys):
        cli.main(["ktable", "--D", "1 + l", "--order", "2", "--format", "json"])
        report = json.loads(capsys.readouterr().out)
        assert report["result"]["rows"][2] == ["0/1+0/1i", "-2/1+0/1i", "1/2+0/1i"]

    def test_check_suite(self, capsys):
        code = cli.main(["check", "--suite", "qmm", "--instances", "3", "--order", "2"])
        lines = _lines(capsys)
        assert code == 0
        assert lines == ["qmm: 6 passed, 0 failed"]

    def test_check_is_deterministic(self, capsys):
        argv = ["check", "--suite", "verdict", "--instances", "5", "--order", "3", "--seed", "11", "--format", "json"]
        cli.main(argv)
        first = json.loads(capsys.readouterr().out)
        cli.main(argv)
        second = json.loads(capsys.readouterr().out)
        assert first == second
        assert first["result"][0]["passed"] == 5

    def test_unknown_suite(self):
        with pytest.raises(SystemExit):
            cli.main(["check", "--suite", "nope"])


class TestRunLogging:

    def test_log_dir(self, tmp_path, capsys):
        code = cli.main(["ktable", "--order", "2", "--log-dir", str(tmp_path)])
        capsys.readouterr()
        log_file = tmp_path / "ktable.jsonl"
        assert code == 0
        entry = json.loads(log_file.read_text().strip())
        assert entry["command"] == "ktable"
        assert entry["exit_code"] == 0
        assert entry["config"]["order"] == 2

    def test_rejected_run_is_logged(self, tmp_path, capsys):
        code = cli.main(["reduce", "--F", "z0", "--log-dir", str(tmp_path)])
        capsys.readouterr()
        entry = json.loads((tmp_path / "reduce.jsonl").read_text().strip())
        assert code == 2
        assert entry["exit_code"] == 2
        assert "NotInvariantError" in entry["result"]["error"]

    def test_history_summarizes_logged_runs(self, tmp_path, capsys):
        cli.main(["ktable", "--order", "1", "--log-dir", str(tmp_path)])
        cli.main(["reduce", "--F", "z0", "--log-dir", str(tmp_path)])
        cli.main(["divide", "--F", "x", "--order", "1", "--log-dir", str(tmp_path)])
        capsys.readouterr()

        code = cli.main(["history", "--log-dir", str(tmp_path)])
        assert code == 0
        assert _lines(capsys) == [
            "divide: 1 runs (0 succeeded, 1 failed checks, 0 rejected)",
            "ktable: 1 runs (1 succeeded, 0 failed checks, 0 rejected)",
            "reduce: 1 runs (0 succeeded, 0 failed checks, 1 rejected)",
        ]
        assert not (tmp_path / "history.jsonl").exists()

    def test_history_of_one_command_as_json(self, tmp_path, capsys):
        cli.main(["ktable", "--order", "1", "--log-dir", str(tmp_path)])
        capsys.readouterr()
        code = cli.main(["history", "--of", "ktable", "--format", "json", "--log-dir", str(tmp_path)])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["result"]["summaries"]["ktable"]["runs"]["total"] == 1

    def test_history_clear(self, tmp_path, capsys):
        cli.main(["ktable", "--order", "1", "--log-dir", str(tmp_path)])
        capsys.readouterr()
        code = cli.main(["history", "--of", "ktable", "--clear", "--log-dir", str(tmp_path)])
        assert code == 0
        assert _lines(capsys) == ["cleared ktable"]
        assert not (tmp_path / "ktable.jsonl").exists()

    def test_history_needs_log_dir(self, monkeypatch, capsys):
        monkeypatch.setattr(cli, "STAR_LOG_DIR", None)
        code = cli.main(["history"])
        assert code == 2
        assert "history needs --log-dir" in capsys.readouterr().err
