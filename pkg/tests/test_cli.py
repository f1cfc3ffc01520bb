"""Tests for the sobolev-certify command line."""

import io
import json
import math
from fractions import Fraction

import pytest

from src.cli import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    SCHEMA,
    Report,
    RunConfig,
    emit_table,
    main,
    run,
)
from src.errors import CertificateError
from src.quadrature import QuadratureResult
from src.quadrature_verify import EmbeddingReport
from src.radial_engine import BumpProfile, ExtremalRatio


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_ell_single_value(capsys):
    """Test l_3^3 = 28 by both methods."""
    code, document = run_json(capsys, ["ell", "--n", "3", "--m", "3"])

    assert code == EXIT_OK
    assert document["schema"] == SCHEMA
    assert document["closed_form"] == "28"
    assert document["symbolic"] == "28"
    assert document["agree"] is True


def test_ell_table_text(capsys):
    """Test the l table for N <= 3 prints a header and six rows."""
    code = main(["ell", "--n", "3", "--format", "text"])
    lines = capsys.readouterr().out.splitlines()

    assert code == EXIT_OK
    assert lines[0].startswith("# schema=sobolev-certify/1 command=ell")
    assert lines[1].split() == ["N", "m", "closed_form", "symbolic", "agree"]
    assert len(lines) == 8
    assert lines[-1].split() == ["3", "3", "28", "28", "true"]


def test_kn_dimension_one(capsys):
    """Test K_1 = 1/2."""
    code, document = run_json(capsys, ["kn", "--n", "1"])

    assert code == EXIT_OK
    assert document["rows"][0]["value"] == 0.5
    assert document["rows"][0]["sphere_area"] == "2"


def test_check_operator(capsys):
    """Test F vanishes in dimension two."""
    code, document = run_json(capsys, ["check-operator", "--n", "2"])

    assert code == EXIT_OK
    assert document["F_is_zero"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["ell", "--n", "0"],
        ["ell", "--n", "7"],
        ["extremal", "--eps", "0.5"],
        ["check-weak", "--tol", "1.0"],
        ["kn", "--digits", "0"],
    ],
)
def test_invalid_arguments_exit_usage(argv, capsys):
    """Test out-of-range values exit with status 2 before any computation."""
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_unknown_format_exits_usage():
    """Test argparse rejects unknown formats with status 2."""
    with pytest.raises(SystemExit) as excinfo:
        main(["kn", "--format", "xml"])

    assert excinfo.value.code == EXIT_USAGE


def test_missing_config_file_exits_usage(tmp_path):
    """Test --config pointing nowhere is a usage error."""
    assert main(["kn", "--config", str(tmp_path / "absent.yaml")]) == EXIT_USAGE


def test_output_is_reproducible(capsys):
    """Test two identical runs print byte-identical reports."""
    main(["ell", "--n", "3", "--format", "csv"])
    first = capsys.readouterr().out
    main(["ell", "--n", "3", "--format", "csv"])

    assert capsys.readouterr().out == first


def test_emit_table_empty_rows():
    """Test an empty table renders the header only."""
    assert emit_table([], "csv", ["N", "value"]) == "N,value\n"
    assert emit_table([], "json", ["N", "value"]) == "[]"
    assert emit_table([], "text", ["N", "value"]) == "N  value\n"


def test_emit_table_formats_values():
    """Test rationals print as p/q and floats honor the digit count."""
    rows = [{"name": "a,b", "ell": Fraction(3, 4), "x": 1 / 3, "ok": True}]

    assert emit_table(rows, "csv", digits=4) == 'name,ell,x,ok\n"a,b",3/4,0.3333,true\n'
    assert json.loads(emit_table(rows, "json", digits=4)) == [
        {"name": "a,b", "ell": "3/4", "x": 0.3333, "ok": True}
    ]


def test_emit_table_unknown_format():
    """Test unknown formats are refused."""
    with pytest.raises(ValueError):
        emit_table([{"a": 1}], "xml")


def test_failing_report_exits_one(mocker):
    """Test a report with passed = False maps to exit status 1."""
    failing = Report("kn", False, ["N"], [{"N": 1}])
    mocker.patch.dict("src.cli.COMMANDS", {"kn": lambda config: failing})

    assert run(RunConfig("kn").validate(), io.StringIO()) == EXIT_FAILED


def test_certificate_error_exits_one(mocker):
    """Test a raised CertificateError maps to exit status 1 without output."""
    stream = io.StringIO()

    def broken(config):
        raise CertificateError("l mismatch")

    mocker.patch.dict("src.cli.COMMANDS", {"kn": broken})

    assert run(RunConfig("kn").validate(), stream) == EXIT_FAILED
    assert stream.getvalue() == ""


def test_tracking_called_when_enabled(mocker):
    """Test enabled tracking forwards params and metrics."""
    mock_log = mocker.patch("src.cli.log_certificate")
    data = {"tracking": {"enabled": True, "experiment_name": "test"}}
    config = RunConfig("check-operator", dimension=2, config_data=data).validate()

    assert run(config, io.StringIO()) == EXIT_OK
    command, params, _, passed, _ = mock_log.call_args.args
    assert command == "check-operator"
    assert params["N"] == 2
    assert passed is True


def test_tracking_skipped_by_default(mocker):
    """Test no MLflow call is made with the default configuration."""
    mock_log = mocker.patch("src.cli.log_certificate")

    run(RunConfig("kn", dimension=1).validate(), io.StringIO())

    mock_log.assert_not_called()


def test_run_config_defaults():
    """Test m defaults to N and the tolerance comes from config.yaml."""
    config = RunConfig("ell", dimension=4)

    assert config.m == 4
    assert config.tolerance() == 1e-8
    assert config.jet_dps() == 30


def test_invariance_float_threshold_is_tighter_than_direction(mocker):
    """Test a float invariance error of 5e-10 fails check-invariance."""
    mocker.patch("src.cli.numeric_invariance_error", return_value=5e-10)
    data = {"invariance": {"rational_matrices": 1, "float_matrices": 3}}
    config = RunConfig("check-invariance", dimension=2, config_data=data).validate()
    stream = io.StringIO()

    assert run(config, stream) == EXIT_FAILED
    document = json.loads(stream.getvalue())
    assert all(row["passed"] is False for row in document["rows"])


def fake_ratio(eps, value, denominator, limit=2 * math.pi):
    return ExtremalRatio(2, eps, QuadratureResult(value, 1e-12, 100, True), denominator, limit)


def test_extremal_fails_when_ratios_increase(mocker):
    """Test ratios that grow as eps shrinks fail the extremal command."""
    results = [fake_ratio(1e-2, 28.0, 4.0), fake_ratio(1e-3, 45.0, 6.0), fake_ratio(1e-4, 64.0, 8.0)]
    mocker.patch("src.cli.extremal_sweep", return_value=results)
    stream = io.StringIO()

    assert run(RunConfig("extremal").validate(), stream) == EXIT_FAILED
    assert json.loads(stream.getvalue())["decreasing"] is False


def test_extremal_fails_when_extrapolation_misses_limit(mocker):
    """Test decreasing ratios whose extrapolation lands 10% off the limit fail."""
    limit = 2 * math.pi
    target = 1.1 * limit
    results = [
        fake_ratio(eps, target * u + 1.0, u, limit)
        for eps, u in ((1e-2, 4.0), (1e-3, 6.0), (1e-4, 8.0))
    ]
    mocker.patch("src.cli.extremal_sweep", return_value=results)
    stream = io.StringIO()

    assert run(RunConfig("extremal").validate(), stream) == EXIT_FAILED
    document = json.loads(stream.getvalue())
    assert document["decreasing"] is True
    assert document["extrapolated_value"] == pytest.approx(target)
    assert document["extrapolation_within_tolerance"] is False


def test_inequality_margin_within_error_bar_fails(mocker):
    """Test a positive margin smaller than its quadrature error bar is not accepted."""
    report = EmbeddingReport(
        2, "BumpProfile(radius=1)", 1.0, QuadratureResult(10.0, 0.05, 100, True), 0.1, 1.0, 1e-3
    )
    mocker.patch("src.cli.embedding_inequality_check", return_value=report)
    mocker.patch("src.cli.seminorm_dilation_gap", return_value=0.0)
    stream = io.StringIO()

    assert run(RunConfig("check-inequality", eps=(1e-3,)).validate(), stream) == EXIT_FAILED
    rows = json.loads(stream.getvalue())["rows"]
    assert rows[0]["margin_error"] == pytest.approx(5e-3)
    assert all(row["passed"] is False for row in rows)


def test_weak_check_reports_dilation_gap(mocker):
    """Test a dilation gap above threshold fails a row that passes otherwise."""
    mocker.patch("src.cli.profile_corpus", return_value=[BumpProfile(1.0)])
    mocker.patch("src.cli.direction_independence_error", return_value=0.0)
    mocker.patch("src.cli.dilation_invariance_gap", return_value=1e-3)
    stream = io.StringIO()

    assert run(RunConfig("check-weak").validate(), stream) == EXIT_FAILED
    row = json.loads(stream.getvalue())["rows"][0]
    assert row["relative_error"] <= 1e-6
    assert row["dilation_gap"] == pytest.approx(1e-3)
    assert row["passed"] is False


def test_value_error_exits_usage(mocker):
    """Test a ValueError raised by a command maps to exit status 2."""

    def broken(config):
        raise ValueError("profile must be compactly supported")

    mocker.patch.dict("src.cli.COMMANDS", {"kn": broken})

    assert run(RunConfig("kn").validate(), io.StringIO()) == EXIT_USAGE


def test_arithmetic_error_exits_one(mocker):
    """Test a ZeroDivisionError raised by a command maps to exit status 1."""

    def broken(config):
        raise ZeroDivisionError("division by zero")

    mocker.patch.dict("src.cli.COMMANDS", {"kn": broken})

    assert run(RunConfig("kn").validate(), io.StringIO()) == EXIT_FAILED


def test_default_eps_cover_three_decades():
    """Test the default sweep runs eps = 1e-2, 1e-3, 1e-4."""
    assert RunConfig("extremal").eps == (1e-2, 1e-3, 1e-4)
