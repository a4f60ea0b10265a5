"""
Tests for the command-line driver and the report formats.
"""

import json
import logging

import pytest
from click.testing import CliRunner

from hapassess import __version__
from hapassess.cli import cli
from hapassess.report import Tabular, flatten, render_csv, render_table
from hapassess.scenario import bundled_scenario_path

from .conftest import GOLDEN_DIR


@pytest.fixture(autouse=True)
def _restore_logging():
    """Undo the stderr handler each CLI run installs on the root logger."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def runner():
    return CliRunner()


def run_to_file(runner, tmp_path, *args):
    """Invoke the CLI with --out and return (result, file text)."""
    out = tmp_path / "report.out"
    result = runner.invoke(cli, [*args, "--out", str(out)])
    assert result.exit_code == 0, result.output
    return result, out.read_text(encoding="utf-8")


class TestGoldenTables:
    """Tests that reproduce the case-study tables byte for byte."""

    def test_architecture_comparison(self, runner, tmp_path):
        """Test the satellite and HAP comparison."""
        _, text = run_to_file(runner, tmp_path, "compare", "--arch", "sat", "--arch", "hap-2a",
                              "--arch", "hap-2b", "--format", "csv")
        assert text == (GOLDEN_DIR / "table4_hap_compare.csv").read_text(encoding="utf-8")

    def test_platforms(self, runner, tmp_path):
        """Test the platform table."""
        _, text = run_to_file(runner, tmp_path, "platforms", "--format", "csv")
        assert text == (GOLDEN_DIR / "table3_platforms.csv").read_text(encoding="utf-8")

    def test_forecast(self, runner, tmp_path):
        """Test the wholesale forecast."""
        _, text = run_to_file(runner, tmp_path, "forecast", "--format", "csv")
        assert text == (GOLDEN_DIR / "table5_forecast.csv").read_text(encoding="utf-8")

    def test_satellite_assessment(self, runner, tmp_path):
        """Test the undiscounted satellite assessment."""
        _, text = run_to_file(runner, tmp_path, "assess", "--arch", "sat", "--format", "csv",
                              "--discount-rate", "0")
        assert text == (GOLDEN_DIR / "table2_satellite.csv").read_text(encoding="utf-8")


class TestStructuredOutput:
    """Tests for the JSON and TSON envelopes."""

    def test_envelope(self, runner, tmp_path):
        """Test the tool block, digest and body."""
        _, text = run_to_file(runner, tmp_path, "assess", "--arch", "hap-2a", "--format", "structured")
        document = json.loads(text)
        assert document["tool"] == {"name": "hapassess", "version": __version__}
        assert len(document["scenario_digest"]) == 64
        assert "generated_at" not in document
        body = document["body"]
        assert body["architecture"] == "hap-2a"
        assert body["per_subscriber_monthly"] == {"cents": 944, "eur": "9.4"}
        assert body["feasibility"]["binding_constraint"] == "none"

    def test_deterministic(self, runner, tmp_path):
        """Test that two runs produce identical bytes."""
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        for path in (first, second):
            result = runner.invoke(cli, ["assess", "--arch", "integrated", "--format", "structured",
                                         "--out", str(path)])
            assert result.exit_code == 0, result.output
        assert first.read_bytes() == second.read_bytes()

    def test_timestamp(self, runner, tmp_path):
        """Test that --timestamp adds generated_at."""
        _, text = run_to_file(runner, tmp_path, "assess", "--arch", "sat", "--format", "structured",
                              "--timestamp")
        assert "generated_at" in json.loads(text)

    def test_integrated_body(self, runner, tmp_path):
        """Test the operator sections of an integrated report."""
        _, text = run_to_file(runner, tmp_path, "assess", "--arch", "integrated", "--format", "structured",
                              "--discount-rate", "0")
        body = json.loads(text)["body"]
        assert body["sellable_links"] == 576
        assert body["cash_flows"]["basis"] == "operator"
        assert body["cash_flows"]["npv"] == {"cents": 3583600000, "meur": "35.8"}
        assert [row["tier"] for row in body["delivered_availability"]] == [
            "aerial_only", "aerial_with_failover", "complete_high_availability",
        ]

    def test_compare_body(self, runner, tmp_path):
        """Test the comparison body."""
        _, text = run_to_file(runner, tmp_path, "compare", "--arch", "sat", "--arch", "integrated",
                              "--format", "structured", "--workers", "2")
        body = json.loads(text)["body"]
        assert body["arpu_monthly"] == {"cents": 350, "eur": "3.5"}
        assert [row["architecture"] for row in body["rows"]] == ["sat", "integrated"]

    def test_tson(self, runner, tmp_path):
        """Test that TSON output is deterministic and carries the digest."""
        _, first = run_to_file(runner, tmp_path, "platforms", "--format", "tson")
        _, second = run_to_file(runner, tmp_path, "platforms", "--format", "tson")
        _, structured = run_to_file(runner, tmp_path, "platforms", "--format", "structured")
        assert first == second
        assert json.loads(structured)["scenario_digest"] in first


class TestCommands:
    """Tests for the individual commands."""

    def test_version(self, runner):
        """Test --version."""
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_table_format(self, runner):
        """Test the default human table."""
        result = runner.invoke(cli, ["assess", "--arch", "hap-2a"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0].split() == ["metric", "value"]
        assert any(line.split() == ["per_subscriber_monthly.eur", "9.4"] for line in lines)

    def test_validate(self, runner):
        """Test scenario validation output."""
        result = runner.invoke(cli, ["validate"])
        assert result.exit_code == 0
        assert "valid: Rural backhaul, 108 sites" in result.output
        assert "hap-plane-fleet (hap_direct)" in result.output

    def test_validate_explicit_file(self, runner):
        """Test validate with --scenario."""
        result = runner.invoke(cli, ["validate", "--scenario", str(bundled_scenario_path())])
        assert result.exit_code == 0

    def test_availability(self, runner, tmp_path):
        """Test the analytic availability table."""
        _, text = run_to_file(runner, tmp_path, "availability", "--format", "csv")
        lines = text.splitlines()
        assert lines[0] == "offer,tier,availability,downtime_hours"
        assert lines[1] == "aerial,aerial_only,0.98901,96.27"
        assert lines[2].startswith("aerial_failover,aerial_with_failover,0.989999,")

    def test_availability_monte_carlo(self, runner, tmp_path):
        """Test the Monte Carlo columns."""
        _, text = run_to_file(runner, tmp_path, "availability", "--monte-carlo", "--trials", "50000",
                              "--seed", "9", "--format", "structured")
        body = json.loads(text)["body"]
        assert body["monte_carlo"] == {"trials": 50000, "seed": 9}
        assert all(row["mc_agrees"] for row in body["rows"])

    def test_forecast_years(self, runner, tmp_path):
        """Test a shorter forecast."""
        _, text = run_to_file(runner, tmp_path, "forecast", "--years", "3", "--format", "csv")
        assert len(text.splitlines()) == 4

    def test_forecast_single_year(self, runner, tmp_path):
        """Test that one year gives only the year-0 row."""
        _, text = run_to_file(runner, tmp_path, "forecast", "--years", "1", "--format", "csv")
        assert text.splitlines()[1:] == ["0,192,86,86,364,63.2,367200000,3.7"]

    def test_compare_same_architecture_twice(self, runner, tmp_path):
        """Test that repeating an id gives identical rows."""
        _, text = run_to_file(runner, tmp_path, "compare", "--arch", "sat", "--arch", "sat",
                              "--format", "csv")
        rows = text.splitlines()[1:]
        assert len(rows) == 2 and rows[0] == rows[1]

    def test_compare_mno_views(self, runner, tmp_path):
        """Test own platform against bought wholesale links."""
        _, text = run_to_file(runner, tmp_path, "compare", "--arch", "hap-2a", "--arch", "integrated",
                              "--format", "structured")
        rows = json.loads(text)["body"]["rows"]
        assert [row["per_subscriber_monthly_cents"] for row in rows] == [944, 215]

    def test_stdout_when_no_out(self, runner):
        """Test that reports go to stdout by default."""
        result = runner.invoke(cli, ["forecast", "--format", "csv"])
        assert result.exit_code == 0
        assert "9,230,260,86,576,100.0,587400000,5.9" in result.output


class TestExitCodes:
    """Tests for error reporting and exit codes."""

    def test_infeasible(self, runner):
        """Test exit code 3 with the feasibility report."""
        result = runner.invoke(cli, ["assess", "--arch", "hap-plane-999"])
        assert result.exit_code == 3
        assert "[INFEASIBLE] architecture 'hap-plane-999'" in result.output
        assert '"binding_constraint": "fronthaul"' in result.output

    def test_compare_keeps_going(self, runner, tmp_path):
        """Test that a failing architecture becomes a row."""
        _, text = run_to_file(runner, tmp_path, "compare", "--arch", "hap-2a", "--arch", "hap-plane-999",
                              "--format", "csv")
        last = text.splitlines()[-1]
        assert last.startswith("hap-plane-999,,,,,,,,false,[INFEASIBLE]")

    def test_compare_needs_two(self, runner):
        """Test the usage error for a single architecture."""
        result = runner.invoke(cli, ["compare", "--arch", "sat"])
        assert result.exit_code == 2

    def test_unknown_architecture(self, runner):
        """Test exit code 2 for an unknown id."""
        result = runner.invoke(cli, ["assess", "--arch", "nope"])
        assert result.exit_code == 2
        assert "UNKNOWN_REFERENCE" in result.output

    def test_missing_scenario(self, runner, tmp_path):
        """Test exit code 1 for an unreadable file."""
        result = runner.invoke(cli, ["validate", "--scenario", str(tmp_path / "absent.toml")])
        assert result.exit_code == 1
        assert "[IO]" in result.output

    def test_undecodable_scenario(self, runner, tmp_path):
        """Test exit code 1 for a file that is not UTF-8."""
        path = tmp_path / "binary.toml"
        path.write_bytes(b"\xff\xfe\x00")
        result = runner.invoke(cli, ["validate", "--scenario", str(path)])
        assert result.exit_code == 1
        assert "[IO]" in result.output

    def test_directory_as_scenario(self, runner, tmp_path):
        """Test exit code 1 when the scenario path is a directory."""
        result = runner.invoke(cli, ["assess", "--arch", "sat", "--scenario", str(tmp_path)])
        assert result.exit_code == 1
        assert "[IO]" in result.output

    def test_invalid_scenario(self, runner, tmp_path):
        """Test exit code 2 for a constraint violation."""
        text = bundled_scenario_path().read_text(encoding="utf-8")
        path = tmp_path / "bad.toml"
        path.write_text(text.replace("site_count = 108", "site_count = 100"), encoding="utf-8")
        result = runner.invoke(cli, ["validate", "--scenario", str(path)])
        assert result.exit_code == 2
        assert "total_backhaul_demand_mbps 756 does not match" in result.output

    def test_capacity_exceeded(self, runner, tmp_path):
        """Test exit code 3 when the forecast overflows."""
        text = bundled_scenario_path().read_text(encoding="utf-8")
        path = tmp_path / "doubled.toml"
        path.write_text(
            text.replace(
                "links = { aerial = 192, aerial_failover = 86, complete = 86 }",
                "links = { aerial = 384, aerial_failover = 172, complete = 172 }",
            ),
            encoding="utf-8",
        )
        result = runner.invoke(cli, ["forecast", "--scenario", str(path)])
        assert result.exit_code == 3
        assert "CAPACITY_EXCEEDED" in result.output
        assert "year 0" in result.output

    def test_forecast_beyond_schedule(self, runner):
        """Test exit code 2 for years past the demand schedule."""
        result = runner.invoke(cli, ["forecast", "--years", "11"])
        assert result.exit_code == 2
        assert "OUT_OF_RANGE" in result.output

    def test_bad_discount_rate(self, runner):
        """Test a non-numeric flag value."""
        result = runner.invoke(cli, ["assess", "--arch", "sat", "--discount-rate", "high"])
        assert result.exit_code == 2

    def test_discount_rate_floor(self, runner):
        """Test a discount rate at -1."""
        result = runner.invoke(cli, ["assess", "--arch", "sat", "--discount-rate", "-1"])
        assert result.exit_code == 2

    def test_unwritable_out(self, runner, tmp_path):
        """Test exit code 1 when --out cannot be written."""
        target = tmp_path / "missing" / "report.csv"
        result = runner.invoke(cli, ["platforms", "--format", "csv", "--out", str(target)])
        assert result.exit_code == 1


class TestRendering:
    """Tests for the tabular renderers."""

    def test_flatten(self):
        """Test dotted keys for nested records and lists."""
        record = {"a": {"b": 1}, "c": [2, {"d": None}], "e": True}
        assert flatten(record) == [("a.b", 1), ("c.0", 2), ("c.1.d", None), ("e", True)]

    def test_cells(self):
        """Test that None is empty and booleans are lower case."""
        tabular = Tabular.from_records([{"x": None, "y": True}, {"x": 1, "z": False}])
        assert tabular.columns == ("x", "y", "z")
        assert render_csv(tabular) == "x,y,z\n,true,\n1,,false\n"

    def test_table_alignment(self):
        """Test column padding."""
        text = render_table(Tabular(("name", "n"), (("ab", "1"), ("abcdef", "22"))))
        assert text.splitlines() == ["name    n", "------  --", "ab      1", "abcdef  22"]
