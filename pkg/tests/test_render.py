import math

import pytest
from rich.console import Console

from gwpattern.core.errors import SpanError
from gwpattern.experiments.report import ExperimentReport, ExperimentRow
from gwpattern.render.progress import ReplicateProgress
from gwpattern.render.report_view import (
    InputsView,
    ReportTable,
    VerdictPanel,
    error_panel,
    format_number,
    render_report,
)


def _console() -> Console:
    return Console(record=True, width=160, force_terminal=False, color_system=None)


def _report(**kwargs) -> ExperimentReport:
    data = {
        "experiment": "lln",
        "distribution": "geometric:0.5",
        "pattern": "(()())",
        "seed": 42,
        "inputs": {"n_list": [500, 1000]},
        "rows": [
            ExperimentRow(n=500, replicates=10, mean=0.99, variance=0.01, stderr=0.03, reference=1.0, z=-0.33),
            ExperimentRow(n=1000, replicates=10, mean=1.01, reference=1.0, extras={"root_mean": 2.9}),
        ],
        "verdicts": {"stderr_band": True, "relative_band": True},
        "calibration": {"stderr_band": 3.0},
    }
    data.update(kwargs)
    return ExperimentReport(**data)


class TestFormatNumber:
    """Tests for cell formatting."""

    @pytest.mark.parametrize(
        ("value", "text"),
        [(None, "-"), (3, "3"), (math.inf, "inf"), (-math.inf, "-inf"), (math.nan, "nan"), (0.1234567, "0.123457")],
    )
    def test_values(self, value, text):
        """Numbers, missing values and non-finite floats."""
        assert format_number(value) == text


class TestReportTable:
    """Tests for the row table."""

    def test_columns_and_extras(self):
        """Extras appear as trailing columns."""
        console = _console()
        console.print(ReportTable(_report()))
        output = console.export_text()
        assert "root_mean" in output
        assert "stderr" in output
        assert "2.9" in output

    def test_label_column_only_when_used(self):
        """The label column is omitted for unlabelled rows."""
        console = _console()
        console.print(ReportTable(_report(rows=[ExperimentRow(n=11, label="l=2", mean=1.0)])))
        assert "label" in console.export_text()


class TestVerdictPanel:
    """Tests for the pass/fail panel."""

    def test_levels(self):
        """success, warning and error follow validity and verdicts."""
        assert VerdictPanel(_report()).level == "success"
        assert VerdictPanel(_report(verdicts={"z_bound": False})).level == "warning"
        failed = _report()
        failed.fail(SpanError("size unreachable"))
        assert VerdictPanel(failed).level == "error"

    def test_lists_verdicts_and_calibration(self):
        """Every verdict and the calibration bands are shown."""
        console = _console()
        console.print(VerdictPanel(_report(verdicts={"stderr_band": True, "z_bound": False})))
        output = console.export_text()
        assert "stderr_band: pass" in output
        assert "z_bound: FAIL" in output
        assert "stderr_band=3" in output
        assert "seed 42" in output


class TestRenderReport:
    """Tests for the full report rendering."""

    def test_sections(self):
        """Inputs, constants, rows, skipped sizes and verdicts are printed."""
        console = _console()
        report = _report(constants={"limit_root_mean": 0.5}, skipped=[100])
        render_report(report, console)
        output = console.export_text()
        assert "geometric:0.5" in output
        assert "limit_root_mean" in output
        assert "skipped n (span): [100]" in output
        assert "all verdicts pass" in output

    def test_inputs_view(self):
        """Keys are listed with their values."""
        console = _console()
        console.print(InputsView({"seed": 7}, title=None))
        assert "seed: 7" in console.export_text()

    def test_error_panel(self):
        """The error type is the title."""
        console = _console()
        console.print(error_panel(SpanError("no tree of size 10")))
        output = console.export_text()
        assert "SpanError" in output
        assert "no tree of size 10" in output


class TestReplicateProgress:
    """Tests for the replicate counter."""

    def test_disabled_is_silent(self):
        """A disabled bar tracks nothing and prints nothing."""
        console = _console()
        with ReplicateProgress("lln", 10, console, enabled=False) as progress:
            progress.advance(5)
            assert progress.completed == 0.0
        assert console.export_text() == ""

    def test_enabled_counts(self):
        """An enabled bar counts advanced replicates."""
        console = _console()
        with ReplicateProgress("lln", 10, console, enabled=True) as progress:
            progress.advance(4)
            progress.advance(3)
            assert progress.completed == 7

    def test_default_follows_terminal(self):
        """Without an explicit flag the bar shows only on a terminal."""
        assert ReplicateProgress("x", 1, _console()).enabled is False
