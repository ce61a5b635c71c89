import math
from typing import Any, Literal

from rich.console import Console, Group, RenderableType
from rich.panel import Panel
from rich.table import Table as RichTable
from rich.text import Text

from ..experiments.report import ExperimentReport

VerdictLevel = Literal["success", "warning", "error"]

_LEVEL_STYLES: dict[VerdictLevel, str] = {
    "success": "bold green",
    "warning": "bold yellow",
    "error": "bold red",
}
_GLYPHS: dict[VerdictLevel, str] = {"success": "✓", "warning": "!", "error": "✖"}


def format_number(value: float | int | None, digits: int = 6) -> str:
    if value is None:
        return "-"
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return f"{value:.{digits}g}"


class ReportTable:
    """Per-row statistics of a report, extras as trailing columns."""

    def __init__(self, report: ExperimentReport, title: str | None = None):
        self.report = report
        self.title = title or report.experiment

    def __rich__(self) -> RenderableType:
        rows = self.report.rows
        extra_keys = sorted({k for row in rows for k in row.extras})
        show_label = any(row.label is not None for row in rows)

        table = RichTable(title=self.title, show_header=True, header_style="bold")
        table.add_column("n", justify="right")
        if show_label:
            table.add_column("label")
        for header in ("R", "mean", "variance", "stderr", "reference", "z"):
            table.add_column(header, justify="right")
        for key in extra_keys:
            table.add_column(key, justify="right")

        for row in rows:
            cells = [str(row.n)]
            if show_label:
                cells.append(row.label or "")
            cells += [
                str(row.replicates),
                format_number(row.mean),
                format_number(row.variance),
                format_number(row.stderr),
                format_number(row.reference),
                format_number(row.z, 3),
            ]
            cells += [format_number(row.extras.get(k)) for k in extra_keys]
            z_style = "red" if row.z is not None and not math.isfinite(row.z) else None
            table.add_row(*cells, style=z_style)
        return table


class InputsView:
    """Aligned key-value listing of the inputs needed to rerun."""

    def __init__(self, data: dict[str, Any], title: str | None = "inputs"):
        self.data = data
        self.title = title

    def __rich__(self) -> RenderableType:
        grid = RichTable.grid(padding=(0, 1))
        grid.add_column(style="bold cyan", justify="right")
        grid.add_column()
        for key, value in self.data.items():
            grid.add_row(f"{key}:", str(value))
        if self.title:
            return Group(Text(self.title, style="bold"), grid)
        return grid


class VerdictPanel:
    """Pass/fail panel listing every verdict."""

    def __init__(self, report: ExperimentReport):
        self.report = report

    @property
    def level(self) -> VerdictLevel:
        if not self.report.valid:
            return "error"
        return "success" if self.report.passed else "warning"

    def __rich__(self) -> RenderableType:
        level = self.level
        style = _LEVEL_STYLES[level]
        lines: list[RenderableType] = []
        headline = {
            "success": "all verdicts pass",
            "warning": "verdict failure",
            "error": "run aborted",
        }[level]
        lines.append(Text(f"{_GLYPHS[level]} {headline}", style=style))
        for name, ok in self.report.verdicts.items():
            mark = "pass" if ok else "FAIL"
            lines.append(Text(f"  {name}: {mark}", style="green" if ok else "red"))
        if self.report.error:
            lines.append(Text(self.report.error, style="dim"))
        if self.report.calibration:
            bands = ", ".join(f"{k}={v:g}" for k, v in self.report.calibration.items())
            lines.append(Text(f"calibration bands: {bands}", style="dim"))
        return Panel(
            Group(*lines),
            title=f"{self.report.experiment} (seed {self.report.seed})",
            title_align="left",
            border_style=style,
        )


def error_panel(error: BaseException) -> Panel:
    """Panel for an error that ended a CLI command."""
    return Panel(
        Text(f"{_GLYPHS['error']} {error}", style=_LEVEL_STYLES["error"]),
        title=type(error).__name__,
        title_align="left",
        border_style=_LEVEL_STYLES["error"],
    )


def render_report(report: ExperimentReport, console: Console) -> None:
    """Inputs, rows and verdicts, in that order."""
    inputs = {"distribution": report.distribution, "seed": report.seed, **report.inputs}
    if report.pattern:
        inputs["pattern"] = report.pattern
    console.print(InputsView(inputs))
    if report.constants:
        console.print(InputsView({k: format_number(v) for k, v in report.constants.items()}, "constants"))
    if report.rows:
        console.print(ReportTable(report))
    if report.skipped:
        console.print(Text(f"skipped n (span): {report.skipped}", style="dim"))
    console.print(VerdictPanel(report))
