"""
Experiment reports and their on-disk forms.

A report is written as ``<out>.jsonl`` (one line per row, appended) plus
``<out>.json`` (the whole report, overwritten). ``write_csv`` projects the
rows for plotting.
"""

import csv
from datetime import UTC, datetime
import json
import math
from pathlib import Path
from typing import Any, TextIO

from pydantic import BaseModel, ConfigDict, Field


class ExperimentRow(BaseModel):
    """Summary statistics for one ``n`` (or one ``label`` at fixed ``n``)."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    n: int
    label: str | None = None
    replicates: int = 0
    mean: float
    variance: float = 0.0
    stderr: float = 0.0
    reference: float | None = None
    z: float | None = None
    extras: dict[str, float] = Field(default_factory=dict)


class ExperimentReport(BaseModel):
    """
    Everything needed to judge and to rerun an experiment.

    ``inputs`` holds the full argument set of the ``run_*`` call;
    together with ``seed`` it reproduces every row bit for bit.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    experiment: str
    distribution: str
    pattern: str | None = None
    n_values: list[int] = Field(default_factory=list)
    replicates: int = 0
    seed: int | None = None
    inputs: dict[str, Any] = Field(default_factory=dict)
    rows: list[ExperimentRow] = Field(default_factory=list)
    verdicts: dict[str, bool] = Field(default_factory=dict)
    calibration: dict[str, float] = Field(default_factory=dict)
    constants: dict[str, float] = Field(default_factory=dict)
    samples: list[float] | None = None
    skipped: list[int] = Field(default_factory=list)
    valid: bool = True
    error: str | None = None
    started_at: datetime = Field(default_factory=lambda: datetime.now(UTC))
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        """Valid and every verdict holds."""
        return self.valid and all(self.verdicts.values())

    def fail(self, error: Exception) -> None:
        """Mark the report invalid, keeping the rows computed so far."""
        self.valid = False
        self.error = f"{type(error).__name__}: {error}"


def z_score(mean: float, reference: float | None, stderr: float) -> float | None:
    """``(mean - reference) / stderr``; 0 or inf when the statistic was deterministic."""
    if reference is None or math.isinf(reference):
        return None
    if stderr > 0:
        return (mean - reference) / stderr
    return 0.0 if mean == reference else math.inf


def summarize(values: list[float]) -> tuple[float, float, float]:
    """Mean, unbiased variance and standard error, summed in the given order."""
    count = len(values)
    if count < 2:
        raise ValueError("need at least two replicates")
    mean = math.fsum(values) / count
    var = math.fsum((x - mean) ** 2 for x in values) / (count - 1)
    return mean, var, math.sqrt(var / count)


def append_jsonl(report: ExperimentReport, path: Path) -> None:
    """Append one JSON line per row, tagged with the experiment name and seed."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        for row in report.rows:
            record = {
                "experiment": report.experiment,
                "distribution": report.distribution,
                "pattern": report.pattern,
                "seed": report.seed,
                **row.model_dump(mode="json"),
            }
            fh.write(json.dumps(record, default=str) + "\n")


def write_summary(report: ExperimentReport, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")


def write_report(report: ExperimentReport, out: Path) -> tuple[Path, Path]:
    """Write ``<out>.jsonl`` and ``<out>.json``; returns both paths."""
    rows_path = out.with_suffix(".jsonl")
    summary_path = out.with_suffix(".json")
    append_jsonl(report, rows_path)
    write_summary(report, summary_path)
    return rows_path, summary_path


def write_csv(report: ExperimentReport, stream: TextIO) -> None:
    """Rows as CSV, extras flattened into their own columns."""
    extra_keys = sorted({k for row in report.rows for k in row.extras})
    fields = ["n", "label", "replicates", "mean", "variance", "stderr", "reference", "z"]
    writer = csv.DictWriter(stream, fieldnames=fields + extra_keys, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        record: dict[str, Any] = row.model_dump(exclude={"extras"})
        record.update(row.extras)
        writer.writerow(record)
