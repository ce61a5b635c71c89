from typing import Any

from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress as RichProgress,
    SpinnerColumn,
    TaskID,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

from ..core.console import get_err_console


class ReplicateProgress:
    """Transient replicate counter on stderr; silent when stderr is not a terminal."""

    def __init__(
        self,
        description: str,
        total: int,
        console: Any | None = None,
        *,
        enabled: bool | None = None,
    ):
        self.console = console or get_err_console()
        self.description = description
        self.total = total
        self.enabled = self.console.is_terminal if enabled is None else enabled
        self._progress: RichProgress | None = None
        self._task: TaskID | None = None

    def _build_progress(self) -> RichProgress:
        return RichProgress(
            SpinnerColumn(style="cyan"),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(complete_style="green", finished_style="green"),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            TimeRemainingColumn(),
            console=self.console,
            transient=True,
        )

    def __enter__(self) -> "ReplicateProgress":
        if self.enabled:
            self._progress = self._build_progress()
            self._progress.start()
            self._task = self._progress.add_task(self.description, total=self.total)
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        if self._progress is not None:
            self._progress.stop()
            self._progress = None
            self._task = None

    @property
    def completed(self) -> float:
        if self._progress is None or self._task is None:
            return 0.0
        return self._progress.tasks[0].completed

    def advance(self, count: int = 1) -> None:
        if self._progress is not None and self._task is not None:
            self._progress.update(self._task, advance=count)
