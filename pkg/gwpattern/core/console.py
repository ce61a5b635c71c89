from typing import Any

from rich.console import Console as RichConsole


class Console(RichConsole):
    """Rich Console with gwpattern defaults (no auto-highlighting of numbers)."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        """Initialize console with gwpattern defaults."""
        kwargs.setdefault("highlight", False)
        super().__init__(*args, **kwargs)


_console: Console | None = None
_err_console: Console | None = None


def get_console(**kwargs: Any) -> Console:
    """
    Get the singleton stdout console.

    Machine-readable output (JSON, CSV, parenthesis strings) goes here.
    Creates the console on first call with the provided kwargs; later calls
    return the same instance (kwargs ignored).
    """
    global _console
    if _console is None:
        _console = Console(**kwargs)
    return _console


def get_err_console(**kwargs: Any) -> Console:
    """Get the singleton stderr console used for logs, tables and progress."""
    global _err_console
    if _err_console is None:
        kwargs.setdefault("stderr", True)
        _err_console = Console(**kwargs)
    return _err_console


def reset_console() -> None:
    """Reset both console singletons (mainly for testing)."""
    global _console, _err_console
    _console = None
    _err_console = None
