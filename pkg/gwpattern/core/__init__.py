from .console import Console, get_console, get_err_console
from .settings import Settings, get_settings, set_settings

__all__ = ["Console", "Settings", "get_console", "get_err_console", "get_settings", "set_settings"]
