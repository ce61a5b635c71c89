from .progress import ReplicateProgress
from .report_view import InputsView, ReportTable, VerdictPanel, error_panel, render_report

__all__ = ["InputsView", "ReplicateProgress", "ReportTable", "VerdictPanel", "error_panel", "render_report"]
