"""CSV/JSON artifacts and the validation diagnostics report."""

from resilgrid.core.reports.report_generator import (
    GateDiagnostics,
    ValidationReport,
    failing_step,
    gate_diagnostics,
)
from resilgrid.core.reports.writers import SCHEMA_VERSION, format_cell, write_csv, write_json

__all__ = [
    "GateDiagnostics",
    "SCHEMA_VERSION",
    "ValidationReport",
    "failing_step",
    "format_cell",
    "gate_diagnostics",
    "write_csv",
    "write_json",
]
