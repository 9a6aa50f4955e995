"""
Service layer modules.

Run orchestration and report output, kept apart from the CLI so they can be
driven from tests or other front ends.
"""

from .check_runner import CheckRunner, RunReport, run
from .report_writer import emit, emit_family, load_report

__all__ = ["CheckRunner", "RunReport", "run", "emit", "emit_family", "load_report"]
