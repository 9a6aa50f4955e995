"""
Observability package: structured logging, metrics, and error tracking.

Provides:
- ``setup_structured_logger`` / ``get_logger``: JSON-formatted logging
- ``MetricsCollector``: in-process counters, gauges and latency histograms
- ``ErrorTracker``: capture of unexpected exceptions raised inside checks
"""

from .errors import ErrorTracker
from .logging import (
    clear_log_context,
    get_log_context,
    get_logger,
    set_log_context,
    setup_structured_logger,
)
from .metrics import MetricsCollector

__all__ = [
    "setup_structured_logger",
    "get_logger",
    "set_log_context",
    "clear_log_context",
    "get_log_context",
    "MetricsCollector",
    "ErrorTracker",
]
