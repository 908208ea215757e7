from .errors import CSV_HEADER, ErrorRecord, compute_errors, error_rows
from .event import EventObserver
from .experiment import (
    AlgorithmResult,
    ExperimentSummary,
    build_stream,
    run_experiment,
    run_experiment_sync,
)
from .output import emit_outputs, format_summary

__all__ = (
    "CSV_HEADER",
    "ErrorRecord",
    "compute_errors",
    "error_rows",
    "EventObserver",
    "AlgorithmResult",
    "ExperimentSummary",
    "build_stream",
    "run_experiment",
    "run_experiment_sync",
    "emit_outputs",
    "format_summary",
)
