"""Core components for qparallel: trace IR, qubit manager and scheduler."""

from .ir import (
    Diagnostic,
    Gate,
    Instruction,
    Op,
    QubitId,
    Trace,
    count_gates,
    dump_trace,
    gate,
    invert_gates,
    strip_markers,
    t_like,
    validate_trace,
)
from .qubit_manager import FanoutRecord, QubitManager
from .scheduler import (
    FULL_DEPTH,
    T_DEPTH,
    MetricTable,
    PathEntry,
    ResourceReport,
    Schedule,
    critical_path,
    format_report,
    full_depth_metric,
    preset,
    resource_report,
    schedule,
    t_depth_metric,
)

__all__ = [
    "Diagnostic",
    "Gate",
    "Instruction",
    "Op",
    "QubitId",
    "Trace",
    "count_gates",
    "dump_trace",
    "gate",
    "invert_gates",
    "strip_markers",
    "t_like",
    "validate_trace",
    "FanoutRecord",
    "QubitManager",
    "FULL_DEPTH",
    "T_DEPTH",
    "MetricTable",
    "PathEntry",
    "ResourceReport",
    "Schedule",
    "critical_path",
    "format_report",
    "full_depth_metric",
    "preset",
    "resource_report",
    "schedule",
    "t_depth_metric",
]
