"""QParallel - explicit parallelism for a small quantum programming language."""

from loguru import logger as _logger

from .core import (
    FULL_DEPTH,
    T_DEPTH,
    Gate,
    MetricTable,
    QubitManager,
    Trace,
    critical_path,
    format_report,
    preset,
    resource_report,
    schedule,
    validate_trace,
)
from .errors import QParallelError
from .flamegraph import to_speedscope
from .lowering import trace_program
from .parser import parse
from .simulator import equivalent, run
from .stdlib import CircuitSpec, corpus_programs, trace_circuit
from .syntax import pretty_print

__version__ = "0.1.0"

__all__ = [
    "FULL_DEPTH",
    "T_DEPTH",
    "CircuitSpec",
    "Gate",
    "MetricTable",
    "QParallelError",
    "QubitManager",
    "Trace",
    "corpus_programs",
    "critical_path",
    "equivalent",
    "estimate",
    "format_report",
    "parse",
    "pretty_print",
    "preset",
    "resource_report",
    "run",
    "schedule",
    "to_speedscope",
    "trace_circuit",
    "trace_program",
    "validate_trace",
]

# Library code stays quiet until the CLI (or the caller) enables it.
_logger.disable("qparallel")


def estimate(source: str, entry: str = "Main", metric: str = T_DEPTH, **args: float) -> int:
    """Depth of ``entry`` in ``source`` under a metric preset."""
    trace = trace_program(parse(source), entry, args)
    return schedule(trace, preset(metric)).depth
