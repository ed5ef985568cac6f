"""Exception hierarchy for qparallel.

Every error carries the process exit code the CLI should use when it escapes.
"""

from typing import Any, List, Optional, Sequence, Tuple


class QParallelError(Exception):
    """Base class for all qparallel failures."""

    exit_code = 1


class ConfigError(QParallelError):
    """Bad metric table, YAML config or entry argument."""

    exit_code = 2


class QplSyntaxError(QParallelError):
    """Source text does not match the grammar."""

    exit_code = 3

    def __init__(self, message: str, line: int, column: int, expected: Sequence[str] = ()):
        self.line = line
        self.column = column
        self.expected = sorted(set(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


class ResolutionError(QParallelError):
    """Unknown identifier or callee."""

    exit_code = 3

    def __init__(self, message: str, location: Optional[Tuple[int, int]] = None):
        self.location = location
        prefix = f"{location[0]}:{location[1]}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ArityError(ResolutionError):
    """Wrong number or kind of arguments to an intrinsic or operation."""


class TraceError(QParallelError):
    """Lowering failed while interpreting a program."""

    exit_code = 4

    def __init__(self, message: str, location: Optional[Tuple[int, int]] = None):
        self.location = location
        prefix = f"{location[0]}:{location[1]}: " if location else ""
        super().__init__(f"{prefix}{message}")


class NotAdjointableError(TraceError):
    """A block that must be inverted contains a measurement."""

    def __init__(
        self, message: str = "not adjointable", location: Optional[Tuple[int, int]] = None
    ):
        super().__init__(message, location)


class ValidationError(TraceError):
    """A trace broke a structural invariant."""

    def __init__(self, diagnostics: List[Any]):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics[:5])
        more = f" (+{len(self.diagnostics) - 5} more)" if len(self.diagnostics) > 5 else ""
        super().__init__(f"invalid trace: {lines}{more}")


class QubitManagerError(QParallelError):
    """Misuse of the qubit manager: double release, bad nesting, unknown fanout."""

    exit_code = 4


class SimulationError(QParallelError):
    """Dirty slot at Alloc/Release or a trace over the slot budget."""

    exit_code = 5
