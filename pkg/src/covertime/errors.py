"""Exception types shared across the package."""


class CovertimeError(Exception):
    """Base class for all errors raised by this package."""


class EdgeListParseError(CovertimeError, ValueError):
    """Malformed edge-list input; carries the offending line number."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class VertexRangeError(CovertimeError, ValueError):
    """A vertex id is outside the graph or component it was used with."""


class ContractViolation(CovertimeError, ValueError):
    """An operation was called outside its documented domain."""


class DegenerateModelError(CovertimeError, RuntimeError):
    """A random-graph model cannot produce a sample in this parameter regime."""


class StepLimitExceeded(CovertimeError, RuntimeError):
    """A simulated walk ran past its safety step cap (indicates a bug)."""
