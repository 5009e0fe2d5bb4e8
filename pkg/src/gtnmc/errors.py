"""Exception hierarchy shared by every layer of the engine."""

from __future__ import annotations


class ModelError(Exception):
    """Base class for problems with a model or its execution."""


class ParseError(ModelError):
    def __init__(self, message: str, line: int, col: int, expected=(), filename: str = "<model>"):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        self.filename = filename
        super().__init__(self.format())

    def format(self) -> str:
        text = f"{self.filename}:{self.line}:{self.col}: {self.message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(self.expected) + ")"
        return text


class EvalFault(ModelError):
    """Division by zero, out-of-bounds index or similar during evaluation."""


class RangeFault(ModelError):
    """A write left the declared range of a variable."""


class RecursionFault(ModelError):
    """Call unfolding exceeded the configured depth without an event."""

    def __init__(self, message: str, stack=()):
        self.stack = tuple(stack)
        super().__init__(message)


class StateSpaceFault(ModelError):
    """An evaluation fault hit during exploration, with the path that led to it."""

    def __init__(self, cause: Exception, path):
        self.cause = cause
        self.path = list(path)
        labels = " -> ".join(self.path) if self.path else "<initial>"
        super().__init__(f"{cause} (after {labels})")


class StateLimitExceeded(ModelError):
    def __init__(self, limit: int, what: str = "states"):
        self.limit = limit
        super().__init__(f"{what} limit of {limit} exceeded")


class NotUnsatisfiable(ModelError):
    """find_muc was given a goal set whose conjunction is reachable."""


class WiringError(ModelError):
    def __init__(self, findings):
        self.findings = list(findings)
        super().__init__("; ".join(self.findings))


class EnergyExhausted(ModelError):
    def __init__(self, needed: int, available: int):
        self.needed = needed
        self.available = available
        super().__init__(f"leg needs {needed} energy, {available} left")


class MissionFailed(ModelError):
    def __init__(self, message: str, log=None):
        self.log = log
        super().__init__(message)
