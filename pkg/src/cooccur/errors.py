"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CooccurError(Exception):
    """Base class for all package errors."""


class InvalidInstanceError(CooccurError, ValueError):
    pass


class BothTimestampsMissing(InvalidInstanceError):
    pass


class StartAfterEnd(InvalidInstanceError):
    pass


class DuplicateInstanceId(CooccurError, ValueError):
    pass


class PatternError(CooccurError, ValueError):
    """A pattern failed to parse or validate.

    ``line`` and ``column`` are 1-based; ``line`` is ``None`` when the text did
    not come from a file.
    """

    def __init__(self, message: str, column: int | None = None, line: int | None = None):
        self.message = message
        self.column = column
        self.line = line
        super().__init__(self._render())

    def _render(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        if where:
            return f"{', '.join(where)}: {self.message}"
        return self.message

    def at_line(self, line: int) -> "PatternError":
        err = type(self)(self.message, self.column, line)
        return err


class PatternSyntaxError(PatternError):
    pass


class WindowError(PatternError):
    pass


class OutOfRange(CooccurError, IndexError):
    pass


class CapExceeded(CooccurError, RuntimeError):
    pass


class UnsupportedFormat(CooccurError, ValueError):
    pass


class EmptyAlphabet(CooccurError, ValueError):
    pass


class EmbeddedLabelNotInAlphabet(CooccurError, ValueError):
    pass


class ConfigMismatch(CooccurError, ValueError):
    pass


class StreamFormatError(CooccurError, ValueError):
    """An event-stream file could not be parsed."""
