"""Exception hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` (the class name)
that the CLI prints on stderr and the HTTP API returns in error bodies.
Parse errors additionally carry the 1-based input line that caused them.
"""

from __future__ import annotations


class FinevalError(Exception):
    """Base class for all errors raised by this package."""

    http_status = 400

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.code = cls.__name__

    @property
    def message(self) -> str:
        return str(self)


FinevalError.code = "FinevalError"


class ParseError(FinevalError):
    """A positioned error in an input file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedTag(ParseError):
    pass


class BadColumnCount(ParseError):
    pass


class BadConfidence(ParseError):
    pass


class BadScore(ParseError):
    pass


class EmptyFile(ParseError):
    pass


class ColumnOutOfRange(ParseError):
    pass


class DuplicateSourceId(ParseError):
    pass


class UnknownAttribute(FinevalError):
    pass


class MissingTrainStats(FinevalError):
    pass


class TaskMismatch(FinevalError):
    pass


class SampleCountMismatch(FinevalError):
    pass


class DatasetMismatch(FinevalError):
    pass


class UnsupportedTask(FinevalError):
    pass


class NoData(FinevalError):
    pass


class CalibrationUnsupportedTask(FinevalError):
    pass


class MissingConfidences(FinevalError):
    pass


class CombinationUnsupportedTask(FinevalError):
    pass


class NeedTwoSystems(FinevalError):
    pass


class NeedTwoOrMoreSystems(FinevalError):
    pass


class UnknownBucket(FinevalError):
    pass


class ValidationFailed(FinevalError):
    pass


class UnknownDataset(FinevalError):
    http_status = 404


class UnknownSystem(FinevalError):
    http_status = 404
