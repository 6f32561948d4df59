from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .ingest import ParseReport


class CitePotentialError(RuntimeError):
    """Base error for citation-potential failures."""

    exit_code = 3


class InputError(CitePotentialError):
    """Raised when input files or options cannot be used."""

    exit_code = 2


class ConfigError(InputError):
    """Raised when a run configuration is invalid."""


class UnknownJournalError(InputError):
    """Raised when data references a journal missing from the registry."""


class MissingPublicationCountError(InputError):
    """Raised in strict mode when a registered journal lacks a target-year count."""


class WindowMismatchError(InputError):
    """Raised in strict mode when a ledger entry falls outside the window."""


class ParseError(InputError):
    """Raised when a CSV stream cannot be parsed."""

    def __init__(
        self, message: str, *, line: int = 0, report: ParseReport | None = None
    ) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
        self.reason = message
        self.report = report


class MalformedRowError(ParseError):
    """Raised for rows with the wrong arity or unparseable fields."""


class NegativeCountError(ParseError):
    """Raised for negative citation or publication counts."""


class NegativeValueError(ParseError):
    """Raised for negative indicator values."""


class DuplicateKeyError(ParseError):
    """Raised in strict mode when a key appears twice."""


class DuplicatePairError(ParseError):
    """Raised when a (journal, category) pair appears twice."""


class ComputationError(CitePotentialError):
    """Raised when a metric or statistic cannot be computed."""

    exit_code = 3


class ZeroDenominatorError(ComputationError):
    """Raised when a journal has no citable items in the target window."""


class EmptyDatabaseError(ComputationError):
    """Raised when the database has no citable items in the target window."""


class NonPositiveDatabasePotentialError(ComputationError):
    """Raised when the database citation potential is not positive."""


class StatsError(ComputationError):
    """Base error for statistics."""


class InsufficientDataError(StatsError):
    """Raised when fewer than three complete pairs are available."""


class ZeroVarianceError(StatsError):
    """Raised when a correlated variable is constant."""


class EmptySeriesError(StatsError):
    """Raised when a series has no present values."""


class InsufficientGroupsError(StatsError):
    """Raised when a decomposition has fewer than two groups or values."""


class EmptyGroupError(StatsError):
    """Raised when a group has no present values."""
