"""Exception hierarchy shared by all coreftools modules.

Every error raised on bad input data derives from ``CorefToolsError`` so the command line
can map it to the data-error exit status.
"""

from typing import Optional


class CorefToolsError(Exception):
    """Base class of all errors raised on invalid input data or configuration."""


class AddressingError(CorefToolsError):
    """A mention refers to an unknown sentence or lies outside its sentence."""


class ParseError(CorefToolsError):
    """An input file could not be parsed.

    :param message: What went wrong.
    :param line: The 1-based line number of the offending input, if known.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ConfigurationError(CorefToolsError):
    """Required annotations or resources are missing or malformed."""


class MetricError(CorefToolsError):
    """Scores of different metrics were combined."""


class AgreementError(CorefToolsError):
    """Agreement cannot be computed for the given annotations."""


class AdjudicationError(CorefToolsError):
    """Adjudication constraints are contradictory or an oracle limit was exceeded."""


class TrainingError(CorefToolsError):
    """The training data cannot produce a model."""


class UsageError(Exception):
    """The command line was invoked incorrectly."""


class InvalidDocumentError(CorefToolsError):
    """A document violates its structural invariants."""


class InvalidAnnotationError(CorefToolsError):
    """An annotation set is not a partition of the declared mentions."""
