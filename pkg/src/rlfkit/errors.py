"""Exception types shared across the toolkit."""


class RlfkitError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(RlfkitError):
    """Raised when a corpus file is unusable as a whole (not merely a bad line)."""


class InputDomainError(RlfkitError, ValueError):
    """Raised when an argument falls outside the documented domain of an operation."""


class ConfigurationError(RlfkitError):
    """Raised when a policy or option carries an illegal value."""


class AlignmentError(RlfkitError):
    """Raised when a detected span cannot be located in a token sequence."""

    def __init__(self, message: str, tokens=None, surface=None):
        super().__init__(message)
        self.tokens = tokens
        self.surface = surface


class WisParseError(RlfkitError):
    """Raised when a word-importance response is too damaged to align."""


class OracleError(RlfkitError):
    """Raised when a loss oracle fails; carries the token index being occluded."""

    def __init__(self, message: str, token_index: int | None = None):
        super().__init__(message)
        self.token_index = token_index


class UndefinedMetricError(RlfkitError):
    """Raised when a metric has no defined value for the given input."""
