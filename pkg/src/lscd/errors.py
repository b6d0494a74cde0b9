"""Exception types shared across the package."""


class LscdError(Exception):
    """Base class for all errors raised by this package."""


class CorpusParseError(LscdError):
    """Malformed corpus input; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(LscdError):
    """Invalid configuration value or combination."""


class EmbeddingFormatError(LscdError):
    """Malformed embedding file."""


class AlignmentError(LscdError):
    """Alignment setup failed (empty dictionary, dimension mismatch, ...)."""


class NumericalError(LscdError):
    """A numeric routine produced or would produce garbage (singular, non-finite)."""


class ScoringError(LscdError):
    """Cosine scoring is undefined (zero vector, dimension mismatch)."""


class ThresholdError(LscdError):
    """A threshold rule cannot be applied to the given scores."""


class PlanError(LscdError):
    """A synthetic-change injection plan does not fit the corpus."""


class EvaluationError(LscdError):
    """Predictions cannot be scored against the gold labels."""
