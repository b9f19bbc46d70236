"""Exception hierarchy shared across the package."""


class MotifError(Exception):
    """Base class for every error raised by learnmotifs."""


class ConfigError(MotifError, ValueError):
    """Contradictory or out-of-range configuration."""


class DataError(MotifError, ValueError):
    """Input data cannot be used as given."""


class ParseError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptySeries(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class TooFewSegments(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class InvalidThreshold(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class InfeasiblePacking(DataError):
    pass


class MissingMethod(DataError):
    pass


class ReportWriteError(MotifError, OSError):
    """A report could not be written; any existing file is left untouched."""
