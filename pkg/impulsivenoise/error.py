# Exceptions raised by the package.
# Each class carries the exit code the command line returns for it.
#
__all__ = [
    "ImpulsiveNoiseError",
    "InvalidArgument",
    "ConfigError",
    "IngestionError",
    "InsufficientData",
    "ModelMismatch",
    "DegenerateVariance",
    "NumericalFailure",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "EXIT_NUMERICAL",
    "EXIT_IO",
]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ImpulsiveNoiseError(Exception):
    """Root of all errors raised on purpose by impulsivenoise."""

    exit_code = EXIT_VALIDATION


class InvalidArgument(ImpulsiveNoiseError, ValueError):
    """An argument is outside of its domain (non finite, negative rate, grid mismatch...)"""


class ConfigError(ImpulsiveNoiseError):
    """A configuration file cannot be used.

    Message names the file, line and dotted field path when known.
    """

    def __init__(self, message: str, filename: str | None = None, line: int | None = None, field: str | None = None):
        self.filename = filename
        self.line = line
        self.field = field
        where = ""
        if filename is not None:
            where = filename if line is None else f"{filename}:{line}"
            where = where + ": "
        if field is not None:
            where = where + f"field '{field}': "
        super().__init__(where + message)


class IngestionError(ImpulsiveNoiseError):
    """A trace file has a malformed, empty or non finite row."""

    def __init__(self, message: str, filename: str | None = None, row: int | None = None):
        self.filename = filename
        self.row = row
        prefix = "" if filename is None else f"{filename}: "
        if row is not None:
            prefix = prefix + f"row {row}: "
        super().__init__(prefix + message)


class InsufficientData(ImpulsiveNoiseError, ValueError):
    """Too few samples for the requested estimate."""


class ModelMismatch(ImpulsiveNoiseError, ValueError):
    """Samples are incompatible with the model being fitted."""

    exit_code = EXIT_NUMERICAL


class DegenerateVariance(ImpulsiveNoiseError, ArithmeticError):
    """A quantity requires a strictly positive variance and got zero or less."""

    exit_code = EXIT_NUMERICAL


class NumericalFailure(ImpulsiveNoiseError, ArithmeticError):
    """A numerical procedure did not converge or produced an unusable result."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics if diagnostics is not None else {}
        if len(self.diagnostics) > 0:
            message = message + " (" + ", ".join(f"{k}={v}" for k, v in self.diagnostics.items()) + ")"
        super().__init__(message)
