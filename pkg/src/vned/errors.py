"""Exception hierarchy shared by all pipeline modules.

The CLI maps these onto exit codes: ConfigError -> 1, DataError (and
subclasses) -> 2, anything else -> 3.
"""


class DiscoveryError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DiscoveryError):
    """Invalid configuration value (bad policy parameter, bad flag, ...)."""


class DataError(DiscoveryError):
    """Problem with input data files or their contents."""


class ParseError(DataError):
    """A line in an interchange file is not well-formed JSON or misses keys."""

    def __init__(self, path: str, line_number: int, message: str):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class SchemaError(DataError):
    """A record violates a type invariant (dimensionality, box geometry, ...)."""


class EmptyDatasetError(DataError):
    """The detections file contains no records."""


class EvaluationError(DataError):
    """Predictions and ground truth do not overlap or cannot be compared."""


class GenerationError(DataError):
    """Synthetic data generation failed (e.g. infeasible prototype layout)."""
