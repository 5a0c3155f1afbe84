"""Exception types raised across the package.

Every failure mode surfaced by the library is an ``AqicastError`` subclass so
callers (and the CLI) can catch one base type and still discriminate on the
specific condition.
"""


class AqicastError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(AqicastError):
    """CSV input does not carry the required header or cannot be decoded."""


class DuplicateKeyError(AqicastError):
    """Two input rows share the same (city, timestamp) pair."""


class UnimputableColumnError(AqicastError):
    """A column has no observed values, so the imputation policy cannot run."""


class NumericInputError(AqicastError):
    """Numeric input contains NaN/inf or otherwise out-of-domain values."""


class ShapeMismatchError(AqicastError):
    """Array arguments disagree on their shared dimensions."""


class InsufficientDataError(AqicastError):
    """Fewer samples than the operation can meaningfully process."""


class ColumnTooShortError(AqicastError):
    """A series is too short to be decomposed."""


class LevelDepthError(AqicastError):
    """Requested decomposition depth exceeds what the signal length allows."""


class PyramidShapeError(AqicastError):
    """Coefficient pyramid level lengths are mutually inconsistent."""


class SigmaEstimationError(AqicastError):
    """Noise scale cannot be estimated and none was supplied."""


class MissingPollutantError(AqicastError):
    """A pollutant required by the AQI formula is absent from the reading."""


class DegenerateLabelsError(AqicastError):
    """Training labels contain fewer than two distinct classes."""


class EmptyInputError(AqicastError):
    """An operation that needs at least one element received none."""


class StageError(AqicastError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
