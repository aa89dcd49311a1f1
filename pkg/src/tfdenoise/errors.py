"""Exception types raised across the package."""


class TFDenoiseError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(TFDenoiseError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateRangeError(InvalidArgumentError):
    """A constant-valued matrix cannot be mapped onto an image range."""


class WavFormatError(TFDenoiseError):
    """The WAV header is malformed or truncated."""


class UnsupportedEncodingError(WavFormatError):
    """The WAV file is valid but not 16-bit PCM."""


class SolverError(TFDenoiseError, RuntimeError):
    """An iterative linear solve failed to converge."""
