"""Exception hierarchy shared across the package.

CLI exit codes: ConfigError -> 2, FormatError/OSError -> 3,
NumericalError -> 4.
"""


class SplatStreamError(Exception):
    """Base class for all package errors."""


class ConfigError(SplatStreamError):
    """Bad or unknown configuration key/value."""


class FormatError(SplatStreamError):
    """Malformed binary or text file."""


class NumericalError(SplatStreamError):
    """A solver could not produce a valid result."""


class InsufficientDataError(NumericalError):
    """Fewer samples than the solver's minimum."""


class DegenerateGeometryError(NumericalError):
    """Input geometry does not constrain the solution (e.g. collinear points)."""


class NoConsensusError(NumericalError):
    """RANSAC found no model meeting the inlier minimum."""


class DivergenceError(NumericalError):
    """Training loss diverged; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
