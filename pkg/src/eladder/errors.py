"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration and validation problems
exit with 2, numerical failures with 3, I/O failures with 4.
"""


class LadderError(Exception):
    """Base class for all package errors."""


class ConfigError(LadderError):
    """Malformed or inconsistent configuration input."""


class ValidationError(LadderError):
    """Inputs violate a documented precondition."""


class TruncationError(LadderError):
    """The sideband window is too small for the requested state."""


class ResourceLimitError(LadderError):
    """A hard size cap (lattice size, oracle dimension) was exceeded."""


class IntegrationError(LadderError):
    """Time integration failed to meet its accuracy or norm budget."""


class InsufficientSpanError(LadderError):
    """The simulated time span is too short for the requested observable."""


class SweepError(LadderError):
    """Every grid point of a parameter sweep failed."""


class ExportError(LadderError):
    """File export or import failed; message carries the path."""
