"""Error types raised by the services; routes map them to exit codes."""


class PolarmaxError(Exception):
    """Base class for polarmax failures."""


class ValidationError(PolarmaxError, ValueError):
    """Bad input: dimension mismatch, parameter out of range, malformed descriptor."""


class SolverFailure(PolarmaxError, RuntimeError):
    """Every restart produced a non-finite objective."""
