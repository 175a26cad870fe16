class DataError(ValueError):
    """Malformed or inconsistent input data (CLI exit status 3)."""


class CapabilityError(RuntimeError):
    """Request exceeds a configured capacity such as a qubit cap (CLI exit status 4)."""
