"""Exception types raised across the package."""


class QdqError(Exception):
    """Base class for all package errors."""


class CapacityError(QdqError):
    """A requested dimension or tensor size exceeds the configured budget."""


class UnsupportedConfigurationError(QdqError):
    pass


class NumericalFailureError(QdqError):
    pass


class UndefinedMemoryError(QdqError):
    pass


class TraceDriftError(QdqError):
    """Propagation lost trace beyond tolerance at ``step``."""

    def __init__(self, step: int, drift: float):
        super().__init__(f"trace drift {drift:.3e} exceeds tolerance at step {step}")
        self.step = step
        self.drift = drift


class InsufficientDataError(QdqError):
    pass


class ConfigError(QdqError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
