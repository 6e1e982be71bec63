"""Exception types shared by the physics and experiment layers."""


class FolmError(Exception):
    """Base class for all simulator errors."""


class ParameterError(FolmError, ValueError):
    """A physical parameter, orientation or coupler violates its invariants."""


class TruncationError(FolmError):
    """A coherent amplitude is too large for the requested Fock dimension."""

    def __init__(self, message: str, required_dim: int):
        super().__init__(message)
        self.required_dim = required_dim


class ConfigError(FolmError, ValueError):
    """An experiment configuration file could not be loaded or validated."""

    def __init__(self, message: str, field_path: str = ""):
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
        self.field_path = field_path


class NumericalGuardError(FolmError):
    """A run-time numerical check failed for one sweep point."""

    def __init__(self, message: str, index=None):
        if index is not None:
            message = f"sweep point {index}: {message}"
        super().__init__(message)
        self.index = index
