"""Exception types shared across the toolkit."""


class TdcsError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(TdcsError):
    """Operands have incompatible lengths or shapes."""


class ParameterError(TdcsError):
    """An argument is outside its documented domain."""


class CapacityError(TdcsError):
    """A requested load exceeds the multiuser capacity of the configuration.

    Carries ``u_max``, the largest feasible number of users, when known.
    """

    def __init__(self, message, u_max=None):
        super().__init__(message)
        self.u_max = u_max


class SequenceValidationError(TdcsError):
    """A sequence fails a property required by the operation (e.g. perfect ACF)."""


class ScenarioError(TdcsError):
    """A scenario configuration is malformed or inconsistent."""
