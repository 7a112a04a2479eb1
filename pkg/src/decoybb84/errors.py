"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operand shapes are incompatible (vector length vs matrix columns, ...)."""


class CapacityError(RuntimeError):
    """An exhaustive enumeration would exceed its configured size guard."""


class InfeasibleObservation(ValueError):
    """Observed rates admit no channel within the model's parameter ranges."""


class SessionAborted(RuntimeError):
    """A protocol session ended in an abort branch where data was requested."""


class BoundViolation(AssertionError):
    """An empirical quantity exceeded the analytic bound it must respect."""
