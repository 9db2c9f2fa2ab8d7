"""Exception hierarchy shared by every module."""


class ConveyorError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ConveyorError, ValueError):
    """Input violates a documented precondition."""


class CapacityError(ConveyorError):
    """Requested system is larger than the configured qubit cap."""


class NumericalDerivativeError(ConveyorError):
    """A (finite-difference) derivative came out non-Hermitian."""


class SingularityError(ConveyorError, ArithmeticError):
    pass


class DivergenceError(ConveyorError, ArithmeticError):
    pass


class UnsupportedCaseError(ConveyorError):
    pass


class CertificationError(ConveyorError):
    """Channel failed complete-positivity / trace-preservation checks."""


class InconclusiveFitError(ConveyorError):
    pass
