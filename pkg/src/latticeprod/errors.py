"""Exception hierarchy shared by all modules."""


class LatticeProdError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3


class DegenerateDistribution(LatticeProdError, ValueError):
    pass


class NotLattice(LatticeProdError, ValueError):
    pass


class OutOfRange(LatticeProdError, ValueError):
    pass


class OffLattice(LatticeProdError, ValueError):
    pass


class TauOnLattice(LatticeProdError, ValueError):
    pass


class CapExceeded(LatticeProdError, RuntimeError):
    exit_code = 4


class QuadratureNotConverged(LatticeProdError, RuntimeError):
    """Raised when a numerical inversion cannot reach the requested accuracy.

    The achieved error estimate is kept on the instance.
    """

    def __init__(self, message, error_estimate):
        super().__init__(message)
        self.error_estimate = error_estimate


class ConfigInvalid(LatticeProdError, ValueError):
    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
