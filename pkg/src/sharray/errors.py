"""Exception types shared by every module."""


class SHAError(Exception):
    """Base class for all errors raised by sharray."""


class InvalidParameter(SHAError, ValueError):
    """A constructor or operation argument violates its precondition."""


class InvalidControl(InvalidParameter):
    """A channel control is set that the architecture cannot realize."""


class SteeringInfeasible(SHAError):
    """The requested beam targets cannot be met with the available controls."""

    def __init__(self, message, rank=None, residual=None):
        super().__init__(message)
        self.rank = rank
        self.residual = residual
