"""Exception types shared across the package."""


class LebesgueError(Exception):
    """Base class for all package errors."""


class InvalidDegree(LebesgueError, ValueError):
    pass


class NotUnisolvent(LebesgueError, ValueError):
    pass


class DomainViolation(LebesgueError, ValueError):
    pass


class OutOfDomain(LebesgueError, ValueError):
    """A scalar argument lies outside the domain of a closed-form function."""


class InvalidInput(LebesgueError, ValueError):
    pass


class DegenerateCase(LebesgueError):
    """The requested object is not discrete (e.g. the max-set for degree 0)."""


class ConvergenceFailure(LebesgueError, RuntimeError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class NeedsMorePrecision(LebesgueError, ArithmeticError):
    """A sign decision fell inside the precision margin."""

    def __init__(self, message, value=None, scale=None, bits=None):
        super().__init__(message)
        self.value = value
        self.scale = scale
        self.bits = bits


class Undecided(LebesgueError):
    """A sign decision could not be made below the precision cap."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}


class InternalError(LebesgueError, RuntimeError):
    pass


class NotFound(LebesgueError):
    """A search exhausted its range without success."""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit
