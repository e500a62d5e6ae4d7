"""Exception hierarchy shared by every module."""


class XisbError(Exception):
    """Base class for all errors raised by xisb."""


class DomainError(XisbError, ValueError):
    """Argument outside the domain of the function."""


class PoleError(DomainError):
    """Argument sits on a pole."""


class ConvergenceError(XisbError, ArithmeticError):
    """A series, quadrature or contour failed to reach its tolerance."""


class TruncationError(ConvergenceError):
    """A finite table (e.g. divisor counts) is too short for the requested accuracy."""


class ResourceError(XisbError):
    """A computation would exceed the configured budget."""
