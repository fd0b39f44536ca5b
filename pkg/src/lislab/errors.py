"""Exception types raised across the package."""


class LislabError(Exception):
    """Base class for all package errors."""


class OutOfSupport(LislabError, IndexError):
    pass


class NoInterpolation(LislabError):
    pass


class DomainError(LislabError, ValueError):
    pass


class NoBracket(LislabError, RuntimeError):
    pass


class TooLarge(LislabError, ValueError):
    pass


class DuplicateAbscissa(LislabError, ValueError):
    pass


class InvalidDescriptor(LislabError, ValueError):
    pass
