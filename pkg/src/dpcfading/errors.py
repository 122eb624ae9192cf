"""Exception types raised across the package."""


class DpcError(Exception):
    """Base class for errors raised by dpcfading."""


class DomainError(DpcError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedOperationError(DpcError, TypeError):
    """The operation is not defined for this model or configuration."""


class DivergenceError(DpcError, ArithmeticError):
    """A numerical expectation failed to converge."""


class RegionSizeError(DpcError, ValueError):
    """A region sweep would evaluate too many grid points."""


class ModelFileError(DpcError, ValueError):
    """A sample file for an empirical model could not be parsed."""

    def __init__(self, path, lineno, text):
        self.path = path
        self.lineno = lineno
        self.text = text
        super().__init__(f"{path}:{lineno}: cannot parse {text!r} as a nonnegative real")
