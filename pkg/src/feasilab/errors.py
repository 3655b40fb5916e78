"""Exception types shared across the package."""


class FeasilabError(Exception):
    """Base class for all package errors."""


class InputError(FeasilabError):
    """Malformed input: dimension mismatch, invalid parameters, bad config."""


class ValidationError(InputError):
    """A set description violates its invariants; names the offending field."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnsupportedVariantError(FeasilabError):
    """Operation not defined for this set variant; compose manually."""


class NumericalFailureError(FeasilabError):
    """An iterative routine hit its cap; carries the best iterate found."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class ParseError(InputError):
    """JSON input rejected; ``pointer`` holds the JSON pointer path."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer
