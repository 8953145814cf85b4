class InvalidSubsetError(ValueError):
    """A subset refers to an element outside the ground set."""


class NotSubmodularError(ValueError):
    """An explicit table fails the submodular inequality.

    ``witness`` holds the violating pair ``(X, Y)`` as bitmasks.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalInvariantError(RuntimeError):
    """Raised when a solver invariant breaks; always indicates a bug."""


class PreconditionError(ValueError):
    """A caller supplied arguments that violate a documented precondition."""


class InstanceFormatError(ValueError):
    """An instance file could not be parsed."""
