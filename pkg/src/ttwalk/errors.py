"""Exception types shared across the package."""


class MalformedInputError(ValueError):
    """Input that cannot be parsed or lies outside the ambient rank."""


class InvalidRankError(ValueError):
    pass


class PreconditionError(ValueError):
    """An operation was called on an object that lacks a required property."""


class SearchFailure(RuntimeError):
    """A bounded search exhausted its budget."""


class ContradictionError(RuntimeError):
    """A state that the hypotheses rule out was reached."""


class CapExceededError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
