"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class NumericError(RuntimeError):
    """Raised when a numeric procedure fails (e.g. a factorization that
    does not succeed even after regularization)."""


class DegenerateEstimateError(NumericError):
    """Raised when an estimate is undefined, e.g. an out-of-bag error
    requested from a forest in which no row ever lands out of bag."""
