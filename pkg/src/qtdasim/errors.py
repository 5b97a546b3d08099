"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when user-provided data violates a precondition."""


class EmptyComplexError(InvalidInputError):
    """Raised when an operation needs at least one simplex and got none."""


class NumericalError(ArithmeticError):
    """Raised when a numerical routine cannot produce a trustworthy answer."""


class IllSeparatedSpectrumError(NumericalError):
    """Eigenvalues sit too close to the zero threshold to classify safely."""
