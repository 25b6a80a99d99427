"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class AccuracyError(ArithmeticError):
    """A numerical method failed to reach its tolerance.

    ``diagnostics`` carries whatever the failing routine knew (estimates,
    node counts, last differences).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConditioningError(ArithmeticError):
    """Least-squares design matrix too ill-conditioned to trust."""


class SingularSymbolError(ArithmeticError):
    """Leading term of a symbol determinant vanishes."""


class UnsupportedReductionError(ValueError):
    """Input needs a reduction the engine does not implement."""


class EnumerationError(ArithmeticError):
    """Root enumeration could not certify a bracket."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class CompositionError(ValueError):
    """Index sets violate the integrability condition for composition."""
