"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to produce a trustworthy value."""


class InfeasibleError(NumericalError):
    """A root or target that was asked for does not exist in the allowed range."""
