"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ParameterError(DomainError):
    """Non-physical potential parameters (non-positive mass, frequency or length)."""


class DivergenceError(DomainError):
    """The requested quantity diverges at this argument (e.g. K(p) at p = 1)."""


class QuantumRegimeError(DomainError):
    """Temperature above the crossover temperature: no periodic bounce exists."""


class FitError(ValueError):
    """Not enough data to perform a requested fit."""
