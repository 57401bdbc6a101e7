"""Shared exception types.

The CLI maps ConfigurationError to exit code 2 and the numerical failures
(PrecisionError, NumericalError) to exit code 3.
"""


class ContractError(ValueError):
    """A caller violated a documented precondition."""


class ConfigurationError(ValueError):
    """Invalid or unsupported configuration (dimension, strategy, sizes)."""


class DomainError(ValueError):
    """Evaluation requested outside the mathematical domain of an operator."""


class PrecisionError(RuntimeError):
    """A requested tolerance cannot be met with the given discretization."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (infeasible solve, divergence)."""
