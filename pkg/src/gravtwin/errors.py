"""Exception taxonomy shared across modules.

DomainError and ConfigError map to CLI exit code 2, NumericalError to 3.
"""


class DomainError(ValueError):
    """Input outside the physical or mathematical domain of an operation."""


class ConfigError(ValueError):
    """Inconsistent or unusable run configuration."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its stated accuracy."""
