"""Exception taxonomy.

Validation problems (bad parameters, malformed configs) are kept distinct
from numerical failures (integrator blow-up, truncation overflow) so the
command-line layer can map them to different exit codes.
"""


class HolonomeError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(HolonomeError, ValueError):
    """A parameter, operator, or state violates a documented precondition."""


class ConfigError(ValidationError):
    """A run configuration (file or flags) is malformed or inconsistent."""


class InvalidConnectionError(ValidationError):
    """A holonomy connection matrix is not Hermitian."""


class NumericalError(HolonomeError, RuntimeError):
    """A numerical invariant failed during integration."""


class StepSizeError(NumericalError):
    """The requested time step violates the stability bound."""


class TruncationOverflowError(NumericalError):
    """Population reached the top mechanical Fock level; results untrustworthy."""


class TruncationWarning(UserWarning):
    """Noticeable population in the top mechanical Fock level; consider a larger cutoff."""
