"""Exception hierarchy shared across the package.

Validation errors mean the caller handed us something malformed (bad
indices, broken normalization, oversized registers).  Numerical errors
mean a computation produced something a valid quantum state never
should (negative probability weight, failed decomposition, NaN drift).
The CLI maps the two families to distinct exit codes.
"""


class QDarwinError(Exception):
    """Base class for all package errors."""


class ValidationError(QDarwinError, ValueError):
    """Malformed input: bad shapes, indices, normalization, or config."""


class NumericalError(QDarwinError, RuntimeError):
    """A computation left the manifold of physically valid results."""


class PSDViolationError(NumericalError):
    """An operator that must be positive semidefinite is not."""


class DecompositionError(NumericalError):
    """An eigendecomposition failed; the message carries the residual."""


class RankConditioningWarning(UserWarning):
    """Eigenvalue sits inside the ambiguous rank-decision band."""
