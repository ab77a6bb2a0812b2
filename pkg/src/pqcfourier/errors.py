"""Exception taxonomy shared across the package.

The CLI maps these onto stable exit codes: configuration/contract/resource/
degenerate problems exit 2, numeric failures exit 3.
"""


class PqcError(Exception):
    """Base class for all package errors."""


class ConfigurationError(PqcError):
    """Invalid configuration value or combination (bad prefactors, unknown keys, ...)."""


class ContractViolationError(PqcError):
    """Caller broke an operation precondition (shape/dimension mismatch, ...)."""


class ResourceLimitError(PqcError):
    """Request would exceed a configured size cap (grid rows, spectrum materialization)."""


class DegenerateDataError(PqcError):
    """Data admits no meaningful answer (constant targets, rank-deficient design, ...)."""


class NumericFailureError(PqcError):
    """Non-finite values encountered during numeric computation."""
