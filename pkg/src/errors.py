"""Exception types raised across the package.

Every error is a ``ValueError`` subclass so callers that only care about bad
input can catch one thing. The class name is the name of the violated
invariant; the CLI prints it verbatim.
"""


class AccInfoError(ValueError):
    """Base class for all package errors."""


class InvalidMatrix(AccInfoError):
    """Matrix is not square, not 2-D, or holds NaN/Inf entries."""


class NotHermitian(AccInfoError):
    pass


class NotPositive(AccInfoError):
    pass


class TraceNotOne(AccInfoError):
    pass


class DomainError(AccInfoError):
    """Argument outside the domain of a scalar or spectral function."""


class DimensionMismatch(AccInfoError):
    pass


class NotCommuting(AccInfoError):
    pass


class FidelityNotPreserved(AccInfoError):
    """The fidelity-preserving construction missed its verification tolerance."""


class DegenerateInput(AccInfoError):
    pass


class EnsembleFormatError(AccInfoError):
    """Ensemble JSON does not follow the expected layout."""


class ConfigError(AccInfoError):
    pass


class IncompletePovm(AccInfoError):
    """POVM elements do not sum to the identity."""
