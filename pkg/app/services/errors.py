"""
Exception hierarchy shared by the computation services.

Commands map these onto exit codes; routes map them onto HTTP status codes.
"""

from typing import Any, Optional


class DerivedLimitsError(Exception):
    """Base class for every error raised by the engine."""


class PrimeMismatchError(DerivedLimitsError, ValueError):
    """Raised when objects over different primes are combined."""


class WindowError(DerivedLimitsError, ValueError):
    """Raised when a computation needs data outside a degree window."""


class StructureError(DerivedLimitsError, ValueError):
    """Raised when an algebraic axiom fails (closure, equivariance, associativity)."""


class DescriptionError(DerivedLimitsError, ValueError):
    """Raised for invalid description files; carries the offending field path."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class NotRationalError(DerivedLimitsError):
    """Raised when a module is not in the image of the comodule embedding."""

    def __init__(self, message: str, degree: int, vector: Any):
        self.degree = degree
        self.vector = vector
        super().__init__(message)


class CertificateError(DerivedLimitsError):
    """Raised when a tower lacks the degreewise-stability certificate an operation needs."""


class HypothesisRefusal(DerivedLimitsError):
    """A required hypothesis does not hold; the computation is refused rather than extrapolated."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        message = f"hypothesis not satisfied: {hypothesis}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class ExpectationMismatch(DerivedLimitsError):
    """Raised when a canned example disagrees with its stored outcome."""

    def __init__(self, name: str, differences: list):
        self.name = name
        self.differences = differences
        super().__init__(f"{name}: {len(differences)} mismatch(es): " + "; ".join(differences))
