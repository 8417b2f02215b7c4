class OrliczKitError(Exception):
    """Base class for all library errors"""


class DomainError(OrliczKitError):
    """Argument outside the domain of the function"""


class RangeError(OrliczKitError):
    """Value beyond the range of a finite-valued function"""


class UnsupportedFunctionError(OrliczKitError):
    """Young function outside the class a numeric operation supports"""


class AdmissibilityError(OrliczKitError):
    """Integral conditions at zero or infinity fail"""


class IndeterminateError(AdmissibilityError):
    """Tail exponent too close to critical to decide"""


class PrecisionError(OrliczKitError):
    """Requested accuracy could not be reached"""

    def __init__(self, message: str, achieved: float = float("nan")):
        super().__init__(message)
        self.achieved = achieved


class NotNormableError(OrliczKitError):
    """Functional is not a norm for the given parameters"""


class ParameterError(OrliczKitError):
    """Invalid combination of input parameters"""


class PreconditionError(OrliczKitError):
    """Input violates a documented precondition"""
