"""Exception hierarchy. The CLI maps each family to an exit code."""


class CRNormalError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class ValidationError(CRNormalError):
    """Malformed input, violated data invariant, bad file."""

    exit_code = 1


class DimensionMismatch(ValidationError):
    pass


class TruncationError(ValidationError):
    """A comparison or extraction was requested beyond a known weight."""


class InvalidSigmaError(ValidationError):
    pass


class PreconditionError(CRNormalError):
    """A mathematical precondition does not hold for the input."""

    exit_code = 2


class DegenerateLeviError(PreconditionError):
    pass


class NotNormalFormError(PreconditionError):
    pass


class UmbilicError(PreconditionError):
    pass


class SearchExhaustedError(PreconditionError):
    pass


class IrrationalScalingError(CRNormalError):
    """An exact root does not exist over the Gaussian rationals."""

    exit_code = 3

    def __init__(self, message, radicand=None):
        super().__init__(message)
        self.radicand = radicand
