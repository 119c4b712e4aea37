"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`BergmanError`,
so callers (the CLI in particular) can map them onto exit codes.
"""


class BergmanError(Exception):
    """Base class for library errors."""


class ValidationError(BergmanError, ValueError):
    """Input data violates a documented precondition."""


class RealityViolation(ValidationError):
    pass


class DegreeOverflow(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NonHolomorphicSubstitution(ValidationError):
    pass


class ConstantTermPresent(ValidationError):
    pass


class NonzeroConstantTerm(ValidationError):
    pass


class OrderTooLow(ValidationError):
    pass


class SingularLeadingTerm(ValidationError):
    pass


class UnsupportedSignature(ValidationError):
    pass


class NonIdentityQuadratic(ValidationError):
    pass


class NotCentered(ValidationError):
    pass


class NotKForm(ValidationError):
    pass


class UnsupportedJ(ValidationError):
    pass


class UnsupportedShape(ValidationError):
    pass


class MissingBeta(ValidationError):
    pass


class InsufficientCurvatureDepth(ValidationError):
    pass


class LogBranchNearSingularity(ValidationError):
    pass


class CrossValidationMismatch(BergmanError):
    """The closed-form and generic coefficient routes disagree."""

    def __init__(self, r, monomial, closed, generic):
        self.r = r
        self.monomial = monomial
        self.closed = closed
        self.generic = generic
        super().__init__(
            f"b{r} mismatch at monomial {monomial}: closed={closed} generic={generic}"
        )


class PrecisionExhausted(BergmanError):
    """A numerical residual fell into the cancellation floor of the working precision."""
