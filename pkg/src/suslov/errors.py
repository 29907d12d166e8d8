"""Exception types shared across the package."""


class SuslovError(Exception):
    """Base class for all package errors."""


class ValidationError(SuslovError, ValueError):
    """Input data violates a documented precondition."""


class NumericalError(SuslovError, ArithmeticError):
    """A numerical procedure could not deliver the requested accuracy."""


class DegenerateAxis(ValidationError):
    pass


class DegenerateBalance(ValidationError):
    pass


class InvalidShape(ValidationError):
    pass


class ParityError(ValidationError):
    pass


class PoleInDenominator(ValidationError):
    pass


class BranchPoint(ValidationError):
    pass


class ResonantParameters(ValidationError):
    pass


class DegenerateC(ValidationError):
    pass


class NonResonant(ValidationError):
    pass


class UnsupportedP(ValidationError):
    pass


class ChartSingularity(ValidationError):
    pass


class CoincidentSolutions(ValidationError):
    pass


class PoleHit(ValidationError):
    pass


class DivisionObstruction(SuslovError, ArithmeticError):
    """Exact polynomial division left a remainder; indicates a construction bug."""


class NoConvergence(NumericalError):
    pass


class StepSizeUnderflow(NumericalError):
    pass


class HorizonTooShort(NumericalError):
    pass
