"""Exception hierarchy shared by all modules."""


class GaussQIError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GaussQIError, ValueError):
    """Input parameters outside their admissible range."""


class OutOfRange(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class Unphysical(ValidationError):
    """Covariance matrix violates the uncertainty principle."""


class Asymmetric(ValidationError):
    pass


class NotInHighLossRegime(ValidationError):
    pass


class NumericalError(GaussQIError, ArithmeticError):
    """A numerical routine failed to deliver a trustworthy answer."""


class NonConvergent(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class SingularSigma(NumericalError):
    pass


class SingularGibbs(NumericalError):
    """The Gibbs matrix does not exist because a mode is pure."""


class NegativeD(NumericalError):
    pass


class CurvatureTooLarge(NumericalError):
    """The small-reflectivity grid is not small enough for a linear fit."""


class CutoffTooSmall(NumericalError):
    """Fock truncation would discard more probability than allowed."""


class SupportMismatch(NumericalError):
    pass
