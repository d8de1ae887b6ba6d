"""Exception types shared across the package."""


class GaussdecError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidParameter(GaussdecError, ValueError):
    """An argument violates a documented precondition (shape, range, format)."""


class NotSymmetric(GaussdecError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class NotPositiveDefinite(GaussdecError):
    """A matrix failed the Cholesky positive-definiteness test."""


class NonPositiveVariance(GaussdecError):
    """A covariance matrix has a diagonal entry that is not strictly positive."""


class NonConvergence(GaussdecError):
    """An iterative eigenvalue computation exceeded its iteration cap."""


class DegenerateBeta(GaussdecError):
    """The variance-ratio parameter collapsed to 1; the classical constant
    requires it to be strictly larger."""


class NotAdmissibleClassical(GaussdecError):
    """The exponent p is below the classical threshold beta_bar * p(X)."""


class NotInRegion(GaussdecError):
    """The exponent p is outside the admissible region, or too close to a
    breakpoint for the region constant to be meaningful."""


class NotApplicable(GaussdecError):
    """The hypothesis of the requested bound (strict diagonal dominance)
    does not hold for the given matrix."""
