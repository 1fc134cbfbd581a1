"""Exception hierarchy shared by every module of the toolkit."""


class WeakValueError(ValueError):
    """Base class for all toolkit errors."""


class DimensionMismatch(WeakValueError):
    pass


class InvalidDimension(WeakValueError):
    pass


class NotNormalized(WeakValueError):
    pass


class HermiticityViolation(WeakValueError):
    pass


class NegativeVariance(WeakValueError):
    pass


class ConvergenceFailure(WeakValueError):
    pass


class OrthogonalPostSelection(WeakValueError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class PhaseUndefined(WeakValueError):
    pass


class IncompleteBasis(WeakValueError):
    pass


class NonOrthonormalBasis(WeakValueError):
    pass


class ConfigInvalid(WeakValueError):
    pass


class ZeroSelectionProbability(WeakValueError):
    pass


class GuardViolated(WeakValueError):
    pass


class ParseError(WeakValueError):
    pass


class ValidationError(WeakValueError):
    pass


class InequalityViolation(WeakValueError):
    """An inequality that must hold for every PPS ensemble was found broken."""


class ConditioningWarning(UserWarning):
    """Issued when |<phi|psi>| is small enough to amplify rounding noticeably."""
