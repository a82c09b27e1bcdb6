"""Exception hierarchy shared by the numeric and symbolic layers."""


class EllTwistError(Exception):
    """Base class for all package errors."""


class DomainError(EllTwistError):
    """Input lies outside the mathematical domain of an operation."""


class DegenerateLattice(DomainError):
    pass


class PoleAtLatticePoint(DomainError):
    pass


class PoleOrZero(DomainError):
    """Evaluation point too close to a zero or pole of g."""


class InvalidConfiguration(DomainError):
    pass


class InvalidAlpha(DomainError):
    pass


class ClearanceViolation(DomainError):
    pass


class QuadratureFailure(EllTwistError):
    pass


class EpsilonTooLarge(DomainError):
    pass


class NoClearLoopFound(EllTwistError):
    pass


class UnknownIndex(EllTwistError, KeyError):
    pass


class UnknownLabel(EllTwistError, KeyError):
    pass


class SelfIntersectionZero(EllTwistError, ZeroDivisionError):
    pass


class CompositionMismatch(EllTwistError):
    pass


class InDeformationWindow(DomainError):
    pass
