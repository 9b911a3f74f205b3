"""Exception hierarchy shared across the package."""


class OrliczError(Exception):
    """Base class for every error raised by this package."""


class DomainExceeded(OrliczError):
    pass


class RangeExceeded(OrliczError):
    pass


class InvariantViolation(OrliczError):
    pass


class NonPositiveIntegrand(OrliczError):
    pass


class NonFinite(OrliczError):
    pass


class NotMonotone(OrliczError):
    pass


class PreconditionFailed(OrliczError):
    pass


class Unstable(OrliczError):
    pass


class SingularEvaluation(OrliczError):
    pass


class ZeroPotential(OrliczError):
    pass


class NotIncreasing(OrliczError):
    pass


class Febbraio1Violated(OrliczError):
    """The map s -> s^n Psi(1/s) is not non-decreasing or does not decay at 0."""


class ParameterWindow(OrliczError):
    pass


class CertificationFailed(OrliczError):
    def __init__(self, message, k=None, witness=None):
        super().__init__(message)
        self.k = k
        self.witness = witness
