"""Exception hierarchy.

Every public error derives from :class:`ElasticSpheresError` and belongs to
exactly one of three families, which the command line maps to exit codes.
"""

from __future__ import annotations


class ElasticSpheresError(Exception):
    """Base class for all package errors."""

    exit_code = 4


class MaterialError(ElasticSpheresError):
    exit_code = 2


class ExistenceError(ElasticSpheresError):
    """The requested configuration does not exist or is inadmissible."""

    exit_code = 3


class NumericalError(ElasticSpheresError):
    exit_code = 4


# material parameters
class InvalidMaterial(MaterialError, ValueError):
    pass


class NotHyperelastic(MaterialError):
    pass


# existence / admissibility
class DomainError(ExistenceError, ValueError):
    pass


class NoEquilibrium(ExistenceError):
    pass


class InadmissibleInnerRadius(ExistenceError):
    pass


class NegativeBoundaryDerivative(ExistenceError):
    pass


class NoZeroPressureRoot(ExistenceError):
    pass


# numerical failures
class _ProfileCarrier(NumericalError):
    """Numerical failure that keeps the partial profile for inspection."""

    def __init__(self, message: str, profile=None):
        super().__init__(message)
        self.profile = profile


class EllipticityLoss(_ProfileCarrier):
    pass


class SingularityGuard(_ProfileCarrier):
    pass


class StepFailure(_ProfileCarrier):
    pass


class NoBoundaryFound(_ProfileCarrier):
    pass


class ProfileTooShort(NumericalError):
    pass


class BoundViolation(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NoRoot(NumericalError):
    pass


class MultipleRoots(NumericalError):
    def __init__(self, message: str, brackets=()):
        super().__init__(message)
        self.brackets = list(brackets)


class NotInvertible(NumericalError):
    pass


class OutOfRange(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class MonotonicityViolation(NumericalError):
    pass


class VerificationFailed(NumericalError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(ElasticSpheresError):
    """Malformed run configuration."""

    exit_code = 1
