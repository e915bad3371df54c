"""Exception and warning classes used across the package."""


class OffresError(Exception):
    """Base class for all errors raised by offres."""


class DimensionMismatch(OffresError, ValueError):
    pass


class NonHermitianInput(OffresError, ValueError):
    pass


class NumericalContractViolation(OffresError, ArithmeticError):
    """A run broke one of its numerical guarantees (norm drift, truncation leak...)."""


class StepTooLarge(NumericalContractViolation):
    pass


class TruncationLeak(NumericalContractViolation):
    pass


class IntegrationFailure(NumericalContractViolation):
    pass


class TruncationTooTight(OffresError, ValueError):
    pass


class InfiniteTime(OffresError, ZeroDivisionError):
    """The effective coupling vanishes, so the transfer never completes."""


class DegenerateParameters(OffresError, ZeroDivisionError):
    pass


class NoTransfer(OffresError, ValueError):
    pass


class RatioMismatch(OffresError, ValueError):
    pass


class NoCandidate(OffresError, LookupError):
    pass


class ConfigError(OffresError, ValueError):
    """Invalid scenario configuration. ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class UndefinedAzimuth(UserWarning):
    """Both drive segments have zero transverse part; theta is set to 0."""


class ClosedFormUnavailable(UserWarning):
    """No closed form exists for the request; an eigendecomposition was used."""
