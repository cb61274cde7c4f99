"""Exception hierarchy shared by every module of the package."""


class WhittakerError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"


class PoleError(WhittakerError, ValueError):
    kind = "PoleError"


class DomainError(WhittakerError, ValueError):
    kind = "DomainError"


class LengthMismatch(WhittakerError, ValueError):
    kind = "LengthMismatch"


class RepeatedParameter(WhittakerError, ValueError):
    kind = "RepeatedParameter"


class InvalidWeight(WhittakerError, ValueError):
    kind = "InvalidWeight"


class UnsupportedRank(WhittakerError, ValueError):
    kind = "UnsupportedRank"


class NumericalError(WhittakerError, ArithmeticError):
    """Base for failures of a numerical procedure (CLI exit code 3)."""

    kind = "NumericalError"


class InfeasibleContour(NumericalError):
    kind = "InfeasibleContour"


class PoleOnContour(NumericalError):
    kind = "PoleOnContour"


class Unconverged(NumericalError):
    kind = "Unconverged"
