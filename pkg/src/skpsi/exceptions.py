"""Errors raised by the calculus.

Input problems derive from ``ValueError``; numerical breakdowns derive from
``ArithmeticError``. Errors that can point at a failing sample carry it as
``witness``.
"""


class CalculusError(Exception):
    """Base class for all skpsi errors."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness

    if not hasattr(BaseException, "add_note"):  # Python < 3.11 backport

        def add_note(self, note: str) -> None:
            if not isinstance(note, str):
                raise TypeError("note must be a str")
            if not hasattr(self, "__notes__"):
                self.__notes__ = []
            self.__notes__.append(note)


# invalid input
class NonEvaluable(CalculusError, ValueError):
    pass


class DerivativeOrderTooHigh(CalculusError, ValueError):
    pass


class ShapeMismatch(CalculusError, ValueError):
    pass


class LambdaMismatch(CalculusError, ValueError):
    pass


class TruncationTooDeep(CalculusError, ValueError):
    pass


class DepthTooLarge(CalculusError, ValueError):
    pass


class OrderGapInvalid(CalculusError, ValueError):
    pass


class NotInCalculus(CalculusError, ValueError):
    pass


class NoPrincipalData(CalculusError, ValueError):
    pass


class RankMismatch(CalculusError, ValueError):
    pass


class ConfigInvalid(CalculusError, ValueError):
    pass


class CatalogMiss(CalculusError, ValueError):
    pass


# numerical failure
class SingularToTolerance(CalculusError, ArithmeticError):
    pass


class SingularAtPoint(CalculusError, ArithmeticError):
    pass


class SingularLeadingCoefficient(CalculusError, ArithmeticError):
    pass


class ExpansionDiverges(CalculusError, ArithmeticError):
    pass


class NeverSmall(CalculusError, ArithmeticError):
    pass


class SpectralHypothesisFailed(CalculusError, ArithmeticError):
    pass


class _ReportError(CalculusError, ArithmeticError):
    def __init__(self, message: str = "", report=None):
        witness = getattr(report, "witness", None)
        super().__init__(message, witness=witness)
        self.report = report


class EllipticityFailed(_ReportError):
    pass


class ReportFailed(_ReportError):
    pass
