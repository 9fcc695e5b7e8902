"""Exception hierarchy.

Two families matter to callers (and to the CLI exit code):

* :class:`InputError` -- malformed files, violated preconditions, bad windows.
* :class:`VerdictFailure` -- a mathematical check ran and came out false.
"""


class LagcapError(Exception):
    pass


class InputError(LagcapError, ValueError):
    pass


class VerdictFailure(LagcapError):
    pass


# -- input / precondition errors ---------------------------------------------

class FormatError(InputError):
    pass


class EndpointInSpectrum(InputError):
    pass


class NotComparable(InputError):
    pass


class SpectrumInCollar(InputError):
    pass


class CollarViolation(InputError):
    pass


class PreconditionError(InputError):
    pass


class IndexMismatch(InputError):
    pass


class EndpointIsCriticalValue(InputError):
    pass


class AlphaTooLarge(InputError):
    pass


class ProfileInvalid(InputError):
    pass


class NonFiniteSup(InputError):
    pass


class NotACycle(InputError):
    pass


# -- verdict failures --------------------------------------------------------

class ValidationError(VerdictFailure):
    """A complex violates one of the chain-complex axioms."""

    def __init__(self, message, generator=None, term=None):
        super().__init__(message)
        self.generator = generator
        self.term = term


class DegreeViolation(ValidationError):
    pass


class ActionIncrease(ValidationError):
    pass


class SquareNonzero(ValidationError):
    pass


class NotExact(VerdictFailure):
    pass


class NotChainMap(VerdictFailure):
    pass


class ShiftExceeded(VerdictFailure):
    pass


class HomotopyFails(VerdictFailure):
    pass


class BudgetExceeded(VerdictFailure):
    pass


class NoPrimitive(VerdictFailure):
    pass


class LocalIsoFails(VerdictFailure):
    pass


class StepFailure(VerdictFailure):
    pass


class InfeasibleRho(VerdictFailure):
    pass
