"""Exception hierarchy.

Input problems (``SpecError``) and mathematical precondition failures
(``MathError`` and subclasses) are kept apart so the command line can map
them onto distinct exit codes.
"""


class LGIError(Exception):
    """Base class for all package errors."""


class SpecError(LGIError, ValueError):
    """Malformed user input: curve specs, run configs."""


class ParseError(SpecError):
    """Expression could not be parsed.

    Attributes
    ----------
    position : int
        0-based character offset of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MathError(LGIError, ArithmeticError):
    """A mathematical precondition does not hold for the given data."""


class DomainError(MathError):
    """Series function evaluated outside its domain."""


class NotDivisibleError(MathError):
    """Bivariate jet has a nonvanishing coefficient below the requested power."""


class RankError(MathError):
    """Rank deficiency, non-transversality or a broken pivot pattern."""


class NotAmpleError(MathError):
    """Curve is not ample up to the available jet order."""


class StructureError(MathError):
    """A structural identity (Darboux relations, frame equations, flag
    dimensions) fails beyond tolerance."""


class ToleranceError(LGIError):
    """A monitored residual exceeded its tolerance during a computation."""
