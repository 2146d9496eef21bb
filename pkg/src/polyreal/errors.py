"""Exception types shared across the package."""

from __future__ import annotations


class PolyrealError(Exception):
    """Base class for all errors raised by polyreal."""


class DegenerateSpan(PolyrealError):
    """Every r-tuple determinant of a configuration vanishes."""


class NotUniform(PolyrealError):
    """An operation that needs a uniform chirotope got a zero sign."""


class BadFormat(PolyrealError):
    """Input text could not be parsed."""


class NotPseudoManifold(PolyrealError):
    def __init__(self, message: str, subridge: tuple[int, ...] | None = None):
        super().__init__(message)
        self.subridge = subridge


class InconsistentOrientation(PolyrealError):
    """Facet sign equalities of a sphere force a tuple to be both + and -."""


class PoleProximity(PolyrealError):
    """Point too close to the projection pole for a stable stereographic chart."""


class DenominatorCapExceeded(PolyrealError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class Contradiction(PolyrealError):
    """Grassmann-Pluecker propagation derived an impossible sign pattern.

    ``triple`` is the witness: all three term products are forced to one sign.
    """

    def __init__(self, triple, message: str = ""):
        super().__init__(message or f"three-term contradiction at {triple}")
        self.triple = triple
