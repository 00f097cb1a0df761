"""Exception hierarchy.

Every failure raised by the library derives from :class:`HilbertError`.
The two intermediate classes decide the CLI exit code: input problems
(:class:`ValidationError`, exit 2) versus numerical breakdowns
(:class:`NumericalError`, exit 3).
"""

from __future__ import annotations


class HilbertError(Exception):
    """Base class for all library errors."""

    @property
    def token(self) -> str:
        return type(self).__name__


class ValidationError(HilbertError, ValueError):
    pass


class NumericalError(HilbertError, ArithmeticError):
    pass


# geometry primitives
class NonCollinear(ValidationError):
    pass


class DegenerateRatio(ValidationError):
    pass


class CoincidentPoints(ValidationError):
    pass


class Parallel(ValidationError):
    pass


class OffLine(ValidationError):
    pass


# bodies and metric
class PointsOutside(ValidationError):
    pass


class OrderViolation(ValidationError):
    pass


class DegenerateTriangle(ValidationError):
    pass


class DegeneratePolygon(ValidationError):
    pass


class InvalidEllipse(ValidationError):
    pass


class SchemaMismatch(ValidationError):
    pass


# witness construction
class TooFewPoints(ValidationError):
    pass


class CollinearInputs(ValidationError):
    pass


class LineMissesChord(ValidationError):
    pass


class NoExteriorRegion(ValidationError):
    """K minus E is empty: the body is the ellipse, so no witness exists."""


class AvoidanceFailed(NumericalError):
    pass


class InflationFailed(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DegenerateWitness(NumericalError):
    pass
