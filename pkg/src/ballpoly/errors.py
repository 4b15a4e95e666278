"""Exception hierarchy.

Every error raised deliberately by the library derives from
:class:`BallPolytopeError`, so callers can catch the whole family at once.
"""


class BallPolytopeError(Exception):
    """Base class for library errors."""


class EmptyInput(BallPolytopeError, ValueError):
    pass


class DuplicatePoints(BallPolytopeError, ValueError):
    pass


class DegenerateCoincident(BallPolytopeError, ValueError):
    """Two sphere centers coincide, so there is no intersection circle."""


class DegenerateEmptyOrPoint(BallPolytopeError, ValueError):
    """Two unit spheres are too far apart to meet in a proper circle."""


class AxisDegenerate(BallPolytopeError, ValueError):
    """A point sits on the axis of a circle, all circle points are equidistant."""


class NotOnSphere(BallPolytopeError, ValueError):
    pass


class NotFullDimensional(BallPolytopeError, ValueError):
    """The ball set has empty interior (circumradius at least 1)."""


class NotSeparable(BallPolytopeError):
    pass


class NotTight(BallPolytopeError, ValueError):
    """The configuration has inessential points."""


class ToleranceConflict(BallPolytopeError):
    """Tolerance bands produced an ambiguous or contradictory classification."""


class NonGenericUnsupported(BallPolytopeError):
    pass


class InternalInvariantViolation(BallPolytopeError, AssertionError):
    pass


class GhsCrossCheckFailure(BallPolytopeError):
    """Diameter count and vertex-set criterion for extremality disagree."""


class NotExtremalInput(BallPolytopeError, ValueError):
    pass


class DualityFailure(BallPolytopeError):
    pass


class BarycenterFallback(BallPolytopeError):
    pass


class InvalidOrder(BallPolytopeError, ValueError):
    pass


class TooLarge(BallPolytopeError, ValueError):
    pass


class InvalidArcSelection(BallPolytopeError, ValueError):
    pass


class InvalidParity(BallPolytopeError, ValueError):
    pass


class InvalidSpec(BallPolytopeError, ValueError):
    pass


class TruncationTooCoarse(BallPolytopeError):
    pass


class DualEdgeConflict(BallPolytopeError, ValueError):
    pass


class ParseError(BallPolytopeError, ValueError):
    """Malformed configuration file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
