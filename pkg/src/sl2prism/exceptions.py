"""Exception hierarchy for the projective SL2R model and the prism tilings."""


class GeometryError(ValueError):
    """Base class for every error raised by this package."""


class NonInteriorPoint(GeometryError):
    """A point lies on or outside the hyperboloid solid (form value >= 0)."""


class AtInfinity(GeometryError):
    """A point has x0 == 0 and has no inhomogeneous model coordinates."""


class ResultAtInfinity(AtInfinity):
    """An isometry image landed on the ideal plane x0 == 0."""


class NotRescalable(GeometryError):
    """Row 0 of a matrix has non-negative form value, so it cannot be scaled to -1."""


class DegeneratePlane(GeometryError):
    """All three non-constant plane coefficients vanish."""


class DegenerateK(GeometryError):
    """The denominator of the cover-plane parameter k vanishes."""


class InvalidParameter(GeometryError):
    """A construction parameter is outside its admissible range."""


class InadmissibleQ(InvalidParameter):
    """The rotation order q does not satisfy q > 2p / (p - 2)."""

    def __init__(self, p, q):
        self.p = p
        self.q = q
        self.bound = 2 * p / (p - 2) if p > 2 else float("inf")
        super().__init__(f"inadmissible (p, q) = ({p}, {q}): q must exceed {self.bound:g}")


class NoConvergence(GeometryError):
    """The x3 root finder failed to meet its tolerance or its cross-check."""
