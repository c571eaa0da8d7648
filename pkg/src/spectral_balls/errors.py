"""Exception hierarchy shared by all modules."""


class SpectralBallsError(Exception):
    """Base class for every error raised by this package."""


class BodyError(SpectralBallsError, ValueError):
    """Invalid body parameters (unbounded, non-positive axes, non-SPD matrix...)."""


class GaugeUndefined(SpectralBallsError):
    """The region is not star-shaped about the origin (contains a translation)."""


class DimensionError(SpectralBallsError, ValueError):
    pass


class DomainError(SpectralBallsError, ValueError):
    pass


class DegenerateComponent(SpectralBallsError):
    pass


class EmptyMask(SpectralBallsError):
    """No grid point lies strictly inside the region at the requested spacing."""


class NoConvergence(SpectralBallsError):
    pass


class IllConditionedFit(SpectralBallsError):
    """Successive eigenvalue differences do not contract; no extrapolation order."""


class StartOutsideRegion(SpectralBallsError, ValueError):
    pass


class DegenerateRegion(SpectralBallsError):
    """Almost every path exits on the first step; the time step is too coarse."""


class InsufficientTail(SpectralBallsError):
    pass


class OriginOutside(SpectralBallsError, ValueError):
    pass


class EmptyIntersection(SpectralBallsError):
    pass


class InclusionNotEstablished(SpectralBallsError):
    pass


class FixtureExhausted(SpectralBallsError):
    pass


class SchemaError(SpectralBallsError, ValueError):
    """A JSON document does not follow the shipped schema."""
