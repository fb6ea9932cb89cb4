"""Exception hierarchy shared by all rieszlp modules."""


class RieszLPError(Exception):
    """Base class for every structured error raised by the package."""


class DimensionError(RieszLPError, ValueError):
    """Two lattice elements with different dimensions were combined."""


class NotInAlgebraError(RieszLPError, ValueError):
    """A set is neither finite nor cofinite, so it is outside the algebra."""


class IllDescribedTailError(RieszLPError, ValueError):
    """A subset description does not pin down its behaviour past the bound."""


class MisalignedSetError(RieszLPError, ValueError):
    """A set handed to a grid measure is not a union of whole cells."""


class UndecidableTailError(RieszLPError, ValueError):
    """Filter membership cannot be decided from the declared tail."""


class HorizonMismatchError(RieszLPError, ValueError):
    """Two certificates were built at different horizons."""


class NonConvexError(RieszLPError, ValueError):
    """A convexity-dependent construction was applied to a non-convex input."""


class AsymmetricWeightError(RieszLPError, ValueError):
    """A Fejer weight is not symmetric about the midpoint of its interval."""


class NotProbabilityError(RieszLPError, ValueError):
    """A measure that must have unit mass does not."""


class StabilityCapError(RieszLPError, ValueError):
    """The requested moment order exceeds the quadrature stability cap."""


class BoundaryConditionError(RieszLPError, ValueError):
    """A signal does not vanish (with its derivative) outside [a, T]."""


class NotPositiveError(RieszLPError, ValueError):
    """A sequence that must be strictly positive has a non-positive entry."""
