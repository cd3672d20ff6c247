"""Exception types shared across the library."""


class MinimaxLabError(Exception):
    """Base class for all library errors."""


class NonSquareError(MinimaxLabError):
    """Matrix operation requires a square matrix."""


class NonFiniteError(MinimaxLabError):
    """An input or intermediate value is NaN or infinite."""


class IterationLimitError(MinimaxLabError):
    """An iterative solver exhausted its budget without converging."""


class SingularBError(MinimaxLabError):
    """The y-block of the Hessian is within tolerance of singular."""


class UnknownNameError(MinimaxLabError):
    """Catalog lookup with an undocumented identifier."""


class OutOfDomainError(MinimaxLabError):
    """Point lies outside the declared domain box (or too close to it)."""


class UnboundedYError(MinimaxLabError):
    """Inner maximization requires a bounded y-box but none is declared."""


class LambdaTooLargeError(MinimaxLabError):
    """Moreau parameter must satisfy lambda < 1/ell."""


class NotStationaryError(MinimaxLabError):
    """Operation requires a stationary point."""


class GridTooCoarseError(MinimaxLabError):
    """Certification radius falls below the grid resolution."""


class GridCapExceededError(MinimaxLabError):
    """Requested grid exceeds the configured cell cap."""


class NewtonDivergedError(MinimaxLabError):
    """Newton polish failed to converge for a scan candidate."""


class ExpressionError(MinimaxLabError):
    """Inline function expression failed to parse."""
