"""Exception types raised across the toolkit.

Every error carries a human-readable message; a few carry extra data
(e.g. the offending multi-indices of a resonance) as attributes so that
callers and the CLI can emit machine-readable reports.
"""

__all__ = [
    "BlidkitError",
    "InvalidRadii",
    "OrderTooHigh",
    "DegreeTooHigh",
    "GridMismatch",
    "DimensionMismatch",
    "PoleOnGrid",
    "NotInImage",
    "SupportExceedsValidity",
    "OutsideValidity",
    "NotHyperbolic",
    "Singular",
    "SingularResonance",
    "NotContractive",
    "NotExpansive",
    "BoundViolation",
    "SeriesDiverged",
    "LocalResidualTooLarge",
    "ParseError",
    "CheckFailed",
]


class BlidkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidRadii(BlidkitError, ValueError):
    """Cutoff radii must satisfy 0 < inner < outer."""


class OrderTooHigh(BlidkitError, ValueError):
    """Requested derivative order exceeds what the routine certifies."""


class DegreeTooHigh(BlidkitError, ValueError):
    """Polynomial degree or dimension exceeds the desk-scale caps."""


class GridMismatch(BlidkitError, ValueError):
    """Grid functions with different grid sizes cannot be combined."""


class DimensionMismatch(BlidkitError, ValueError):
    """Vector or matrix dimensions are inconsistent."""


class PoleOnGrid(BlidkitError, ValueError):
    """The integrand 1/(1 - x(t)) has a (near-)pole at a sample point."""


class NotInImage(BlidkitError, ValueError):
    """Argument is not in the image of the projector."""


class SupportExceedsValidity(BlidkitError, ValueError):
    """Bump support must sit strictly inside the local map's validity ball."""


class OutsideValidity(BlidkitError, ValueError):
    """A local map was queried beyond its validity radius."""


class NotHyperbolic(BlidkitError, ValueError):
    """The matrix has spectrum on or too close to the unit circle."""


class Singular(BlidkitError, ValueError):
    """The matrix is not invertible."""


class SingularResonance(BlidkitError):
    """The degree-n coefficient operator is (near-)singular.

    Attributes
    ----------
    degree : int
        Homogeneity degree at which the obstruction occurred.
    multi_indices : list[tuple[int, ...]]
        Nearest resonant multi-indices, most resonant first.
    sigma_min : float
        Smallest singular value of the coefficient operator.
    """

    def __init__(self, message, degree=None, multi_indices=None, sigma_min=None):
        super().__init__(message)
        self.degree = degree
        self.multi_indices = list(multi_indices or [])
        self.sigma_min = sigma_min


class NotContractive(BlidkitError, ValueError):
    """Contraction-side series requires spectral radius < 1."""


class NotExpansive(BlidkitError, ValueError):
    """Expansion-side series requires the inverse to be a contraction."""


class BoundViolation(BlidkitError, ValueError):
    """A blid bound does not fit inside the required ball."""


class SeriesDiverged(BlidkitError, RuntimeError):
    """Partial sums failed the tail-bound test before the iteration cap."""


class LocalResidualTooLarge(BlidkitError, ValueError):
    """The candidate local solution does not solve the equation locally."""


class ParseError(BlidkitError, ValueError):
    """An input file does not match the expected schema."""


class CheckFailed(BlidkitError, RuntimeError):
    """A verification run found at least one violated invariant."""
