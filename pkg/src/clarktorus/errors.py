"""Exception types raised by the library."""


class ClarkError(Exception):
    """Base class for all library errors."""


class DomainError(ClarkError, ValueError):
    """A point lies outside the polydisc or off the torus."""


class PoleError(ClarkError, ArithmeticError):
    """A rational map was evaluated where its denominator vanishes."""


class SingularityError(ClarkError, ArithmeticError):
    """The Clark symbol was evaluated where the map equals alpha."""


class RootFindingError(ClarkError, ArithmeticError):
    """Roots expected on the unit circle were not found there."""


class DegenerateSliceError(ClarkError, ValueError):
    """A slice of the map is constant, so it carries no 1-D Clark measure."""


class ResolutionError(ClarkError, ValueError):
    """A quadrature grid is too coarse for the requested integrand."""


class AliasingError(ClarkError, ValueError):
    """A Fourier index exceeds what the quadrature grid can resolve."""


class CatalogError(ClarkError, KeyError):
    """Unknown catalog name."""
