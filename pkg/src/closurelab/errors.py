"""Error hierarchy shared across the package."""


class GeometryError(ValueError):
    """Base class for geometric failures."""


class DomainError(GeometryError):
    """Inputs lie outside an operation's domain."""


class DegeneracyError(GeometryError):
    """A construction collapsed (coincident solutions, degenerate conic)."""


class ChainError(GeometryError):
    """A chain could not be continued.

    Carries the 0-based index of the element that failed and the completed
    prefix of elements, so callers can render or report partial chains.
    """

    def __init__(self, message, index=None, elements=None):
        super().__init__(message)
        self.index = index
        self.elements = list(elements) if elements is not None else []


class DeadEndError(ChainError):
    """No candidate satisfied the separation condition."""


class TieError(ChainError):
    """The separation condition was numerically ambiguous."""
