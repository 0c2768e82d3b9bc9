"""Exception hierarchy shared by every module."""


class GeometryError(Exception):
    """Base class for all library errors."""


class InvalidBody(GeometryError, ValueError):
    """A body violates one of its representation invariants.

    ``invariant`` names the violated invariant so that callers (the CLI in
    particular) can report it verbatim.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class DomainError(GeometryError, ValueError):
    """An argument lies outside the domain of an operation."""


class RepresentationError(GeometryError, TypeError):
    """The requested operation cannot be expressed in the body's representation."""


class PreconditionError(GeometryError, ValueError):
    """A mathematical precondition of a check is not met by the input."""


class ConvergenceError(GeometryError, RuntimeError):
    """An iterative solver stopped without meeting its certificate."""

    def __init__(self, message: str, best=None, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.best = best
        self.residual = residual
