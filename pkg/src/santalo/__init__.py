"""Computational convex geometry around the Blaschke-Santalo inequality."""
from . import bodies
from .errors import (ConvergenceError, DomainError, GeometryError, InvalidBody, PreconditionError,
                     RepresentationError)

__all__ = ["bodies", "ConvergenceError", "DomainError", "GeometryError", "InvalidBody",
           "PreconditionError", "RepresentationError"]
__version__ = "0.1.0"
