"""Convex body representations and elementary queries."""
from __future__ import annotations

import numpy as np

from .._numerics import as_direction
from ..errors import RepresentationError
from . import planar
from .affine import AffineMap
from .hyperplane import Hyperplane
from .io import body_from_dict, body_to_dict, load_body, save_body
from .polytope import EmptySection, Interval, Polygon, Polytope, PolytopeH, PolytopeV, hausdorff_polytopes
from .revolution import Profile, RevolutionBody, SectionBody

__all__ = [
    "AffineMap", "EmptySection", "Hyperplane", "Interval", "Polygon", "Polytope", "PolytopeH", "PolytopeV",
    "Profile", "RevolutionBody", "SectionBody", "apply_affine", "body_from_dict", "body_to_dict",
    "centroid", "hausdorff", "load_body", "save_body", "section", "support", "volume",
]


def volume(body) -> float:
    return body.volume()


def centroid(body) -> np.ndarray:
    return body.centroid()


def support(body, d) -> float:
    return body.support(as_direction(d, body.n))


def section(body, u, t: float):
    return body.section(u, t)


def apply_affine(body, T: AffineMap):
    return body.apply_affine(T)


def hausdorff(K, L) -> float:
    """Hausdorff distance between two bodies of the same representation family."""
    if isinstance(K, RevolutionBody) and isinstance(L, RevolutionBody):
        if abs(abs(K.axis @ L.axis) - 1.0) > 1e-12:
            raise RepresentationError("bodies of revolution with different axes")
        VL = L.meridian_polygon
        if K.axis @ L.axis < 0:
            VL = np.column_stack([-VL[:, 0], VL[:, 1]])[::-1]
        return planar.hausdorff(K.meridian_polygon, VL)
    if isinstance(K, Polytope) and isinstance(L, Polytope):
        return hausdorff_polytopes(K, L)
    raise RepresentationError("Hausdorff distance needs two polytopes or two bodies of revolution")
