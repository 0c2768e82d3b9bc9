"""Exact piecewise-linear convex bodies: H- and V-polytopes, polygons, intervals."""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree

from .._numerics import as_direction, complement_basis
from ..errors import DomainError, InvalidBody
from . import planar
from .affine import AffineMap

DIMENSIONS = (2, 3, 4)


def _check_dim(n: int):
    if n not in DIMENSIONS:
        raise InvalidBody("dimension", f"n={n} not in {DIMENSIONS}")


def _unique_facets(eq: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Group triangulated hull equations into facets; returns a label per row."""
    pairs = cKDTree(eq).query_pairs(tol, p=np.inf, output_type="ndarray")
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(eq), len(eq)))
    _, labels = connected_components(g, directed=False)
    # relabel in order of first appearance
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inv]


def _simplex_volumes(P: np.ndarray) -> np.ndarray:
    """Unsigned volumes of simplices given as (k, n+1, n) vertex arrays."""
    n = P.shape[2]
    M = P[:, 1:, :] - P[:, :1, :]
    return np.abs(np.linalg.det(M)) / math.factorial(n)


def _face_measures(P: np.ndarray) -> np.ndarray:
    """(n-1)-measures of (n-1)-simplices embedded in R^n, given as (k, n, n)."""
    m = P.shape[1] - 1
    M = P[:, 1:, :] - P[:, :1, :]
    G = np.einsum("kid,kjd->kij", M, M)
    return np.sqrt(np.maximum(np.linalg.det(G), 0.0)) / math.factorial(m)


class EmptySection:
    """Signal for a hyperplane section of measure zero."""

    def __init__(self, dim: int):
        self.n = dim

    def volume(self) -> float:
        return 0.0

    def __bool__(self):
        return False

    def __repr__(self):
        return f"EmptySection(dim={self.n})"


class Interval:
    """A one-dimensional convex body [lo, hi]."""

    n = 1

    def __init__(self, lo: float, hi: float):
        if not hi > lo:
            raise InvalidBody("interior nonempty", f"interval [{lo}, {hi}]")
        self.lo, self.hi = float(lo), float(hi)

    def volume(self) -> float:
        return self.hi - self.lo

    def centroid(self) -> np.ndarray:
        return np.array([0.5 * (self.lo + self.hi)])

    def support(self, d) -> float:
        d = float(np.asarray(d).reshape(-1)[0])
        return max(d * self.lo, d * self.hi)

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


class Polytope:
    """Common machinery for polytopes; both representations are available lazily."""

    kind = "polytope"

    n: int

    # --- representations -------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        raise NotImplementedError

    @cached_property
    def hull(self) -> ConvexHull:
        return ConvexHull(self.vertices)

    @cached_property
    def _facet_data(self):
        h = self.hull
        eq = h.equations
        labels = _unique_facets(eq)
        k = labels.max() + 1
        A = np.zeros((k, self.n))
        b = np.zeros(k)
        for j in range(k):
            row = eq[labels == j][0]
            A[j] = row[:-1]
            b[j] = -row[-1]
        nrm = np.linalg.norm(A, axis=1)
        A /= nrm[:, None]
        b /= nrm
        areas = np.bincount(labels, weights=_face_measures(self.vertices[h.simplices]), minlength=k)
        return A, b, areas

    @property
    def A(self) -> np.ndarray:
        return self._facet_data[0]

    @property
    def b(self) -> np.ndarray:
        return self._facet_data[1]

    def facet_areas(self) -> np.ndarray:
        return self._facet_data[2]

    # --- elementary queries ---------------------------------------------
    @cached_property
    def diameter(self) -> float:
        V = self.vertices
        if len(V) < 3000:
            d = np.linalg.norm(V[:, None, :] - V[None, :, :], axis=2)
            return float(d.max())
        return float(np.max(np.linalg.norm(V - V.mean(0), axis=1)) * 2)

    def volume(self) -> float:
        return float(self.hull.volume)

    @cached_property
    def _fan(self):
        V = self.vertices
        c = V.mean(axis=0)
        S = np.concatenate([np.broadcast_to(c, (len(self.hull.simplices), 1, self.n)),
                            V[self.hull.simplices]], axis=1)
        return S, _simplex_volumes(S)

    def centroid(self) -> np.ndarray:
        S, vol = self._fan
        return (S.mean(axis=1) * vol[:, None]).sum(axis=0) / vol.sum()

    def second_moment(self) -> np.ndarray:
        """Integral of x x^T over the body (about the origin)."""
        S, vol = self._fan
        n = self.n
        s = S.sum(axis=1)
        M = np.einsum("kid,kie->kde", S, S) + np.einsum("kd,ke->kde", s, s)
        return np.einsum("k,kde->de", vol, M) / ((n + 1) * (n + 2))

    def support(self, d) -> float:
        d = np.asarray(d, dtype=float)
        return float(np.max(self.vertices @ d))

    def support_many(self, D) -> np.ndarray:
        return (np.atleast_2d(D) @ self.vertices.T).max(axis=1)

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        return np.all(np.atleast_2d(pts) @ self.A.T <= self.b + tol, axis=1)

    def interior_margin(self, z) -> float:
        return float(np.min(self.b - self.A @ np.asarray(z, dtype=float)))

    def is_centrally_symmetric(self, center=None, tol: float = 1e-8) -> bool:
        V = self.vertices
        c = self.centroid() if center is None else np.asarray(center, dtype=float)
        d, _ = cKDTree(V).query(2 * c - V)
        return bool(d.max() <= tol * self.diameter)

    # --- sections --------------------------------------------------------
    @cached_property
    def _edges(self) -> np.ndarray:
        simp = self.hull.simplices
        pairs = []
        m = simp.shape[1]
        for i in range(m):
            for j in range(i + 1, m):
                pairs.append(np.sort(simp[:, [i, j]], axis=1))
        return np.unique(np.concatenate(pairs), axis=0)

    def section(self, u, t: float):
        """Section by {<u, x> = t} in coordinates of ``complement_basis(u)``."""
        u = as_direction(u, self.n)
        V = self.vertices
        hts = V @ u
        lo, hi = hts.min(), hts.max()
        tol = 1e-12 * max(self.diameter, 1.0)
        if t <= lo + tol or t >= hi - tol:
            return EmptySection(self.n - 1)
        E = self._edges
        h0, h1 = hts[E[:, 0]], hts[E[:, 1]]
        cross = (np.minimum(h0, h1) <= t) & (np.maximum(h0, h1) >= t) & (h0 != h1)
        lam = (t - h0[cross]) / (h1[cross] - h0[cross])
        P = V[E[cross, 0]] + lam[:, None] * (V[E[cross, 1]] - V[E[cross, 0]])
        on = np.abs(hts - t) <= tol
        if on.any():
            P = np.concatenate([P, V[on]])
        B = complement_basis(u)
        Y = P @ B
        if self.n == 2:
            y = Y[:, 0]
            if y.max() - y.min() <= tol:
                return EmptySection(1)
            return Interval(y.min(), y.max())
        try:
            return PolytopeV.hull_of(Y)
        except InvalidBody:
            return EmptySection(self.n - 1)

    def face_volume(self, u) -> float:
        """(n-1)-volume of the face exposed in direction ``u`` (zero unless it is a facet)."""
        u = as_direction(u, self.n)
        V = self.vertices
        hts = V @ u
        tol = 1e-10 * max(self.diameter, 1.0)
        F = V[hts >= hts.max() - tol]
        if len(F) < self.n:
            return 0.0
        Y = F @ complement_basis(u)
        if self.n == 2:
            return float(np.ptp(Y[:, 0]))
        try:
            return float(ConvexHull(Y).volume)
        except (QhullError, ValueError):
            return 0.0

    # --- transforms ------------------------------------------------------
    def apply_affine(self, T: AffineMap) -> "Polytope":
        raise NotImplementedError

    def to_v(self) -> "PolytopeV":
        return PolytopeV(self.vertices, check=False)

    def to_h(self) -> "PolytopeH":
        return PolytopeH(self.A, self.b, check=False, _vertices=self.vertices)


class PolytopeV(Polytope):
    """Convex hull of a finite set of extreme points."""

    kind = "polytope_v"

    def __init__(self, vertices, *, check: bool = True):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2:
            raise InvalidBody("vertex array", "expected a (k, n) array")
        self.n = V.shape[1]
        _check_dim(self.n)
        if not np.all(np.isfinite(V)):
            raise InvalidBody("finite coordinates")
        V.setflags(write=False)
        self._V = V
        if check:
            if len(V) < self.n + 1:
                raise InvalidBody("full-dimensional", "too few vertices")
            try:
                h = self.hull
            except (QhullError, ValueError) as exc:
                raise InvalidBody("full-dimensional", "hull is degenerate") from exc
            if h.volume <= 1e-12 * self.diameter ** self.n:
                raise InvalidBody("full-dimensional", "hull volume is zero")
            extreme = np.zeros(len(V), bool)
            extreme[h.vertices] = True
            if not extreme.all():
                i = int(np.flatnonzero(~extreme)[0])
                raise InvalidBody("vertices extreme", f"vertex {i} is not extreme")

    @property
    def vertices(self) -> np.ndarray:
        return self._V

    @classmethod
    def hull_of(cls, points) -> "PolytopeV":
        P = np.asarray(points, dtype=float)
        if P.shape[1] == 2:
            return Polygon(planar.hull_2d(P), check=False)
        try:
            h = ConvexHull(P)
        except (QhullError, ValueError) as exc:
            raise InvalidBody("full-dimensional", "points are degenerate") from exc
        return cls(P[h.vertices], check=False)

    def apply_affine(self, T: AffineMap) -> "PolytopeV":
        return type(self)(T(self.vertices), check=False)

    def __repr__(self):
        return f"PolytopeV(n={self.n}, vertices={len(self.vertices)})"


class Polygon(PolytopeV):
    """Planar convex polygon with counterclockwise, strictly convex vertex order."""

    kind = "polygon"

    def __init__(self, vertices, *, check: bool = True):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2:
            raise InvalidBody("vertex array", "polygon vertices must be (k, 2)")
        if check:
            if len(V) < 3:
                raise InvalidBody("area positive", "fewer than three vertices")
            e_in = V - np.roll(V, 1, axis=0)
            e_out = np.roll(V, -1, axis=0) - V
            cr = planar.cross2(e_in, e_out)
            if not np.all(cr > 0):
                i = int(np.flatnonzero(cr <= 0)[0])
                raise InvalidBody("strictly convex ccw order", f"turn at vertex {i} is not left")
            if planar.polygon_area(V) <= 0:
                raise InvalidBody("area positive")
            # winding once: total turning must be 2*pi
            ang = np.arctan2(cr, np.einsum("ij,ij->i", e_in, e_out)).sum()
            if abs(ang - 2 * np.pi) > 1e-6:
                raise InvalidBody("strictly convex ccw order", "vertex list winds more than once")
        super().__init__(V, check=False)

    @classmethod
    def hull_of(cls, points) -> "Polygon":
        return cls(planar.hull_2d(np.asarray(points, dtype=float)), check=False)

    def volume(self) -> float:
        return planar.polygon_area(self.vertices)

    def centroid(self) -> np.ndarray:
        return planar.polygon_centroid(self.vertices)

    def second_moment(self) -> np.ndarray:
        return planar.polygon_second_moment(self.vertices)

    @cached_property
    def _facet_data(self):
        A, b = planar.edge_halfspaces(self.vertices)
        lengths = np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)
        return A, b, lengths

    def perimeter(self) -> float:
        return float(self.facet_areas().sum())

    def support_many(self, D) -> np.ndarray:
        return planar.support(self.vertices, np.atleast_2d(D))

    @cached_property
    def diameter(self) -> float:
        return planar.diameter(self.vertices)[0]

    def apply_affine(self, T: AffineMap) -> "Polygon":
        W = T(self.vertices)
        if T.det < 0:
            W = W[::-1]
        return Polygon(W, check=False)

    def __repr__(self):
        return f"Polygon(vertices={len(self.vertices)})"


def _chebyshev_center(A: np.ndarray, b: np.ndarray):
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.column_stack([A, norms]), b_ub=b,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status == 3:
        raise InvalidBody("bounded", "inscribed-ball problem is unbounded")
    if res.status != 0:
        raise InvalidBody("interior nonempty", "halfspaces are infeasible")
    return res.x[:n], res.x[-1]


def _bounded_box(A: np.ndarray, b: np.ndarray):
    n = A.shape[1]
    for k in range(n):
        for sgn in (1.0, -1.0):
            c = np.zeros(n)
            c[k] = -sgn
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                raise InvalidBody("bounded", f"unbounded along {'+' if sgn > 0 else '-'}e{k + 1}")


class PolytopeH(Polytope):
    """Intersection of halfspaces <a_i, x> <= b_i (rows normalized to unit a_i)."""

    kind = "polytope_h"

    def __init__(self, A, b, *, check: bool = True, _vertices=None):
        A = np.array(A, dtype=float)
        b = np.array(b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != b.shape[0]:
            raise InvalidBody("halfspace array", "A must be (m, n) and b of length m")
        self.n = A.shape[1]
        _check_dim(self.n)
        nrm = np.linalg.norm(A, axis=1)
        if np.any(nrm == 0):
            raise InvalidBody("halfspace array", "zero normal")
        A = A / nrm[:, None]
        b = b / nrm
        A.setflags(write=False)
        b.setflags(write=False)
        self._A, self._b = A, b
        if _vertices is not None:
            self._V = np.asarray(_vertices, dtype=float)
        else:
            self._V = None
        if check:
            _bounded_box(A, b)
            center, radius = _chebyshev_center(A, b)
            if radius <= 1e-12 * max(1.0, float(np.abs(b).max())):
                raise InvalidBody("interior nonempty", "inscribed radius is zero")
            self._center = center
            V = self.vertices
            tol = 1e-9 * self.diameter
            for i in range(len(A)):
                on = V[A[i] @ V.T >= b[i] - tol]
                if len(on) < self.n or np.linalg.matrix_rank(on[1:] - on[0], tol=tol) < self.n - 1:
                    raise InvalidBody("irredundant", f"halfspace {i} does not define a facet")

    @classmethod
    def from_inequalities(cls, A, b) -> "PolytopeH":
        """Build from possibly redundant inequalities, keeping only facet-defining ones."""
        A = np.array(A, dtype=float)
        b = np.array(b, dtype=float).reshape(-1)
        _bounded_box(A, b)
        center, radius = _chebyshev_center(A, b)
        if radius <= 0:
            raise InvalidBody("interior nonempty")
        hs = HalfspaceIntersection(np.column_stack([A, -b]), center)
        P = PolytopeV.hull_of(hs.intersections)
        return P.to_h()

    @property
    def A(self):
        return self._A

    @property
    def b(self):
        return self._b

    @property
    def vertices(self) -> np.ndarray:
        if self._V is None:
            center = getattr(self, "_center", None)
            if center is None:
                center, _ = _chebyshev_center(self._A, self._b)
            hs = HalfspaceIntersection(np.column_stack([self._A, -self._b]), center)
            pts = hs.intersections
            h = ConvexHull(pts)
            V = pts[h.vertices]
            V.setflags(write=False)
            self._V = V
        return self._V

    def facet_areas(self) -> np.ndarray:
        # facet order of the hull may differ from the stored halfspaces; match by normal
        A2, _, areas = self._facet_data
        out = np.zeros(len(self._A))
        for i, a in enumerate(self._A):
            j = int(np.argmax(A2 @ a))
            out[i] = areas[j]
        return out

    def apply_affine(self, T: AffineMap) -> "PolytopeH":
        Mit = T.linear_inverse_transpose()
        A2 = self._A @ Mit.T
        b2 = self._b + A2 @ T.translation
        return PolytopeH(A2, b2, check=False, _vertices=T(self.vertices))

    def to_h(self) -> "PolytopeH":
        return self

    def __repr__(self):
        return f"PolytopeH(n={self.n}, facets={len(self._A)})"


def hausdorff_polytopes(P: Polytope, Q: Polytope) -> float:
    """Upper bound on the Hausdorff distance: worst nearest-vertex distance both ways.

    Exact when the two vertex sets coincide up to small perturbations, which
    is the situation in which it is used (round trips).
    """
    if P.n == 2:
        return planar.hausdorff(Polygon.hull_of(P.vertices).vertices, Polygon.hull_of(Q.vertices).vertices)
    d1, _ = cKDTree(Q.vertices).query(P.vertices)
    d2, _ = cKDTree(P.vertices).query(Q.vertices)
    return float(max(d1.max(), d2.max()))


def check_interior(P: Polytope, z, margin_rel: float = 1e-9):
    if P.interior_margin(z) < margin_rel * P.diameter:
        raise DomainError("point is not strictly interior")
