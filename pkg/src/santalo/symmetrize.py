"""Steiner symmetrization, Schwarz rounding, isotropic position and the reduction pipelines."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import HalfspaceIntersection, QhullError, cKDTree

from ._numerics import as_direction, clenshaw_curtis_weights, chebyshev_nodes, complement_basis, kappa, unit
from .bodies import planar
from .bodies.affine import AffineMap
from .bodies.hyperplane import Hyperplane
from .bodies.polytope import Polygon, Polytope, PolytopeH, PolytopeV, _chebyshev_center
from .bodies.revolution import Profile, RevolutionBody, concave_majorant, profile_from_polygon
from .errors import DomainError, GeometryError, InvalidBody, RepresentationError
from .measures import axial_sandwich_ratio, bm_distance_ball

SCHWARZ_GRID = 1024
POLYTOPE_UNIFORM = 4096
OBLIQUE_MERIDIAN_NODES = 4096
C_PRIME = 0.001


def _as_hyperplane(H, offset=None, n=None) -> Hyperplane:
    if isinstance(H, Hyperplane):
        return H
    return Hyperplane(as_direction(H, n), 0.0 if offset is None else offset)


# --------------------------------------------------------------------------
# Steiner symmetrization
# --------------------------------------------------------------------------
def _steiner_polytope(K: Polytope, u: np.ndarray, offset: float) -> PolytopeV:
    """Exact Steiner symmetral through the fibre product of K with itself.

    Q = {(y, a, c) : (y, a) in K, (y, c) in K} is a polytope in one more dimension
    and (y, a, c) -> (y, (a - c)/2) maps it onto the symmetral, so the symmetral is
    the hull of the images of the vertices of Q.
    """
    n = K.n
    B = complement_basis(u)
    A, b = K.A, K.b
    AB, Au = A @ B, A @ u
    z = np.zeros((len(A), 1))
    G = np.vstack([np.hstack([AB, Au[:, None], z]), np.hstack([AB, z, Au[:, None]])])
    h = np.concatenate([b, b])
    G = np.unique(np.column_stack([G, h]), axis=0)
    G, h = G[:, :-1], G[:, -1]
    center, radius = _chebyshev_center(G, h)
    H = np.column_stack([G, -h])
    try:
        hs = HalfspaceIntersection(H, center)
    except QhullError:
        # nearly coplanar facets (fine polytope approximations); joggling costs ~1e-11
        hs = HalfspaceIntersection(H, center, qhull_options="QJ")
    P = hs.intersections
    Y, a, c = P[:, : n - 1], P[:, n - 1], P[:, n]
    X = Y @ B.T + np.outer(0.5 * (a - c) + offset, u)
    return PolytopeV.hull_of(X)


def steiner(body, H, offset: float | None = None):
    """Steiner symmetral of ``body`` about the hyperplane ``H`` (or normal plus offset)."""
    H = _as_hyperplane(H, offset, body.n)
    u, c = H.normal, H.offset
    if H.n != body.n:
        raise DomainError("hyperplane dimension does not match the body")
    if not (-body.support(-u) <= c <= body.support(u)):
        raise DomainError("hyperplane misses the body")
    if isinstance(body, Polygon):
        return Polygon(planar.steiner(body.vertices, u, c), check=False)
    if isinstance(body, Polytope):
        out = _steiner_polytope(body, u, c)
        return out.to_h() if isinstance(body, PolytopeH) else out
    if isinstance(body, RevolutionBody):
        alpha = float(u @ body.axis)
        scale = max(1.0, body.diameter)
        if abs(abs(alpha) - 1.0) <= 1e-12:
            W = planar.steiner(body.meridian_polygon, np.array([1.0, 0.0]), c * np.sign(alpha))
            return RevolutionBody(body.axis, profile_from_polygon(W), body.n)
        if abs(alpha) <= 1e-12:
            if abs(c) > 1e-12 * scale:
                raise RepresentationError("hyperplane parallel to the axis must contain it")
            return body
        raise RepresentationError("Steiner symmetrization of a body of revolution needs a hyperplane "
                                  "orthogonal to or containing the axis")
    raise RepresentationError(f"no Steiner symmetrization for {type(body).__name__}")


# --------------------------------------------------------------------------
# Schwarz rounding
# --------------------------------------------------------------------------
def _coarsen(body: RevolutionBody, nodes: int) -> RevolutionBody:
    m = len(body.t)
    if m <= nodes + 1:
        return body
    idx = np.unique(np.round(np.linspace(0, m - 1, nodes + 1)).astype(int))
    return body.with_profile(body.t[idx], body.r[idx])


def _polytope_section_volumes(K: Polytope, u, t, tol) -> np.ndarray:
    """Section volumes at heights ``t``.

    Between consecutive vertex heights the section volume is a polynomial of degree
    n - 1, so n interior samples per piece determine it exactly.
    """
    n = K.n
    hts = np.unique(K.vertices @ u)
    br = [hts[0]]
    for h in hts[1:]:
        if h - br[-1] > tol:
            br.append(h)
    br[-1] = hts[-1]
    br = np.asarray(br)
    # interior Chebyshev points of the first kind
    s = 0.5 - 0.5 * np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))
    h = K.vertices @ u
    apex_lo = np.sum(h <= br[0] + tol) == 1
    apex_hi = np.sum(h >= br[-1] - tol) == 1
    last = len(br) - 2
    out = np.empty(len(t))
    piece = np.clip(np.searchsorted(br, t, side="right") - 1, 0, last)
    for k in range(last + 1):
        sel = piece == k
        if not sel.any():
            continue
        a, b = br[k], br[k + 1]
        if (k == 0 and apex_lo) or (k == last and apex_hi):
            # a cone over the far section: exact power law, no cancellation near the apex
            tip = a if (k == 0 and apex_lo) else b
            y = K.section(u, 0.5 * (a + b)).volume()
            out[sel] = y * (np.abs(t[sel] - tip) / (0.5 * (b - a))) ** (n - 1)
            continue
        y = [K.section(u, a + (b - a) * sj).volume() for sj in s]
        c = np.polynomial.polynomial.polyfit(s, y, n - 1)
        out[sel] = np.polynomial.polynomial.polyval((t[sel] - a) / (b - a), c)
    return np.maximum(out, 0.0)


def schwarz_round(body, u, grid: int = SCHWARZ_GRID) -> RevolutionBody:
    """Replace every section orthogonal to ``u`` by a centred ball of equal volume."""
    n = body.n
    u = as_direction(u, n)
    if isinstance(body, RevolutionBody):
        alpha = float(u @ body.axis)
        if abs(abs(alpha) - 1.0) <= 1e-12:
            if alpha > 0:
                return RevolutionBody(u, body.meridian, n)
            return RevolutionBody(u, Profile(-body.t[::-1], body.r[::-1], positive_interior=False), n)
        body = _coarsen(body, OBLIQUE_MERIDIAN_NODES)
    lo, hi = -body.support(-u), body.support(u)
    t = chebyshev_nodes(lo, hi, grid)
    if isinstance(body, Polytope):
        # sections are piecewise smooth between vertex heights; a uniform layer keeps
        # the inscribed-polyline error small in the middle as well
        tol = 1e-9 * (hi - lo)
        hts = body.vertices @ u
        extra = np.concatenate([np.linspace(lo, hi, POLYTOPE_UNIFORM + 1), hts])
        t = np.unique(np.concatenate([t, extra[(extra > lo + tol) & (extra < hi - tol)]]))
        t = t[np.concatenate([[True], np.diff(t) > tol])]
        if hi - t[-1] <= tol:
            t = t[:-1]
        t = np.concatenate([t, [hi]])
    if isinstance(body, Polytope):
        vols = _polytope_section_volumes(body, u, t, tol)
    else:
        vols = np.empty(len(t))
        for j in range(1, len(t) - 1):
            vols[j] = body.section(u, t[j]).volume()
    vols[0] = body.face_volume(-u)
    vols[-1] = body.face_volume(u)
    if not np.all(np.isfinite(vols)) or np.any(vols < 0):
        raise GeometryError("section volume evaluation failed")
    r = (vols / kappa(n - 1)) ** (1.0 / (n - 1))
    rc = concave_majorant(t, r)
    scale = max(hi - lo, float(r.max()))
    if np.max(rc - r) > 1e-7 * scale:
        raise GeometryError("section radii are not concave; section volumes are inaccurate")
    out = RevolutionBody(u, Profile(t, rc, positive_interior=False), n)
    if not isinstance(body, Polytope):
        # the polyline through the radii is inscribed; scale the radii so the meridian
        # carries the Clenshaw-Curtis volume of the sampled sections
        target = 0.5 * (hi - lo) * float(clenshaw_curtis_weights(grid) @ vols)
        rc = rc * (target / out.volume()) ** (1.0 / (n - 1))
        out = RevolutionBody(u, Profile(t, rc, positive_interior=False), n)
    return out


# --------------------------------------------------------------------------
# Isotropic position
# --------------------------------------------------------------------------
@dataclass
class IsotropicReport:
    map: AffineMap
    L_K: float
    inclusion_radius: float
    second_moment: float

    def to_dict(self):
        return {"matrix": self.map.matrix.tolist(), "translation": self.map.translation.tolist(),
                "L_K": self.L_K, "inclusion_radius": self.inclusion_radius,
                "second_moment": self.second_moment}


def covariance(body) -> np.ndarray:
    V = body.volume()
    c = body.centroid()
    return body.second_moment() / V - np.outer(c, c)


def _radius(body) -> float:
    if isinstance(body, RevolutionBody):
        return float(np.max(np.linalg.norm(body.meridian_polygon, axis=1)))
    return float(np.max(np.linalg.norm(body.vertices, axis=1)))


def isotropic_normalize(body):
    """Affine map to weak isotropic position with volume kappa_n, and the image body."""
    n = body.n
    c = body.centroid()
    cov = covariance(body)
    if isinstance(body, RevolutionBody):
        a = body.axis
        var_a = float(a @ cov @ a)
        var_p = (float(np.trace(cov)) - var_a) / (n - 1)
        if min(var_a, var_p) <= 0:
            raise InvalidBody("full-dimensional", "singular covariance")
        W = AffineMap.dilation(a, var_a ** -0.5, var_p ** -0.5)
        c = float(c @ a) * a
    else:
        w, Q = np.linalg.eigh(cov)
        if w.min() <= 1e-14 * w.max():
            raise InvalidBody("full-dimensional", "singular covariance")
        W = AffineMap(Q @ np.diag(w ** -0.5) @ Q.T, np.zeros(n))
    T = W @ AffineMap.shift(-c)
    s = (kappa(n) / (body.volume() * abs(T.det))) ** (1.0 / n)
    T = AffineMap.scaling(n, s) @ T
    K = body.apply_affine(T)
    lam = float(np.trace(K.second_moment())) / n
    V = K.volume()
    L = math.sqrt(lam * V ** (-(n + 2) / n))
    return IsotropicReport(map=T, L_K=L, inclusion_radius=_radius(K), second_moment=lam), K


# --------------------------------------------------------------------------
# Rounding (one Schwarz rounding plus a volume preserving dilation)
# --------------------------------------------------------------------------
@dataclass
class RoundingInfo:
    direction: np.ndarray
    h: float
    case: str
    scores: dict = field(default_factory=dict)
    isotropic: IsotropicReport | None = None


def _candidate_directions(K):
    """Directions where the support function of K (centroid at o) is largest and smallest."""
    if isinstance(K, RevolutionBody):
        a = K.axis
        w = complement_basis(a)[:, 0]
        V = K.meridian_polygon
        norms = np.linalg.norm(V, axis=1)
        A, b = planar.edge_halfspaces(V)
        scale = K.diameter
        out = []
        hmax = float(norms.max())
        hmin = float(b.min())
        for label, val in (("max", hmax), ("min", hmin)):
            for sgn in (1.0, -1.0):
                if abs(K.support(sgn * a) - val) <= 1e-9 * scale:
                    out.append((label, sgn * a))
                    break
            else:
                if label == "max":
                    p = V[int(np.argmax(norms))]
                    d = p / np.linalg.norm(p)
                else:
                    d = A[int(np.argmin(b))]
                out.append((label, unit(d[0] * a + abs(d[1]) * w)))
        return out
    V = K.vertices
    norms = np.linalg.norm(V, axis=1)
    return [("max", V[int(np.argmax(norms))] / norms.max()), ("min", K.A[int(np.argmin(K.b))])]


def rounding_pipeline(body, grid: int = SCHWARZ_GRID, return_info: bool = False):
    """Isotropic position, Schwarz rounding about an extremal direction, then the dilation
    by h^-1 along it and h^(1/(n-1)) across it, so the direction lies on the boundary."""
    n = body.n
    rep, K = isotropic_normalize(body)
    best = None
    scores = {}
    own_axis = K.axis if isinstance(K, RevolutionBody) else None
    seen = []
    for label, u in _candidate_directions(K):
        if any(abs(u @ v) > 1 - 1e-12 and np.sign(u @ v) > 0 for v in seen):
            continue
        seen.append(u)
        h = K.support(u)
        C = schwarz_round(K, u, grid)
        C = C.apply_affine(AffineMap.dilation(u, 1.0 / h, h ** (1.0 / (n - 1))))
        score = axial_sandwich_ratio(C.meridian_polygon, center=0.0)[0]
        scores[label] = score
        on_axis = own_axis is not None and abs(abs(u @ own_axis) - 1) <= 1e-12
        if best is None or score > best[0] + 1e-9 or (abs(score - best[0]) <= 1e-9 and on_axis):
            best = (score, C, u, h, label)
    _, C, u, h, label = best
    if return_info:
        return C, RoundingInfo(direction=u, h=h, case=label, scores=scores, isotropic=rep)
    return C


# --------------------------------------------------------------------------
# Planar double Steiner symmetrization
# --------------------------------------------------------------------------
def find_symmetry_axis(P: Polygon, tol: float = 1e-8):
    """A line of reflection symmetry (point, unit direction) of the polygon."""
    V = P.vertices
    c = P.centroid()
    diam = P.diameter
    mids = 0.5 * (V + np.roll(V, -1, axis=0))
    cand = np.concatenate([V, mids]) - c
    cand = cand[np.linalg.norm(cand, axis=1) > 1e-12 * diam]
    ang = np.mod(np.arctan2(cand[:, 1], cand[:, 0]), math.pi)
    order = np.argsort(ang, kind="stable")
    tree = cKDTree(V)
    last = None
    for i in order:
        if last is not None and abs(ang[i] - last) < 1e-12:
            continue
        last = ang[i]
        e = np.array([math.cos(ang[i]), math.sin(ang[i])])
        W = V - c
        R = 2.0 * np.outer(W @ e, e) - W + c
        d, _ = tree.query(R)
        if d.max() <= tol * diam:
            return c, e
    raise DomainError("polygon has no axis of symmetry")


@dataclass
class DoubleSteinerInfo:
    branch: str
    eps: float
    bm_first: float
    bm_final: float
    normalization: AffineMap


def _chord(V, p, e):
    """Parameter range of the chord {p + s e} of the polygon."""
    A, b = planar.edge_halfspaces(V)
    ae = A @ e
    gap = b - A @ p
    lo = np.max(gap[ae < 0] / ae[ae < 0])
    hi = np.min(gap[ae > 0] / ae[ae > 0])
    return lo, hi


def _diameter_pair_symmetral(V: np.ndarray):
    """(K_{l1})_{l2} with l1 through a diameter and l2 orthogonal, recentred at o."""
    _, x1, x2 = planar.diameter(V)
    e1 = unit(x2 - x1)
    n1 = np.array([-e1[1], e1[0]])
    c1 = float(n1 @ x1)
    c2 = float(e1 @ (0.5 * (x1 + x2)))
    W = planar.steiner(V, n1, c1)
    W = planar.steiner(W, e1, c2)
    centre = c1 * n1 + c2 * e1
    return W - centre


def planar_double_steiner(P: Polygon, c_prime: float = C_PRIME, eps: float | None = None,
                          return_info: bool = False):
    """Two Steiner symmetrizations about orthogonal lines chosen as in the planar reduction.

    The polygon is first placed so that its symmetry axis is the x-axis, the chord on the
    axis has length 2 with midpoint o, and the area is pi. The first candidate pair is
    (axis, orthogonal line through o); if the result is within 1 + c' eps^2 of an ellipse,
    the pair through a diameter is used instead.
    """
    p, e = find_symmetry_axis(P)
    f = np.array([-e[1], e[0]])
    V = P.vertices
    lo, hi = _chord(V, p, e)
    mid = p + 0.5 * (lo + hi) * e
    sx = 2.0 / (hi - lo)
    sy = math.pi / (P.volume() * sx)
    R = np.vstack([e, f])
    T = AffineMap(np.diag([sx, sy]) @ R, -np.diag([sx, sy]) @ R @ mid)
    K0 = P.apply_affine(T)
    V0 = K0.vertices
    if eps is None:
        eps = axial_sandwich_ratio(V0)[0] - 1.0
    first = planar.steiner(planar.steiner(V0, np.array([0.0, 1.0]), 0.0), np.array([1.0, 0.0]), 0.0)
    first_P = Polygon(first, check=False)
    bm_first = bm_distance_ball(first_P)
    out, branch, bm_final = first_P, "axis", bm_first
    if eps > 1e-9 and bm_first - 1.0 <= c_prime * eps * eps:
        out = Polygon(_diameter_pair_symmetral(V0), check=False)
        branch = "diameter"
        bm_final = bm_distance_ball(out)
    if return_info:
        return out, DoubleSteinerInfo(branch, float(eps), bm_first, bm_final, T)
    return out


# --------------------------------------------------------------------------
# Full reduction to an o-symmetric body of revolution
# --------------------------------------------------------------------------
def _sliced_double_steiner(C: RevolutionBody, w, n1, c1: float, e1, c2: float, slices=None,
                           arc=None, angles: int = 6) -> PolytopeV:
    """Inscribed polytope for two Steiner symmetrizations of a body of revolution whose normals
    lie in the plane spanned by the axis and ``w``, recentred at o.

    Both maps act separately on every translate z + span(axis, w), and the slice at distance
    rho from that plane is {|y| <= sqrt(r(t)^2 - rho^2)}. Each slice is replaced by an inscribed
    polygon, symmetrized exactly in the plane, and the results are swept over |z| = rho.
    """
    n = C.n
    # the later rounding costs about n section hulls per distinct vertex height
    slices = slices or (10 if n == 3 else 6)
    arc = arc or (24 if n == 3 else 10)
    u = C.axis
    E = complement_basis(u)
    E = E[:, 1:] if n > 2 else E[:, :0]
    mer = C.meridian
    rmax = float(mer.r.max())
    shift = c1 * n1 + c2 * e1
    if n == 2:
        rhos, dirs = [0.0], np.zeros((1, 0))
    elif n == 3:
        rhos = rmax * np.sin(0.5 * math.pi * np.arange(slices) / slices)
        dirs = np.array([[1.0], [-1.0]])
    else:
        rhos = rmax * np.sin(0.5 * math.pi * np.arange(slices) / slices)
        th = np.arange(angles) * 2 * math.pi / angles
        dirs = np.column_stack([np.cos(th), np.sin(th)])
    pts = []
    for k, rho in enumerate(rhos):
        inside = np.flatnonzero(mer.r > rho)
        if len(inside) == 0:
            continue
        i, j = inside[0], inside[-1]
        # end points where r(t) = rho on the pieces entering and leaving the slice
        tlo = mer.t[i] if i == 0 else np.interp(rho, [mer.r[i - 1], mer.r[i]], [mer.t[i - 1], mer.t[i]])
        thi = mer.t[j] if j == len(mer.t) - 1 else np.interp(rho, [mer.r[j + 1], mer.r[j]],
                                                               [mer.t[j + 1], mer.t[j]])
        if thi - tlo <= 1e-9 * mer.scale():
            continue
        ts = chebyshev_nodes(tlo, thi, arc)
        ys = np.sqrt(np.maximum(mer(ts) ** 2 - rho * rho, 0.0))
        V = planar.hull_2d(np.concatenate([np.column_stack([ts, ys]), np.column_stack([ts, -ys])]))
        W = planar.steiner(planar.steiner(V, n1, c1), e1, c2) - shift
        X = np.outer(W[:, 0], u) + np.outer(W[:, 1], w)
        ring = dirs[:1] if rho == 0 else dirs
        # alternate the phase of consecutive rings so the hull has few coplanar facets
        if n == 4 and k % 2:
            c, sn = math.cos(math.pi / angles), math.sin(math.pi / angles)
            ring = ring @ np.array([[c, sn], [-sn, c]])
        for d in ring:
            pts.append(X + rho * (E @ d))
    return PolytopeV.hull_of(np.concatenate(pts))


@dataclass
class ReductionInfo:
    branch: str
    eps: float
    bm_first: float
    first: RoundingInfo
    second: RoundingInfo


def _even_profile(C: RevolutionBody) -> RevolutionBody:
    tp = np.unique(np.abs(C.t))
    tol = 1e-12 * tp[-1]
    tp = tp[np.concatenate([[True], np.diff(tp) > tol])]
    if tp[0] <= tol:
        t = np.concatenate([-tp[:0:-1], [0.0], tp[1:]])
    else:
        t = np.concatenate([-tp[::-1], tp])
    r = 0.5 * (C.meridian(t) + C.meridian(-t))
    return C.with_profile(t, r)


def full_reduction(body, grid: int = SCHWARZ_GRID, c_prime: float = C_PRIME, return_info: bool = False):
    """Rounding, two orthogonal Steiner symmetrizations, rounding again; o-symmetric output."""
    C1, info1 = rounding_pipeline(body, grid, return_info=True)
    u = C1.axis
    eps = axial_sandwich_ratio(C1.meridian_polygon)[0] - 1.0
    C2 = steiner(C1, Hyperplane(u, 0.0))
    bm_first = bm_distance_ball(C2)
    branch = "axis"
    if eps > 1e-9 and bm_first - 1.0 <= c_prime * eps * eps:
        branch = "diameter"
        _, x1, x2 = planar.diameter(C1.meridian_polygon)
        w = complement_basis(u)[:, 0]
        e1 = unit(x2 - x1)
        n1 = np.array([-e1[1], e1[0]])
        c1 = float(n1 @ x1)
        c2 = float(e1 @ (0.5 * (x1 + x2)))
        C2 = _sliced_double_steiner(C1, w, n1, c1, e1, c2)
    C3, info2 = rounding_pipeline(C2, grid, return_info=True)
    C3 = _even_profile(C3)
    if return_info:
        return C3, ReductionInfo(branch, float(eps), float(bm_first), info1, info2)
    return C3
