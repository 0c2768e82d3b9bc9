"""Symmetry and distance functionals of convex bodies."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize, minimize_scalar
from scipy.spatial import ConvexHull

from ._numerics import kappa
from .bodies import planar
from .bodies.polytope import Interval, Polygon, Polytope, _chebyshev_center
from .bodies.revolution import Profile, RevolutionBody, SectionBody, profile_from_polygon
from .errors import DomainError, GeometryError, InvalidBody, PreconditionError, RepresentationError

SYMMETRY_TOL = 1e-8
SCAN_VERTICES = 2048


# --------------------------------------------------------------------------
# Minkowski measure of symmetry
# --------------------------------------------------------------------------
@dataclass
class SymmetryReport:
    q: float
    center: np.ndarray
    lambda_certificate: float

    def to_dict(self):
        return {"q": self.q, "center": [float(c) for c in self.center],
                "lambda_certificate": self.lambda_certificate}


def _q_halfspaces(A, b, hminus, axis_only: bool = False):
    """Least lambda with h(-a_i) + <a_i, x> <= lambda (b_i - <a_i, x>) for all facets.

    Substituting mu = lambda / (1 + lambda) turns the problem into a single LP in
    (x, mu): <a_i, x> - mu (b_i + h_i^-) <= -h_i^-. ``axis_only`` pins every
    coordinate of x but the first to zero.
    """
    d = A.shape[1]
    k = 1 if axis_only else d
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.column_stack([A[:, :k], -(b + hminus)])
    res = linprog(c, A_ub=A_ub, b_ub=-hminus, bounds=[(None, None)] * k + [(0.0, 1.0)],
                  method="highs-ds")
    if res.status != 0:
        raise GeometryError(f"symmetry LP failed: {res.message}")
    x = np.zeros(d)
    x[:k] = res.x[:k]
    gap = b - A @ x
    if np.any(gap <= 0):
        raise GeometryError("symmetry LP returned a boundary centre")
    lam = float(np.max((hminus + A @ x) / gap))
    q = max(1.0, lam)
    resid = float(max(0.0, np.max(hminus + A @ x - q * gap)))
    return q, x, resid


def minkowski_q(body, dim: int | None = None) -> SymmetryReport:
    """Minkowski measure of symmetry q and an optimal centre."""
    if isinstance(body, Interval):
        return SymmetryReport(1.0, body.centroid(), 0.0)
    if isinstance(body, Polytope):
        A, b = body.A, body.b
        hminus = body.support_many(-A)
        q, x, res = _q_halfspaces(A, b, hminus)
        n = body.n
    elif isinstance(body, (RevolutionBody, SectionBody)):
        V = body.meridian_polygon if isinstance(body, RevolutionBody) else body.meridian_polygon()
        A, b = planar.edge_halfspaces(V)
        hminus = planar.support(V, -A)
        q, x2, res = _q_halfspaces(A, b, hminus, axis_only=True)
        n = body.n
        if isinstance(body, RevolutionBody):
            x = x2[0] * body.axis
        else:
            x = body.origin() + x2[0] * body.e
    elif isinstance(body, np.ndarray):
        V = body
        A, b = planar.edge_halfspaces(V)
        q, x, res = _q_halfspaces(A, b, planar.support(V, -A))
        n = 2
    else:
        raise RepresentationError(f"no symmetry measure for {type(body).__name__}")
    n = dim or n
    if q > n + 1e-6:
        raise GeometryError(f"q={q} exceeds the dimension bound {n}")
    return SymmetryReport(q, x, res)


# --------------------------------------------------------------------------
# Ellipsoid sandwiches
# --------------------------------------------------------------------------
def _planar_ratio(V, A, b, center, angle, log_aspect):
    """lambda with E/lambda inside K - c inside E for the ellipse with given axes (scale free)."""
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    e = math.exp(0.5 * log_aspect)
    D = np.array([e, 1.0 / e])
    W = (V - center) @ R
    outer = np.max(np.hypot(W[:, 0] / D[0], W[:, 1] / D[1]))
    AR = A @ R
    inner = np.min((b - A @ center) / np.hypot(AR[:, 0] * D[0], AR[:, 1] * D[1]))
    return outer / inner


def _axial_ratios(V, A, b, c, log_aspects):
    """_planar_ratio with angle 0 for many aspects at once."""
    e = np.exp(0.5 * np.asarray(log_aspects))[:, None]
    W = V - np.array([c, 0.0])
    outer = np.sqrt((W[:, 0] / e) ** 2 + (W[:, 1] * e) ** 2).max(axis=1)
    gap = b - A[:, 0] * c
    inner = (gap / np.sqrt((A[:, 0] * e) ** 2 + (A[:, 1] / e) ** 2)).min(axis=1)
    return outer / inner


def _aspect_bracket(V):
    ext = np.ptp(V, axis=0)
    L = 2.0 * abs(math.log(max(ext) / min(ext))) + 2.0
    return -L, L


def axial_sandwich_ratio(V: np.ndarray, center=None):
    """Sandwich ratio of a polygon symmetric about the horizontal axis by axis-aligned ellipses.

    ``center`` fixes the homothety centre on the axis; ``None`` optimizes it too.
    Returns (ratio, log_aspect, center).
    """
    A, b = planar.edge_halfspaces(V)
    lo, hi = _aspect_bracket(V)
    # coarse scans run on a decimated polygon, refinement on the full one
    step = max(1, len(V) // SCAN_VERTICES)
    Vs = V[::step]
    As, bs = planar.edge_halfspaces(Vs) if step > 1 else (A, b)

    def best_aspect(c, full=True):
        grid = np.linspace(lo, hi, 121)
        vals = _axial_ratios(Vs, As, bs, c, grid)
        k = int(np.argmin(vals))
        a0, a1 = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        W, Aw, bw = (V, A, b) if full else (Vs, As, bs)
        res = minimize_scalar(lambda g: _planar_ratio(W, Aw, bw, np.array([c, 0.0]), 0.0, g), bounds=(a0, a1),
                              method="bounded", options={"xatol": 1e-12})
        if (step == 1 or not full) and res.fun > vals[k]:
            return float(vals[k]), float(grid[k])
        return float(res.fun), float(res.x)

    if center is not None:
        r, g = best_aspect(float(center))
        return r, g, float(center)
    x0, x1 = V[:, 0].min(), V[:, 0].max()
    w = x1 - x0
    cs = np.linspace(x0 + 0.05 * w, x1 - 0.05 * w, 41)
    vals = [best_aspect(c, step == 1)[0] for c in cs]
    k = int(np.argmin(vals))
    res = minimize_scalar(lambda c: best_aspect(c, step == 1)[0], bounds=(cs[max(k - 1, 0)], cs[min(k + 1, 40)]),
                          method="bounded", options={"xatol": 1e-10 * w})
    c = float(res.x) if res.fun <= vals[k] else float(cs[k])
    r, g = best_aspect(c)
    return r, g, c


def _require_o_symmetric(body):
    if isinstance(body, RevolutionBody):
        if not body.meridian.symmetric_about(0.0, SYMMETRY_TOL):
            raise DomainError("body is not o-symmetric")
    elif isinstance(body, Polytope):
        if not body.is_centrally_symmetric(np.zeros(body.n), SYMMETRY_TOL):
            raise DomainError("body is not o-symmetric")
    else:
        raise RepresentationError(f"no Banach-Mazur distance for {type(body).__name__}")


def polygon_ellipse_ratio(V: np.ndarray, refine: bool = True):
    """min over centred ellipses of the sandwich ratio; returns (ratio, angle, log_aspect)."""
    A, b = planar.edge_halfspaces(V)
    lo, hi = _aspect_bracket(V)
    angles = np.linspace(0.0, math.pi, 72, endpoint=False)
    aspects = np.linspace(lo, hi, 61)
    o = np.zeros(2)
    best = (np.inf, 0.0, 0.0)
    vals = np.empty((len(angles), len(aspects)))
    for i, th in enumerate(angles):
        for j, g in enumerate(aspects):
            vals[i, j] = _planar_ratio(V, A, b, o, th, g)
    flat = np.argsort(vals, axis=None)[:4]
    if not refine:
        i, j = np.unravel_index(flat[0], vals.shape)
        return float(vals[i, j]), float(angles[i]), float(aspects[j])
    for f in flat:
        i, j = np.unravel_index(f, vals.shape)
        res = minimize(lambda p: _planar_ratio(V, A, b, o, p[0], p[1]), [angles[i], aspects[j]],
                       method="Nelder-Mead",
                       options={"xatol": 1e-11, "fatol": 1e-14, "maxiter": 4000})
        cand = (float(res.fun), float(res.x[0]) % math.pi, float(res.x[1]))
        if cand[0] < best[0]:
            best = cand
    return best


def _as_polygon(body):
    """Planar polytopes in any representation as a Polygon."""
    if isinstance(body, Polytope) and body.n == 2 and not isinstance(body, Polygon):
        return Polygon(planar.hull_2d(body.vertices), check=False)
    return body


def bm_distance_ball(body) -> float:
    """Banach-Mazur distance of an o-symmetric body to the Euclidean ball."""
    _require_o_symmetric(body)
    body = _as_polygon(body)
    if isinstance(body, RevolutionBody):
        return axial_sandwich_ratio(body.meridian_polygon, center=0.0)[0]
    if isinstance(body, Polygon):
        return polygon_ellipse_ratio(body.vertices)[0]
    raise RepresentationError("Banach-Mazur distance is implemented for polygons and bodies of revolution")


def revolution_sandwich(body: RevolutionBody, center: float | None = None) -> float:
    """Ellipsoid sandwich ratio of a body of revolution with coaxial revolution ellipsoids."""
    return axial_sandwich_ratio(body.meridian_polygon, center=center)[0]


# --------------------------------------------------------------------------
# Bonnesen quantities
# --------------------------------------------------------------------------
@dataclass
class BonnesenReport:
    W: float
    A: float
    R: float
    r: float
    slack: float

    def to_dict(self):
        return dict(self.__dict__)


def _circle2(a, b):
    c = 0.5 * (a + b)
    return c, float(np.linalg.norm(a - c))


def _circle3(a, b, c):
    d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-300:
        pts = [a, b, c]
        best = max(((p, q) for i, p in enumerate(pts) for q in pts[i + 1:]),
                   key=lambda pq: np.linalg.norm(pq[0] - pq[1]))
        return _circle2(*best)
    sa, sb, sc = a @ a, b @ b, c @ c
    ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
    uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
    o = np.array([ux, uy])
    return o, float(np.linalg.norm(a - o))


def min_enclosing_circle(P: np.ndarray, seed: int = 0):
    """Welzl's algorithm (iterative, randomized order with a fixed seed)."""
    pts = np.asarray(P, dtype=float)[np.random.default_rng(seed).permutation(len(P))]
    eps = 1e-12 * max(1.0, float(np.abs(pts).max()))
    c, r = pts[0].copy(), 0.0
    for i in range(1, len(pts)):
        if np.linalg.norm(pts[i] - c) <= r + eps:
            continue
        c, r = pts[i].copy(), 0.0
        for j in range(i):
            if np.linalg.norm(pts[j] - c) <= r + eps:
                continue
            c, r = _circle2(pts[i], pts[j])
            for k in range(j):
                if np.linalg.norm(pts[k] - c) <= r + eps:
                    continue
                c, r = _circle3(pts[i], pts[j], pts[k])
    return c, r


def bonnesen_report(P: Polygon) -> BonnesenReport:
    P = _as_polygon(P)
    if not isinstance(P, Polygon):
        raise RepresentationError("Bonnesen quantities are defined for polygons")
    V = P.vertices
    W = P.perimeter() / math.pi
    area = P.volume()
    if area <= 0:
        raise InvalidBody("area positive")
    _, R = min_enclosing_circle(V)
    _, r = _chebyshev_center(P.A, P.b)
    return BonnesenReport(W=W, A=area, R=R, r=float(r), slack=W * W - 4.0 / math.pi * area - (R - r) ** 2)


# --------------------------------------------------------------------------
# Difference body
# --------------------------------------------------------------------------
def difference_body_volume(M) -> float:
    """Volume of M - M."""
    M = _as_polygon(M)
    if isinstance(M, Polygon):
        return planar.polygon_area(planar.minkowski_sum(M.vertices, -M.vertices))
    if isinstance(M, Polytope):
        V = M.vertices
        D = (V[:, None, :] - V[None, :, :]).reshape(-1, M.n)
        return float(ConvexHull(D).volume)
    if isinstance(M, RevolutionBody):
        V = M.meridian_polygon
        W = planar.minkowski_sum(V, -V)
        return RevolutionBody(M.axis, profile_from_polygon(W), M.n).volume()
    if isinstance(M, Interval):
        return 2 * M.volume()
    raise RepresentationError(f"no difference body for {type(M).__name__}")


def difference_body_gap(M) -> float:
    """|(M - M)/2| / |M| - 1 (nonnegative by Brunn-Minkowski)."""
    return difference_body_volume(M) / (2.0 ** M.n) / M.volume() - 1.0


# --------------------------------------------------------------------------
# Affine surface area
# --------------------------------------------------------------------------
CURVATURE_FLOOR = -1e-8


def affine_surface_area(body: RevolutionBody) -> float:
    """Affine surface area of a body of revolution with a smooth meridian.

    The meridian samples are treated as a smooth curve (x(s), y(s)) parameterized
    by node index; on Chebyshev grids this is the t = cos(theta) substitution, which
    keeps derivatives bounded at the poles. Curvatures come from centred finite
    differences: k1 is the meridian curvature, k2 = x'/(y |c'|) the curvature of
    the parallels, and the Gauss-Kronecker curvature is k1 * k2^(n-2).
    """
    if not isinstance(body, RevolutionBody):
        raise RepresentationError("affine surface area is implemented for bodies of revolution")
    n = body.n
    x, y = np.asarray(body.t), np.asarray(body.r)
    if len(x) < 5:
        raise InvalidBody("profile grid", "too few nodes for curvature")
    scale = body.diameter
    x1 = np.gradient(x, edge_order=2)
    y1 = np.gradient(y, edge_order=2)
    x2 = np.gradient(x1, edge_order=2)
    y2 = np.gradient(y1, edge_order=2)
    # radius differences at roundoff level are flat pieces; on uneven grids they would be
    # amplified into spurious curvature
    floor = 16 * np.finfo(float).eps * float(np.max(y))
    y1[np.abs(y1) <= floor] = 0.0
    y2[np.abs(y2) <= floor] = 0.0
    speed = np.hypot(x1, y1)
    k1 = -(x1 * y2 - y1 * x2) / speed ** 3
    if np.min(k1) * scale < CURVATURE_FLOOR:
        i = int(np.argmin(k1))
        raise InvalidBody("curvature nonnegative", f"meridian curvature {k1[i]:.3e} at node {i}")
    k1 = np.maximum(k1, 0.0)
    if n == 2:
        integrand = k1 ** (1.0 / 3.0) * speed
        # the body is the region between the two mirrored meridian curves
        return 2.0 * float(np.trapezoid(integrand))
    with np.errstate(divide="ignore", invalid="ignore"):
        k2 = np.where(y > 0, x1 / (y * speed), 0.0)
    k2 = np.maximum(k2, 0.0)
    kappa_gk = k1 * k2 ** (n - 2)
    integrand = kappa_gk ** (1.0 / (n + 1)) * y ** (n - 2) * speed
    integrand[y <= 0] = 0.0
    return (n - 1) * kappa(n - 1) * float(np.trapezoid(integrand))


def affine_ratios(body, santalo_volume: float | None = None):
    """(isoperimetric ratio, Lutwak ratio); both are at most 1 with equality for ellipsoids."""
    from .polar import polar, santalo_point

    n = body.n
    om = affine_surface_area(body)
    V = body.volume()
    if santalo_volume is None:
        santalo_volume = polar(body, santalo_point(body)).volume()
    iso = om ** (n + 1) / (kappa(n) ** 2 * n ** (n + 1) * V ** (n - 1))
    lut = om ** (n + 1) / (n ** (n + 1) * V ** n * santalo_volume)
    return iso, lut


# --------------------------------------------------------------------------
# Asymmetry of a concave profile
# --------------------------------------------------------------------------
@dataclass
class MinksymReport:
    rho: float
    eps: float
    q: float
    worst_margin: float
    violations: int
    checked: int

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self):
        return dict(self.__dict__)


def profile_polygon(g: Profile) -> np.ndarray:
    """Convex hull of the graphs of g and -g."""
    t, r = g.t, g.r
    V = np.concatenate([np.column_stack([t, -r]), np.column_stack([t[::-1], r[::-1]])])
    return planar.clean_ccw(V)


def minksym_bound_check(g: Profile, eps: float | None = None, tol: float = 1e-9) -> MinksymReport:
    """Check (1 + 2 rho eps/(rho - t))^-1 <= g(-t)/g(t) <= 1 + 2 rho eps/(rho - t) on the grid."""
    rho = g.hi
    if abs(g.lo + rho) > 1e-12 * max(rho, 1.0):
        raise DomainError("profile must live on a symmetric interval (-rho, rho)")
    inner = g.r[1:-1]
    if np.any(inner <= 0):
        raise DomainError("profile must be positive on the open interval")
    q = minkowski_q(profile_polygon(g)).q
    if eps is None:
        eps = q - 1.0
    elif q > 1.0 + eps + 1e-12:
        raise PreconditionError(f"q(M) = {q} exceeds 1 + eps = {1 + eps}")
    ts = g.t[(g.t > 0) & (g.t < rho)]
    ratio = g(-ts) / g(ts)
    bound = 1.0 + 2.0 * rho * eps / (rho - ts)
    margin = np.minimum(ratio - 1.0 / bound, bound - ratio)
    worst = float(margin.min()) if len(ts) else math.inf
    return MinksymReport(rho=rho, eps=float(eps), q=q, worst_margin=worst,
                         violations=int(np.sum(margin < -tol)), checked=len(ts))
