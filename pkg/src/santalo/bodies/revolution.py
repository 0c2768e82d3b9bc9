"""Bodies of revolution described by a concave meridian radius function.

The meridian r(t) is given on a grid and interpreted as its piecewise-linear
interpolant, so every body here is an exact convex body: volumes, moments,
supports and polars are computed in closed form on that polyline. Smooth
targets (balls, ellipsoids, l_p balls) are approximated by sampling them on a
dense Chebyshev grid, which clusters nodes where r' blows up.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .._numerics import (GL4_NODES, GL4_WEIGHTS, GL12_NODES, GL12_WEIGHTS, as_direction,
                         chebyshev_nodes, complement_basis, kappa)
from ..errors import InvalidBody, RepresentationError
from . import planar
from .affine import AffineMap
from .polytope import DIMENSIONS, EmptySection

SMOOTH_GRID = 1 << 16
CONCAVITY_TOL = 1e-12


class Profile:
    """Samples (t_j, r_j) of a concave, nonnegative radius function."""

    def __init__(self, t, r, *, positive_interior: bool = True):
        t = np.array(t, dtype=float).reshape(-1)
        r = np.array(r, dtype=float).reshape(-1)
        if t.shape != r.shape or len(t) < 2:
            raise InvalidBody("profile grid", "t and r must have the same length >= 2")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
            raise InvalidBody("finite coordinates")
        if not np.all(np.diff(t) > 0):
            i = int(np.flatnonzero(np.diff(t) <= 0)[0])
            raise InvalidBody("grid increasing", f"t[{i + 1}] <= t[{i}]")
        if np.any(r < 0):
            i = int(np.flatnonzero(r < 0)[0])
            raise InvalidBody("radii nonnegative", f"r[{i}] = {r[i]}")
        scale = max(t[-1] - t[0], float(r.max()))
        if scale <= 0 or r.max() <= 0:
            raise InvalidBody("interior nonempty", "all radii are zero")
        if len(t) >= 3:
            dt = np.diff(t)
            dr = np.diff(r)
            # cross product of consecutive polyline edges; concave means clockwise turn
            turn = dt[:-1] * dr[1:] - dt[1:] * dr[:-1]
            bad = turn > CONCAVITY_TOL * scale * scale
            if bad.any():
                i = int(np.flatnonzero(bad)[0]) + 1
                raise InvalidBody("concave", f"second difference positive at node {i}")
        if positive_interior and len(t) > 2 and np.any(r[1:-1] <= 0):
            raise InvalidBody("positive interior", "interior radius is zero")
        t.setflags(write=False)
        r.setflags(write=False)
        self.t, self.r = t, r
        self.positive_interior = positive_interior

    def __len__(self):
        return len(self.t)

    @property
    def lo(self) -> float:
        return float(self.t[0])

    @property
    def hi(self) -> float:
        return float(self.t[-1])

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.interp(s, self.t, self.r)
        return np.where((s < self.t[0]) | (s > self.t[-1]), 0.0, out)

    def scale(self) -> float:
        return max(self.hi - self.lo, float(self.r.max()))

    def symmetric_about(self, c: float, tol: float = 1e-10) -> bool:
        s = self.scale()
        if abs((self.lo + self.hi) - 2 * c) > tol * s:
            return False
        # clip so rounding at the end nodes cannot step off the meridian
        refl = np.clip(2 * c - self.t, self.lo, self.hi)
        return bool(np.max(np.abs(self(refl) - self.r)) <= tol * s)

    @property
    def even(self) -> bool:
        return self.symmetric_about(0.0)

    @classmethod
    def sample(cls, f, lo: float, hi: float, m: int = SMOOTH_GRID, **kw) -> "Profile":
        t = chebyshev_nodes(lo, hi, m)
        r = np.maximum(np.asarray(f(t), dtype=float), 0.0)
        return cls(t, r, **kw)

    def to_dict(self):
        return {"t": self.t.tolist(), "r": self.r.tolist()}

    def __repr__(self):
        return f"Profile(m={len(self.t)}, t=[{self.lo:.6g}, {self.hi:.6g}])"


def profile_from_polygon(V: np.ndarray) -> Profile:
    """Upper chain of a meridian polygon symmetric about the horizontal axis."""
    x_lo, y_lo, x_up, y_up = planar.chains(V, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    r = 0.5 * (np.maximum(y_up, 0.0) + np.maximum(-np.interp(x_up, x_lo, y_lo), 0.0))
    return Profile(x_up, r, positive_interior=False)


def concave_majorant(t: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Least concave function above the samples, evaluated back on the grid ``t``."""
    hull = []
    for i in range(len(t)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (t[b] - t[a]) * (r[i] - r[a]) - (r[b] - r[a]) * (t[i] - t[a]) >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(t, t[hull], r[hull])


def _segment_gauss(t: np.ndarray, r: np.ndarray):
    """Gauss nodes/weights per meridian segment (4 points, exact up to degree 7)."""
    h = np.diff(t)
    T = t[:-1, None] + h[:, None] * GL4_NODES
    R = r[:-1, None] + np.diff(r)[:, None] * GL4_NODES
    W = h[:, None] * GL4_WEIGHTS
    return T, R, W


class RevolutionBody:
    """{ t*axis + y : y orthogonal to axis, |y| <= r(t) } in R^n."""

    kind = "revolution"

    def __init__(self, axis, meridian: Profile, n: int):
        if n not in DIMENSIONS:
            raise InvalidBody("dimension", f"n={n} not in {DIMENSIONS}")
        self.n = int(n)
        self.axis = as_direction(axis, self.n).copy()
        self.axis.setflags(write=False)
        if not isinstance(meridian, Profile):
            raise InvalidBody("meridian", "expected a Profile")
        self.meridian = meridian

    # --- constructors ----------------------------------------------------
    @classmethod
    def ball(cls, n: int, radius: float = 1.0, center: float = 0.0, axis=None, m: int = SMOOTH_GRID):
        return cls.ellipsoid(n, radius, radius, center=center, axis=axis, m=m)

    @classmethod
    def ellipsoid(cls, n: int, a: float, b: float, center: float = 0.0, axis=None, m: int = SMOOTH_GRID):
        """Revolution ellipsoid with semi-axis ``a`` along the axis and ``b`` across it."""
        axis = np.eye(n)[0] if axis is None else axis
        theta = np.linspace(math.pi, 0.0, m + 1)
        # vertices slightly outside, edge midpoints slightly inside: halves the support
        # error of the inscribed polygon and nearly cancels its volume error
        R = 1.0 / math.sqrt(math.cos(0.5 * math.pi / m))
        t = center + R * a * np.cos(theta)
        t[0], t[-1] = center - R * a, center + R * a
        r = R * b * np.sin(theta)
        r[0] = r[-1] = 0.0
        return cls(axis, Profile(t, r), n)

    @classmethod
    def from_function(cls, f, lo: float, hi: float, n: int, axis=None, m: int = SMOOTH_GRID):
        axis = np.eye(n)[0] if axis is None else axis
        return cls(axis, Profile.sample(f, lo, hi, m), n)

    # --- basic data ------------------------------------------------------
    @property
    def t(self):
        return self.meridian.t

    @property
    def r(self):
        return self.meridian.r

    @cached_property
    def meridian_polygon(self) -> np.ndarray:
        """The section by a plane containing the axis, in (t, radial) coordinates, ccw."""
        t, r = self.t, self.r
        V = np.concatenate([np.column_stack([t, -r]), np.column_stack([t[::-1], r[::-1]])])
        return planar.clean_ccw(V)

    @cached_property
    def diameter(self) -> float:
        return planar.diameter(self.meridian_polygon)[0]

    @cached_property
    def _gauss(self):
        return _segment_gauss(self.t, self.r)

    def _moment(self, tp: int, rp: int) -> float:
        T, R, W = self._gauss
        return float(np.sum(W * T ** tp * R ** rp))

    def volume(self) -> float:
        return kappa(self.n - 1) * self._moment(0, self.n - 1)

    def axial_centroid(self) -> float:
        return self._moment(1, self.n - 1) / self._moment(0, self.n - 1)

    def centroid(self) -> np.ndarray:
        return self.axial_centroid() * self.axis

    def second_moment(self) -> np.ndarray:
        """Integral of x x^T over the body."""
        k = kappa(self.n - 1)
        axial = k * self._moment(2, self.n - 1)
        perp = k * self._moment(0, self.n + 1) / (self.n + 1)
        P = np.outer(self.axis, self.axis)
        return axial * P + perp * (np.eye(self.n) - P)

    def _split(self, d):
        d = np.asarray(d, dtype=float)
        alpha = d @ self.axis
        beta = np.linalg.norm(d - np.multiply.outer(alpha, self.axis), axis=-1)
        return alpha, beta

    def support(self, d) -> float:
        alpha, beta = self._split(d)
        return float(np.max(alpha * self.t + beta * self.r))

    def support_many(self, D) -> np.ndarray:
        alpha, beta = self._split(np.atleast_2d(D))
        D2 = np.column_stack([alpha, beta])
        return planar.support(self.meridian_polygon, D2)

    def axial_support(self):
        """(lo, hi) extent along the axis."""
        return self.meridian.lo, self.meridian.hi

    def radial_coordinates(self, pts):
        pts = np.atleast_2d(pts)
        a = pts @ self.axis
        rad = np.linalg.norm(pts - np.outer(a, self.axis), axis=1)
        return a, rad

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        a, rad = self.radial_coordinates(pts)
        inside = (a >= self.meridian.lo - tol) & (a <= self.meridian.hi + tol)
        return inside & (rad <= self.meridian(np.clip(a, self.meridian.lo, self.meridian.hi)) + tol)

    def on_axis(self, z, tol: float = 1e-12) -> float:
        """Axial coordinate of ``z``; raises if ``z`` is off the axis."""
        z = np.asarray(z, dtype=float)
        s = float(z @ self.axis)
        if np.linalg.norm(z - s * self.axis) > tol * max(1.0, self.diameter):
            raise RepresentationError("point is off the axis of the body of revolution")
        return s

    def interior_margin(self, z) -> float:
        s = self.on_axis(z)
        A, b = planar.edge_halfspaces(self.meridian_polygon)
        return float(np.min(b - A @ np.array([s, 0.0])))

    def is_centrally_symmetric(self, center=None, tol: float = 1e-8) -> bool:
        c = self.axial_centroid() if center is None else self.on_axis(center)
        return self.meridian.symmetric_about(c, tol)

    def face_volume(self, u) -> float:
        """(n-1)-volume of the face exposed in direction ``u``."""
        alpha, beta = self._split(u)
        if beta > 1e-12:
            return 0.0
        rr = self.r[-1] if alpha > 0 else self.r[0]
        return kappa(self.n - 1) * rr ** (self.n - 1)

    # --- sections --------------------------------------------------------
    def section(self, u, t: float):
        u = as_direction(u, self.n)
        alpha = float(u @ self.axis)
        w = u - alpha * self.axis
        beta = float(np.linalg.norm(w))
        if beta > 1e-14:
            w = w / beta
        else:
            beta = 0.0
            w = complement_basis(self.axis)[:, 0]
        sb = SectionBody(self, alpha, beta, float(t), w)
        if sb.empty:
            return EmptySection(self.n - 1)
        return sb

    # --- transforms ------------------------------------------------------
    def apply_affine(self, T: AffineMap) -> "RevolutionBody":
        M = T.matrix
        a = self.axis
        Ma = M @ a
        lam = float(Ma @ a)
        scale = max(1.0, float(np.abs(M).max()))
        if np.linalg.norm(Ma - lam * a) > 1e-9 * scale:
            raise RepresentationError("affine map does not preserve the axis")
        B = complement_basis(a)
        MB = M @ B
        if np.abs(a @ MB).max() > 1e-9 * scale:
            raise RepresentationError("affine map does not preserve the orthogonal complement of the axis")
        G = MB.T @ MB
        mu2 = float(np.trace(G)) / G.shape[0]
        if np.abs(G - mu2 * np.eye(G.shape[0])).max() > 1e-9 * scale * scale:
            raise RepresentationError("affine map is not a similarity across the axis")
        c = T.translation
        tau = float(c @ a)
        if np.linalg.norm(c - tau * a) > 1e-9 * max(1.0, float(np.linalg.norm(c))):
            raise RepresentationError("translation moves the axis")
        mu = math.sqrt(mu2)
        t2 = lam * self.t + tau
        r2 = mu * self.r
        if lam < 0:
            t2, r2 = t2[::-1], r2[::-1]
        return RevolutionBody(a, Profile(t2, r2, positive_interior=False), self.n)

    def with_profile(self, t, r) -> "RevolutionBody":
        return RevolutionBody(self.axis, Profile(t, r, positive_interior=False), self.n)

    def __repr__(self):
        return f"RevolutionBody(n={self.n}, axis={np.round(self.axis, 6).tolist()}, {self.meridian!r})"


def _nearby_roots(q0, q1, q2):
    """Real roots of q0 + q1 x + q2 x^2 closest to [0, 1] from the left (in [-1, 0]) and from
    the right (in [1, 2]), up to 1e-6 of slack, with the remaining root of each (inf when Q is linear, nan if none)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = q1 * q1 - 4.0 * q2 * q0
        sq = np.sqrt(np.maximum(disc, 0.0))
        tmp = -0.5 * (q1 + np.where(q1 >= 0, sq, -sq))
        r1 = np.where(q2 != 0, tmp / q2, np.inf)
        r2 = np.where(tmp != 0, q0 / tmp, np.nan)
    real = disc >= 0
    r1 = np.where(real, r1, np.nan)
    r2 = np.where(real, r2, np.nan)
    linear = ~np.isfinite(r1) & np.isfinite(r2)
    out_l = np.full(len(q0), np.nan)
    out_r = np.full(len(q0), np.nan)
    oth_l = np.full(len(q0), np.nan)
    oth_r = np.full(len(q0), np.nan)
    for root, other in ((r1, r2), (r2, r1)):
        other = np.where(linear, np.inf, other)
        # roots a rounding error inside the piece count as end roots
        left = (root >= -1.0) & (root <= 1e-6) & ~(out_l >= root)
        out_l = np.where(left, root, out_l)
        oth_l = np.where(left, other, oth_l)
        right = (root >= 1.0 - 1e-6) & (root <= 2.0) & ~(out_r <= root)
        out_r = np.where(right, root, out_r)
        oth_r = np.where(right, other, oth_r)
    return out_l, out_r, oth_l, oth_r


class SectionBody:
    """Hyperplane section of a body of revolution, {<u, x> = t}.

    With u = alpha*axis + beta*w, points of the section are t*u + s*e + y with
    e = -beta*axis + alpha*w and y orthogonal to both axis and w. Such a point
    lies in the body iff |y| <= rho(s) = sqrt(r(A)^2 - B^2) where
    A(s) = t*alpha - s*beta is the axial and B(s) = t*beta + s*alpha the
    in-plane radial coordinate. The section is therefore itself a body of
    revolution in dimension n-1 about the line through t*u along e.
    """

    kind = "section"

    def __init__(self, body: RevolutionBody, alpha: float, beta: float, t: float, w: np.ndarray):
        self.body = body
        self.n = body.n - 1
        self.alpha, self.beta, self.t = alpha, beta, t
        self.w = w
        self.e = -beta * body.axis + alpha * w
        self.s_lo, self.s_hi, self.breaks = self._range()

    def A(self, s):
        return self.t * self.alpha - np.asarray(s) * self.beta

    def B(self, s):
        return self.t * self.beta + np.asarray(s) * self.alpha

    def _r(self, s):
        # s stays in the axial range, so clipping only absorbs rounding at its ends
        mer = self.body.meridian
        return mer(np.clip(self.A(s), mer.lo, mer.hi))

    def rho2(self, s):
        return self._r(s) ** 2 - self.B(s) ** 2

    def rho(self, s):
        return np.sqrt(np.maximum(self.rho2(s), 0.0))

    def _g(self, s):
        return self._r(s) - np.abs(self.B(s))

    def _range(self):
        mer = self.body.meridian
        a, b, t = self.alpha, self.beta, self.t
        scale = max(self.body.diameter, 1.0)
        if b == 0.0:
            A0 = t * a
            if A0 <= mer.lo or A0 >= mer.hi:
                return 0.0, 0.0, np.array([])
            R = float(mer(A0))
            return -R, R, np.array([-R, R])
        # s-domain where the axial coordinate stays on the meridian
        s_a, s_b = sorted(((t * a - mer.lo) / b, (t * a - mer.hi) / b))
        cand = [s_a, s_b]
        cand.extend(((t * a - mer.t) / b).tolist())
        if abs(a) > 0:
            cand.append(-t * b / a)
        cand = np.unique(np.clip(np.array(cand), s_a, s_b))
        g = self._g(cand)
        k = int(np.argmax(g))
        if g[k] <= 1e-12 * scale:
            return 0.0, 0.0, np.array([])
        # g is concave and piecewise linear in s with kinks in ``cand``: find its zeros
        if g[0] >= 0:
            lo = cand[0]
        else:
            j = int(np.flatnonzero(g[:k] < 0)[-1])
            lo = cand[j] + (cand[j + 1] - cand[j]) * (-g[j]) / (g[j + 1] - g[j])
        if g[-1] >= 0:
            hi = cand[-1]
        else:
            j = k + int(np.flatnonzero(g[k:] < 0)[0])
            hi = cand[j - 1] + (cand[j] - cand[j - 1]) * g[j - 1] / (g[j - 1] - g[j])
        inner = cand[(cand > lo) & (cand < hi)]
        return float(lo), float(hi), np.concatenate([[lo], inner, [hi]])

    @property
    def empty(self) -> bool:
        return not self.s_hi > self.s_lo + 1e-12 * max(self.body.diameter, 1.0)

    @cached_property
    def _volume(self) -> float:
        k = self.n - 1  # fibre dimension
        if k == 0:
            return self.s_hi - self.s_lo
        br = self.breaks
        total = 0.0
        if k == 2:
            # rho^2 is quadratic on every piece: Gauss is exact
            h = np.diff(br)
            S = br[:-1, None] + h[:, None] * GL4_NODES
            total = float(np.sum(h[:, None] * GL4_WEIGHTS * np.maximum(self.rho2(S), 0.0)))
            return math.pi * total
        # k == 1: rho^2 is a quadratic Q on every piece; near a real root of Q the
        # square root is not polynomial-like, so substitute x = x0 +- v^2 there
        a, h = br[:-1], np.diff(br)
        f0, fm, f1 = (self.rho2(a), self.rho2(a + 0.5 * h), self.rho2(br[1:]))
        q2 = 2.0 * (f0 - 2.0 * fm + f1)
        q1 = f1 - f0 - q2
        q0 = f0
        x_left, x_right, other_l, other_r = _nearby_roots(q0, q1, q2)
        has_l, has_r = np.isfinite(x_left), np.isfinite(x_right)
        X, W = GL12_NODES, GL12_WEIGHTS
        out = np.zeros(len(h))
        plain = ~(has_l | has_r)
        if plain.any():
            x = X[None, :]
            Q = q0[plain, None] + x * (q1[plain, None] + x * q2[plain, None])
            out[plain] = np.sum(W * np.sqrt(np.maximum(Q, 0.0)), axis=1)
        both = has_l & has_r
        # (root, other root, sign, x-range) for every substituted segment
        for sel, root, other, sgn, xa, xb in (
                (has_l & ~has_r, x_left, other_l, 1.0, 0.0, 1.0),
                (has_r & ~has_l, x_right, other_r, -1.0, 0.0, 1.0),
                (both, x_left, other_l, 1.0, 0.0, 0.5),
                (both, x_right, other_r, -1.0, 0.5, 1.0)):
            if not sel.any():
                continue
            x0, xo = root[sel], other[sel]
            va, vb = np.sqrt(np.abs(xa - x0)), np.sqrt(np.abs(xb - x0))
            lo_v, hi_v = np.minimum(va, vb), np.maximum(va, vb)
            v = lo_v[:, None] + (hi_v - lo_v)[:, None] * X[None, :]
            x = x0[:, None] + sgn * v * v
            # sqrt(Q) = v * sqrt(|q2 (x - other)|), or v * sqrt(|q1|) when Q is linear
            fin = np.isfinite(xo)
            gap = x - np.where(fin, xo, 0.0)[:, None]
            lead = np.where(fin[:, None], np.abs(q2[sel, None] * gap), np.abs(q1[sel, None]) + 0.0 * x)
            vals = 2.0 * v * v * np.sqrt(lead)
            out[sel] += (hi_v - lo_v) * np.sum(W * vals, axis=1)
        return 2.0 * float(np.sum(h * out))

    def volume(self) -> float:
        return self._volume

    def s_grid(self, m: int = 2048) -> np.ndarray:
        return chebyshev_nodes(self.s_lo, self.s_hi, m)

    def profile(self, m: int = 2048) -> Profile:
        s = self.s_grid(m)
        rr = self.rho(s)
        rr[0] = max(rr[0], 0.0)
        return Profile(s, rr, positive_interior=False)

    def meridian_polygon(self, m: int = 2048) -> np.ndarray:
        s = self.s_grid(m)
        rr = self.rho(s)
        V = np.concatenate([np.column_stack([s, -rr]), np.column_stack([s[::-1], rr[::-1]])])
        return planar.clean_ccw(V)

    def origin(self) -> np.ndarray:
        """Point of the section with s = 0 (the foot t*u)."""
        return self.t * (self.alpha * self.body.axis + self.beta * self.w)

    def __repr__(self):
        return f"SectionBody(n={self.n}, s=[{self.s_lo:.6g}, {self.s_hi:.6g}])"

