"""Brute-force reference computations used by the tests.

Each oracle takes a deliberately different route from the library code: grids,
vertex enumeration, membership sampling or closed forms.
"""
import math

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull


def kappa(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def ccw_hull(P):
    h = ConvexHull(P)
    return P[h.vertices]


def facets_2d(V):
    """Outward unit normals and offsets straight from consecutive ccw vertices."""
    E = np.roll(V, -1, axis=0) - V
    N = np.column_stack([E[:, 1], -E[:, 0]])
    N /= np.linalg.norm(N, axis=1)[:, None]
    return N, np.einsum("ij,ij->i", N, V)


# --------------------------------------------------------------------------
# gauge and support
# --------------------------------------------------------------------------
def gauge(V, y):
    """min lambda with y in lambda * conv(V), as an LP over convex weights (o interior)."""
    k, n = V.shape
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_eq = np.zeros((n + 1, k + 1))
    A_eq[:n, :k] = V.T
    A_eq[n, :k] = 1.0
    A_eq[n, k] = -1.0
    b_eq = np.concatenate([y, [0.0]])
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (k + 1), method="highs")
    assert res.status == 0
    return res.fun


def support(V, d):
    return float(np.max(V @ d))


# --------------------------------------------------------------------------
# chords and Steiner symmetrization
# --------------------------------------------------------------------------
def chord(V, w, y, u):
    """Extent along u of the line {<x, w> = y} inside the polygon V (None if it misses)."""
    k = len(V)
    pts = []
    for i in range(k):
        p, q = V[i], V[(i + 1) % k]
        hp, hq = p @ w - y, q @ w - y
        if hp == 0:
            pts.append(p @ u)
        if hp * hq < 0:
            lam = hp / (hp - hq)
            pts.append((p + lam * (q - p)) @ u)
    if len(pts) < 2:
        return None
    return min(pts), max(pts)


def steiner_chord_error(V, W, u, c, samples=200):
    """max deviation of W's chords from recentred chords of V along u about <x, u> = c."""
    w = np.array([-u[1], u[0]])
    ys = V @ w
    lo, hi = ys.min(), ys.max()
    worst = 0.0
    for y in np.linspace(lo, hi, samples + 2)[1:-1]:
        a = chord(V, w, y, u)
        b = chord(W, w, y, u)
        L = a[1] - a[0]
        worst = max(worst, abs(b[0] - (c - L / 2)), abs(b[1] - (c + L / 2)))
    return worst


# --------------------------------------------------------------------------
# Minkowski symmetry by grid search
# --------------------------------------------------------------------------
def q_at(V, x):
    """Least lambda with -(M - x) inside lambda (M - x), from vertex/edge pairs."""
    N, b = facets_2d(V)
    gap = b - N @ x
    if np.any(gap <= 0):
        return np.inf
    # point x - (v - x) must satisfy <a_i, p - x> <= lambda * gap_i
    num = (N @ x)[:, None] - N @ V.T  # <a_i, x - v_j>
    return float(np.max(num / gap[:, None]))


def q_grid(V, levels=7, k=41):
    lo, hi = V.min(axis=0), V.max(axis=0)
    center = V.mean(axis=0)
    half = 0.5 * (hi - lo)
    best = (np.inf, center)
    for _ in range(levels):
        xs = np.linspace(center[0] - half[0], center[0] + half[0], k)
        ys = np.linspace(center[1] - half[1], center[1] + half[1], k)
        for x in xs:
            for y in ys:
                val = q_at(V, np.array([x, y]))
                if val < best[0]:
                    best = (val, np.array([x, y]))
        center = best[1]
        half = half * 4.0 / (k - 1)
    return max(1.0, best[0])


# --------------------------------------------------------------------------
# Ellipse sandwiches by parameter grid search
# --------------------------------------------------------------------------
def ellipse_ratio(V, theta, g):
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    Q = R @ np.diag([math.exp(-g), math.exp(g)]) @ R.T
    Qi = R @ np.diag([math.exp(g), math.exp(-g)]) @ R.T
    N, b = facets_2d(V)
    outer = math.sqrt(max(np.einsum("ij,jk,ik->i", V, Q, V)))
    inner = min(b / np.sqrt(np.einsum("ij,jk,ik->i", N, Qi, N)))
    return outer / inner


def bm_grid(V, levels=6, k=37):
    """min over centred ellipses of the sandwich ratio, zooming on (angle, log aspect)."""
    t0, g0 = math.pi / 2, 0.0
    ht, hg = math.pi / 2, 4.0
    best = (np.inf, t0, g0)
    for _ in range(levels):
        for t in np.linspace(t0 - ht, t0 + ht, k):
            for g in np.linspace(g0 - hg, g0 + hg, k):
                r = ellipse_ratio(V, t, g)
                if r < best[0]:
                    best = (r, t, g)
        _, t0, g0 = best
        ht, hg = ht * 4.0 / (k - 1), hg * 4.0 / (k - 1)
    return best[0]


# --------------------------------------------------------------------------
# closed forms and other references
# --------------------------------------------------------------------------
def cap_volume_closed(n, c):
    """Volume of the cap {x_1 >= c} of the unit ball for n = 3 and 4."""
    if n == 3:
        return math.pi * (1 - c) ** 2 * (2 + c) / 3
    if n == 4:
        # kappa_3 * int_c^1 (1 - x^2)^{3/2} dx
        F = lambda x: (x * (5 - 2 * x * x) * math.sqrt(max(1 - x * x, 0)) + 3 * math.asin(x)) / 8
        return 4 * math.pi / 3 * (F(1.0) - F(c))
    raise ValueError(n)


def minkowski_sum_2d(V, W):
    return ccw_hull((V[:, None, :] + W[None, :, :]).reshape(-1, 2))


def mixed_area_fd(V, W, ts=(1e-3, 5e-4)):
    """V_1 by Richardson extrapolated finite differences of area(V + tW)."""
    A0 = ConvexHull(V).volume
    est = [(ConvexHull(minkowski_sum_2d(V, t * W)).volume - A0) / (2 * t) for t in ts]
    return 2 * est[1] - est[0]


def santalo_grid(V, k=121, levels=5):
    """Minimize the polar area over a zooming lattice of interior points."""
    lo, hi = V.min(axis=0), V.max(axis=0)
    center, half = V.mean(axis=0), 0.5 * (hi - lo)
    N, b = facets_2d(V)
    best = (np.inf, center)
    for _ in range(levels):
        for x in np.linspace(center[0] - half[0], center[0] + half[0], k):
            for y in np.linspace(center[1] - half[1], center[1] + half[1], k):
                z = np.array([x, y])
                gap = b - N @ z
                if np.any(gap <= 1e-9):
                    continue
                area = ConvexHull(N / gap[:, None]).volume
                if area < best[0]:
                    best = (area, z)
        center = best[1]
        half = half * 4.0 / (k - 1)
    return best[1], best[0]


def dense_chord_radius(inside, origin, e, f, s, span=2.0, m=200001):
    """Half-length of {origin + s e + y f} inside the body, by dense membership sampling."""
    ys = np.linspace(0.0, span, m)
    P = origin + s * e + ys[:, None] * f
    mask = inside(P)
    if not mask.any():
        return 0.0
    return ys[np.flatnonzero(mask)[-1]]


def line_chord(A, b, p, u):
    """Parameter range of {p + s u} inside {A x <= b}, straight from the inequalities."""
    au = A @ u
    gap = b - A @ p
    with np.errstate(divide="ignore"):
        ratio = gap / au
    lo = np.max(ratio[au < -1e-14], initial=-np.inf)
    hi = np.min(ratio[au > 1e-14], initial=np.inf)
    if np.any((np.abs(au) <= 1e-14) & (gap < 0)) or hi < lo:
        return None
    return lo, hi


def hull_facets(P):
    h = ConvexHull(P)
    return h.equations[:, :-1], -h.equations[:, -1]
