"""Array-level routines for convex polygons stored as counterclockwise (k, 2) vertex arrays.

These are shared by :class:`~santalo.bodies.Polygon` and by the meridian
polygons of bodies of revolution, so they work on plain arrays and do no
validation beyond what each routine needs.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..errors import InvalidBody

COLLINEAR_SIN = 1e-11


def cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def clean_ccw(V: np.ndarray, sin_tol: float = COLLINEAR_SIN) -> np.ndarray:
    """Drop repeated and collinear vertices of a counterclockwise convex polygon."""
    V = np.asarray(V, dtype=float)
    scale = max(np.ptp(V[:, 0]), np.ptp(V[:, 1]), 1e-300)
    for _ in range(len(V)):
        if len(V) < 3:
            break
        nxt = np.roll(V, -1, axis=0)
        keep = np.linalg.norm(nxt - V, axis=1) > 1e-14 * scale
        if not keep.all():
            V = V[keep]
            continue
        e_in = V - np.roll(V, 1, axis=0)
        e_out = np.roll(V, -1, axis=0) - V
        s = cross2(e_in, e_out) / (np.linalg.norm(e_in, axis=1) * np.linalg.norm(e_out, axis=1))
        bad = s <= sin_tol
        if not bad.any():
            break
        # remove every other offending vertex so runs halve safely each pass
        idx = np.flatnonzero(bad)
        start = np.concatenate([[True], np.diff(idx) > 1])
        run_id = np.cumsum(start) - 1
        pos = np.arange(len(idx)) - np.flatnonzero(start)[run_id]
        drop = idx[pos % 2 == 0]
        mask = np.ones(len(V), bool)
        mask[drop] = False
        V = V[mask]
    return V


def hull_2d(points: np.ndarray) -> np.ndarray:
    """Counterclockwise extreme points of a planar point set."""
    points = np.asarray(points, dtype=float)
    try:
        h = ConvexHull(points)
    except (QhullError, ValueError) as exc:
        raise InvalidBody("full-dimensional", "points are degenerate in the plane") from exc
    V = points[h.vertices]
    if polygon_area(V) < 0:
        V = V[::-1]
    return clean_ccw(V)


def polygon_area(V: np.ndarray) -> float:
    nxt = np.roll(V, -1, axis=0)
    return 0.5 * float(np.sum(cross2(V, nxt)))


def polygon_centroid(V: np.ndarray) -> np.ndarray:
    c0 = V.mean(axis=0)
    W = V - c0
    nxt = np.roll(W, -1, axis=0)
    cr = cross2(W, nxt)
    A = 0.5 * cr.sum()
    c = ((W + nxt) * cr[:, None]).sum(axis=0) / (6.0 * A)
    return c + c0


def polygon_second_moment(V: np.ndarray) -> np.ndarray:
    """Integral of x x^T over the polygon (fan from the origin, signed areas)."""
    P = V
    Q = np.roll(V, -1, axis=0)
    cr = cross2(P, Q)
    # triangle (0, P, Q): int x x^T = |T|/12 (P P^T + Q Q^T + (P+Q)(P+Q)^T)
    S = P + Q
    M = (np.einsum("k,ki,kj->ij", cr, P, P) + np.einsum("k,ki,kj->ij", cr, Q, Q)
         + np.einsum("k,ki,kj->ij", cr, S, S))
    return M / 24.0


def edge_halfspaces(V: np.ndarray):
    """Unit outward normals ``A`` and offsets ``b`` of the edges (edge i runs V[i] -> V[i+1])."""
    E = np.roll(V, -1, axis=0) - V
    A = np.column_stack([E[:, 1], -E[:, 0]])
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    b = np.einsum("ij,ij->i", A, V)
    return A, b


def support_index(V: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Index of a supporting vertex for each row of ``D`` (angle search, O(log k) per query)."""
    D = np.atleast_2d(D)
    A, _ = edge_halfspaces(V)
    ang = np.arctan2(A[:, 1], A[:, 0])
    start = int(np.argmin(ang))
    ang = np.unwrap(np.roll(ang, -start))
    q = np.arctan2(D[:, 1], D[:, 0])
    q = ang[0] + np.mod(q - ang[0], 2 * np.pi)
    # edge i has normal ang[i]; vertex i+1 lies between normals ang[i] and ang[i+1]
    j = np.searchsorted(ang, q, side="left")
    k = len(V)
    cand = (np.stack([j, j + 1, j - 1], axis=1) + start) % k
    vals = np.einsum("kd,kcd->kc", D, V[cand])
    return cand[np.arange(len(D)), np.argmax(vals, axis=1)]


def support(V: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Support function of the polygon at each row of ``D``."""
    D = np.atleast_2d(D)
    if len(V) * len(D) <= 4_000_000:
        return (D @ V.T).max(axis=1)
    idx = support_index(V, D)
    return np.einsum("kd,kd->k", D, V[idx])


def polar(V: np.ndarray, z) -> np.ndarray:
    """Polar polygon about the interior point ``z`` (same orientation)."""
    z = np.asarray(z, dtype=float)
    A, b = edge_halfspaces(V)
    gap = b - A @ z
    P = z + A / gap[:, None]
    return clean_ccw(P)


def chains(V: np.ndarray, e: np.ndarray, f: np.ndarray):
    """Lower and upper boundary chains with respect to the frame (e, f).

    Returns ``(x_lo, y_lo, x_up, y_up)`` with both chains sorted by the e-coordinate
    ``x``; ``y`` is the f-coordinate.
    """
    x = V @ e
    y = V @ f
    k = len(V)
    scale = max(np.ptp(x), np.ptp(y))
    tol = 1e-12 * scale
    xmin, xmax = x.min(), x.max()
    left = np.flatnonzero(x <= xmin + tol)
    right = np.flatnonzero(x >= xmax - tol)
    i0 = left[np.argmin(y[left])]
    i3 = left[np.argmax(y[left])]
    i1 = right[np.argmin(y[right])]
    i2 = right[np.argmax(y[right])]
    # orientation of the frame decides whether ccw walks the lower chain first
    ccw_frame = cross2(e, f) > 0

    def walk(a, b):
        idx = [a]
        while idx[-1] != b:
            idx.append((idx[-1] + 1) % k)
        return np.array(idx)

    def walk_back(a, b):
        idx = [a]
        while idx[-1] != b:
            idx.append((idx[-1] - 1) % k)
        return np.array(idx)

    if ccw_frame:
        lo = walk(i0, i1)
        up = walk(i2, i3)[::-1]
    else:
        lo = walk_back(i0, i1)
        up = walk_back(i2, i3)[::-1]
    return x[lo], y[lo], x[up], y[up]


def steiner(V: np.ndarray, normal, offset: float) -> np.ndarray:
    """Steiner symmetral of the polygon about the line <normal, x> = offset."""
    f = np.asarray(normal, dtype=float)
    e = np.array([f[1], -f[0]])
    x_lo, y_lo, x_up, y_up = chains(V, e, f)
    xs = np.unique(np.concatenate([x_lo, x_up]))
    w = np.interp(xs, x_up, y_up) - np.interp(xs, x_lo, y_lo)
    w = np.maximum(w, 0.0)
    top = offset + 0.5 * w
    bot = offset - 0.5 * w
    pts = np.concatenate([np.outer(xs, e) + np.outer(bot, f), np.outer(xs[::-1], e) + np.outer(top[::-1], f)])
    if cross2(e, f) < 0:
        pts = pts[::-1]
    return clean_ccw(pts)


def minkowski_sum(V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Minkowski sum of two convex polygons by merging edge directions."""

    def rotate_to_bottom(P):
        i = np.lexsort((P[:, 0], P[:, 1]))[0]
        return np.roll(P, -i, axis=0)

    P = rotate_to_bottom(V)
    Q = rotate_to_bottom(W)
    EP = np.roll(P, -1, axis=0) - P
    EQ = np.roll(Q, -1, axis=0) - Q
    E = np.concatenate([EP, EQ])
    ang = np.mod(np.arctan2(E[:, 1], E[:, 0]), 2 * np.pi)
    E = E[np.argsort(ang, kind="stable")]
    pts = P[0] + Q[0] + np.concatenate([[[0.0, 0.0]], np.cumsum(E[:-1], axis=0)])
    return clean_ccw(pts)


def contains(V: np.ndarray, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
    A, b = edge_halfspaces(V)
    return np.all(np.atleast_2d(pts) @ A.T <= b + tol, axis=1)


def hausdorff(V: np.ndarray, W: np.ndarray) -> float:
    """Hausdorff distance via the support-function sup norm.

    Evaluated at every edge normal of both polygons plus a dense circle grid;
    the sup between neighbouring sample directions exceeds the sampled max by
    a relative amount of order (angular gap)^2.
    """
    A1, _ = edge_halfspaces(V)
    A2, _ = edge_halfspaces(W)
    ang = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    D = np.concatenate([A1, A2, np.column_stack([np.cos(ang), np.sin(ang)])])
    return float(np.max(np.abs(support(V, D) - support(W, D))))


def diameter(V: np.ndarray):
    """Diameter and a realizing vertex pair (antipodal pairs of the convex polygon)."""
    k = len(V)
    if k <= 2000:
        d = np.linalg.norm(V[:, None, :] - V[None, :, :], axis=2)
        i, j = np.unravel_index(np.argmax(d), d.shape)
        return float(d[i, j]), V[i], V[j]
    A, _ = edge_halfspaces(V)
    opp = support_index(V, -A)
    i = np.arange(k)
    I = np.concatenate([i, (i + 1) % k])
    J = np.concatenate([opp, opp])
    d = np.linalg.norm(V[I] - V[J], axis=1)
    m = int(np.argmax(d))
    return float(d[m]), V[I[m]], V[J[m]]
